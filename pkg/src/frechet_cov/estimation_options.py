"""Shared estimation option enums and parsing helpers."""

from __future__ import annotations

from collections.abc import Iterable
from enum import Enum
from typing import TypeVar


class KernelKind(str, Enum):
    """Compactly supported smoothing kernels on [-1, 1]."""

    EPANECHNIKOV = "epanechnikov"
    UNIFORM = "uniform"
    TRIANGULAR = "triangular"


class WeightOrder(str, Enum):
    """Local polynomial order of the smoothing weights."""

    NW = "nw"
    LOCAL_LINEAR = "locallinear"


class Estimator(str, Enum):
    """Covariance-curve estimators."""

    NW = "nw"
    LOCAL_LINEAR_RAW = "ll"
    LOCAL_FRECHET = "lf"
    DCOV_SQRT = "dcov"


class SamplingDesign(str, Enum):
    """How many observations each simulated subject contributes."""

    SINGLE = "single"
    REPEATED = "repeated"


EnumT = TypeVar("EnumT", bound=Enum)


def enum_values(enum_cls: type[EnumT]) -> tuple[str, ...]:
    """Values accepted on the command line and in config files, in declaration order."""

    return tuple(str(member.value) for member in enum_cls)


def choices_text(values: Iterable[str]) -> str:
    """Help-text listing such as ``"nw, ll, lf or dcov"``."""

    names = list(values)
    if len(names) < 2:
        return "".join(names)
    return f"{', '.join(names[:-1])} or {names[-1]}"


def parse_case_insensitive_enum(raw_value: str, enum_cls: type[EnumT], option: str | None = None) -> EnumT:
    """Parse enum values case-insensitively; ``ValueError`` names ``option`` and the allowed values."""

    normalized = raw_value.strip().lower()
    for member in enum_cls:
        if str(member.value).lower() == normalized:
            return member

    allowed = ", ".join(enum_values(enum_cls))
    raise ValueError(f"Invalid {option or enum_cls.__name__}: '{raw_value}'. Allowed values: {allowed}.")

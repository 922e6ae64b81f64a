"""Error taxonomy shared by the estimators, the codecs and the CLI.

Every error carries a stable ``code`` so handlers can render structured
payloads, and an ``exit_code`` the CLI maps onto the process status:

* ``2`` configuration errors
* ``3`` data errors
* ``4`` numerical failures
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar


@dataclass(frozen=True, slots=True)
class FrechetCovError(ValueError):
    message: str
    code: str = "frechet_cov_error"
    location: float | None = None

    exit_code: ClassVar[int] = 1

    def __str__(self) -> str:
        return self.message

    def as_dict(self) -> dict[str, object]:
        payload: dict[str, object] = {"code": self.code, "message": self.message}
        if self.location is not None:
            payload["location"] = self.location
        return payload


@dataclass(frozen=True, slots=True)
class ConfigError(FrechetCovError):
    code: str = "config_error"

    exit_code: ClassVar[int] = 2


@dataclass(frozen=True, slots=True)
class InvalidDesignError(FrechetCovError):
    code: str = "invalid_design"

    exit_code: ClassVar[int] = 2


@dataclass(frozen=True, slots=True)
class GridTooCoarseError(FrechetCovError):
    code: str = "grid_too_coarse"

    exit_code: ClassVar[int] = 2


@dataclass(frozen=True, slots=True)
class DataFormatError(FrechetCovError):
    """Malformed CSV/JSON input; ``location`` is the 1-based line number."""

    code: str = "data_format_error"

    exit_code: ClassVar[int] = 3


@dataclass(frozen=True, slots=True)
class InvalidObservationsError(FrechetCovError):
    code: str = "invalid_observations"

    exit_code: ClassVar[int] = 3


@dataclass(frozen=True, slots=True)
class MeanNotEvaluableError(FrechetCovError):
    code: str = "mean_not_evaluable"

    exit_code: ClassVar[int] = 3


@dataclass(frozen=True, slots=True)
class NumericalError(FrechetCovError):
    code: str = "numerical_error"

    exit_code: ClassVar[int] = 4


@dataclass(frozen=True, slots=True)
class DegenerateWindowError(NumericalError):
    """Too few observations inside the kernel window at ``location``."""

    code: str = "degenerate_window"


@dataclass(frozen=True, slots=True)
class DimMismatchError(NumericalError):
    code: str = "dim_mismatch"


@dataclass(frozen=True, slots=True)
class EigFailureError(NumericalError):
    code: str = "eig_failure"


@dataclass(frozen=True, slots=True)
class NotPositiveSemidefiniteError(NumericalError):
    code: str = "not_positive_semidefinite"


@dataclass(frozen=True, slots=True)
class DegenerateDiagonalError(NumericalError):
    code: str = "degenerate_diagonal"


@dataclass(frozen=True, slots=True)
class NotACovarianceError(NumericalError):
    code: str = "not_a_covariance"


@dataclass(frozen=True, slots=True)
class AllCandidatesDegenerateError(NumericalError):
    code: str = "all_candidates_degenerate"


@dataclass(frozen=True, slots=True)
class SingularSystemError(NumericalError):
    code: str = "singular_system"


@dataclass(frozen=True, slots=True)
class RankDeficientError(NumericalError):
    code: str = "rank_deficient"

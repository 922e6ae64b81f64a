"""Domain models for estimation runs and their provenance."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

from frechet_cov.estimation_options import Estimator, SamplingDesign

MANIFEST_SCHEMA_VERSION = 1


class CommandName(str, Enum):
    """Commands that write a run manifest and can be replayed."""

    SIMULATE = "simulate"
    FIT = "fit"
    BENCHMARK = "benchmark"
    VCM = "vcm"
    FPCA = "fpca"


@dataclass(frozen=True, slots=True)
class RunManifest:
    """Everything needed to re-run a command and reproduce its outputs."""

    command: str
    run_id: str
    arguments: dict[str, Any]
    resolved: dict[str, Any]
    software_version: str
    outputs: tuple[str, ...] = ()
    started_at: str = ""
    wall_time_seconds: float = 0.0
    schema_version: int = MANIFEST_SCHEMA_VERSION


@dataclass(frozen=True, slots=True)
class FitRequest:
    """Options for estimating one covariance curve from observations."""

    grid_points: int = 101
    grid_start: float | None = None
    grid_end: float | None = None
    h_mean: float | None = None
    h_cov: float | None = None
    estimator: Estimator = Estimator.LOCAL_FRECHET
    correlation: bool = False
    folds: int = 5
    seed: int = 0
    threads: int | None = None


@dataclass(frozen=True, slots=True)
class VcmRequest:
    grid_points: int = 101
    h_mean: float | None = None
    h_cov: float | None = None
    h_gamma: float | None = None
    ridge_lambda: float | None = None
    baseline: float = 100.0
    estimate_baseline: bool = False
    folds: int = 5
    seed: int = 0
    threads: int | None = None


@dataclass(frozen=True, slots=True)
class BenchmarkRequest:
    dims: tuple[int, ...]
    sizes: tuple[int, ...]
    estimators: tuple[Estimator, ...]
    bandwidths: tuple[float, ...]
    replicates: int
    seed: int = 0
    design: SamplingDesign = SamplingDesign.SINGLE
    ise_points: int = 101
    ise_trim: float = 0.025
    threads: int | None = None


@dataclass(frozen=True, slots=True)
class FpcaRequest:
    components: int = 3
    probs: tuple[float, ...] = (0.25, 0.5, 0.75)

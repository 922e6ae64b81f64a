"""Cross-validated bandwidth choice for the mean and covariance smoothers.

Covariance bandwidths are chosen by two criteria evaluated on held-out raw
covariance matrices: squared Frobenius distance (``h1``, tends to
undersmooth) and the pseudo-inverse trace criterion (``h2``, tends to
oversmooth). The combined choice is their geometric mean.
"""

from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging

import numpy as np

from .domain.errors import AllCandidatesDegenerateError, ConfigError, DegenerateWindowError
from .dyn_cov import (
    ObservationSet,
    RawCovSet,
    covariance_stack,
    estimate_means,
    raw_covariances,
)
from .estimation_options import Estimator, WeightOrder
from .kernel_smoothing import (
    DEFAULT_KERNEL,
    Kernel,
    default_bandwidth_candidates,
    loo_cv_score,
    weight_matrix,
)
from .matrix_space import pseudo_inverse_stack

logger = logging.getLogger(__name__)

TIE_RTOL = 1e-10
TIE_SCALE_ATOL = 1e-12


@dataclass(frozen=True, slots=True)
class BandwidthGrid:
    candidates: np.ndarray
    folds: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        candidates = np.atleast_1d(np.asarray(self.candidates, dtype=np.float64))
        if candidates.ndim != 1 or candidates.size == 0:
            raise ConfigError("Bandwidth grid needs at least one candidate.")
        if np.any(candidates <= 0.0) or np.any(np.diff(candidates) <= 0.0):
            raise ConfigError("Bandwidth candidates must be positive and strictly increasing.")
        if self.folds < 2:
            raise ConfigError(f"Cross-validation needs at least 2 folds, got {self.folds}.")
        object.__setattr__(self, "candidates", candidates)

    @classmethod
    def default_for(cls, data: ObservationSet, folds: int = 5, seed: int = 0) -> "BandwidthGrid":
        return cls(
            candidates=default_bandwidth_candidates(data.times, data.domain_end),
            folds=folds,
            seed=seed,
        )


@dataclass(frozen=True, slots=True)
class BandwidthSelection:
    h1: float
    h2: float
    h_opt: float
    h1_scores: np.ndarray
    h2_scores: np.ndarray


def fold_partition(n: int, folds: int, seed: int) -> list[np.ndarray]:
    """Random partition of ``range(n)`` into ``folds`` near-equal sorted folds."""

    if folds > n:
        raise ConfigError(f"Cannot split {n} observations into {folds} folds.")
    permutation = np.random.default_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(permutation, folds)]


def _complement(n: int, fold: np.ndarray) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[fold] = False
    return np.flatnonzero(mask)


def _score_or_nan(score: Callable[[float], float], h: float) -> float:
    try:
        return score(h)
    except DegenerateWindowError as exc:
        logger.debug("Bandwidth %g rejected: %s", h, exc)
        return float("nan")


def _map_candidates(
    score: Callable[[float], float],
    candidates: np.ndarray,
    workers: int | None,
) -> np.ndarray:
    if workers == 1 or candidates.size == 1:
        values = [_score_or_nan(score, float(h)) for h in candidates]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            values = list(executor.map(lambda h: _score_or_nan(score, float(h)), candidates))
    return np.asarray(values, dtype=np.float64)


def select_minimizer(candidates: np.ndarray, scores: np.ndarray, atol: float = 0.0) -> float:
    """Smallest candidate whose score ties the minimum; NaN marks invalid candidates."""

    valid = np.isfinite(scores)
    if not np.any(valid):
        raise AllCandidatesDegenerateError(
            "Every bandwidth candidate leaves a degenerate smoothing window."
        )
    best = float(np.min(scores[valid]))
    ties = valid & (scores <= best + TIE_RTOL * abs(best) + atol)
    return float(candidates[np.argmax(ties)])


def mean_cv_scores(
    data: ObservationSet,
    grid: BandwidthGrid,
    kernel: Kernel = DEFAULT_KERNEL,
    workers: int | None = None,
) -> np.ndarray:
    """Pooled held-out squared error of the local linear mean smoother per candidate."""

    if grid.folds >= data.n:
        return _map_candidates(
            lambda h: loo_cv_score(data.times, data.responses, h, kernel),
            grid.candidates,
            workers,
        )

    folds = fold_partition(data.n, grid.folds, grid.seed)

    def score(h: float) -> float:
        total = 0.0
        for fold in folds:
            train = _complement(data.n, fold)
            weights = weight_matrix(
                data.times[train], data.times[fold], h, WeightOrder.LOCAL_LINEAR, kernel
            )
            residuals = data.responses[fold] - weights @ data.responses[train]
            total += float(np.sum(np.square(residuals)))
        return total

    return _map_candidates(score, grid.candidates, workers)


def cv_mean_bandwidth(
    data: ObservationSet,
    grid: BandwidthGrid,
    kernel: Kernel = DEFAULT_KERNEL,
    workers: int | None = None,
) -> float:
    scores = mean_cv_scores(data, grid, kernel, workers)
    centred = data.responses - data.responses.mean(axis=0)
    atol = TIE_SCALE_ATOL * float(np.sum(np.square(centred)))
    return select_minimizer(grid.candidates, scores, atol)


def _held_out_estimates(
    raw: RawCovSet,
    folds: list[np.ndarray],
    h: float,
    kernel: Kernel,
) -> list[tuple[np.ndarray, np.ndarray]]:
    pairs = []
    for fold in folds:
        train = raw.subset(_complement(raw.n, fold))
        estimates = covariance_stack(train, raw.times[fold], h, Estimator.LOCAL_FRECHET, kernel)
        pairs.append((fold, estimates))
    return pairs


def h1_criterion(raw: RawCovSet, folds: list[np.ndarray], h: float, kernel: Kernel = DEFAULT_KERNEL) -> float:
    """Summed squared Frobenius distance between held-out raw matrices and estimates."""

    total = 0.0
    for fold, estimates in _held_out_estimates(raw, folds, h, kernel):
        total += float(np.sum(np.square(raw.matrices[fold] - estimates)))
    return total


def h2_criterion(raw: RawCovSet, folds: list[np.ndarray], h: float, kernel: Kernel = DEFAULT_KERNEL) -> float:
    """Summed ``tr(pinv(estimate) C_i)`` over held-out observations."""

    total = 0.0
    for fold, estimates in _held_out_estimates(raw, folds, h, kernel):
        pinv = pseudo_inverse_stack(estimates)
        residuals = raw.residuals[fold]
        total += float(np.einsum("ij,ijk,ik->", residuals, pinv, residuals))
    return total


def _raw_and_folds(
    data: ObservationSet,
    grid: BandwidthGrid,
    h_mean: float,
    kernel: Kernel,
) -> tuple[RawCovSet, list[np.ndarray]]:
    """Raw covariances centred by one full-data mean fit, plus the folds.

    Only the covariance smoother is refit per fold; ``h_mean`` is held
    fixed so every candidate is scored against the same raw matrices.
    """

    raw = raw_covariances(data, estimate_means(data, h_mean, kernel=kernel))
    return raw, fold_partition(data.n, min(grid.folds, data.n), grid.seed)


def cv_h1(
    data: ObservationSet,
    grid: BandwidthGrid,
    h_mean: float,
    kernel: Kernel = DEFAULT_KERNEL,
    workers: int | None = None,
) -> float:
    raw, folds = _raw_and_folds(data, grid, h_mean, kernel)
    scores = _map_candidates(lambda h: h1_criterion(raw, folds, h, kernel), grid.candidates, workers)
    return select_minimizer(grid.candidates, scores, TIE_SCALE_ATOL * float(np.sum(np.square(raw.matrices))))


def cv_h2(
    data: ObservationSet,
    grid: BandwidthGrid,
    h_mean: float,
    kernel: Kernel = DEFAULT_KERNEL,
    workers: int | None = None,
) -> float:
    raw, folds = _raw_and_folds(data, grid, h_mean, kernel)
    scores = _map_candidates(lambda h: h2_criterion(raw, folds, h, kernel), grid.candidates, workers)
    return select_minimizer(grid.candidates, scores, TIE_SCALE_ATOL * raw.n)


def select_bandwidths(
    data: ObservationSet,
    grid: BandwidthGrid,
    h_mean: float,
    kernel: Kernel = DEFAULT_KERNEL,
    workers: int | None = None,
) -> BandwidthSelection:
    """Both covariance criteria and their geometric mean from one raw covariance set."""

    raw, folds = _raw_and_folds(data, grid, h_mean, kernel)
    h1_scores = _map_candidates(lambda h: h1_criterion(raw, folds, h, kernel), grid.candidates, workers)
    h2_scores = _map_candidates(lambda h: h2_criterion(raw, folds, h, kernel), grid.candidates, workers)
    h1 = select_minimizer(grid.candidates, h1_scores, TIE_SCALE_ATOL * float(np.sum(np.square(raw.matrices))))
    h2 = select_minimizer(grid.candidates, h2_scores, TIE_SCALE_ATOL * raw.n)
    h_opt = geometric_mean_bandwidth(h1, h2)
    logger.debug("Covariance bandwidths h1=%g h2=%g h_opt=%g", h1, h2, h_opt)
    return BandwidthSelection(h1=h1, h2=h2, h_opt=h_opt, h1_scores=h1_scores, h2_scores=h2_scores)


def geometric_mean_bandwidth(h1: float, h2: float) -> float:
    return float(np.sqrt(h1 * h2))


def select_bandwidth(
    data: ObservationSet,
    grid: BandwidthGrid,
    h_mean: float,
    kernel: Kernel = DEFAULT_KERNEL,
    workers: int | None = None,
) -> float:
    return select_bandwidths(data, grid, h_mean, kernel, workers).h_opt

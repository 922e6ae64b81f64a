"""Time-varying covariance estimation from sparse, irregular observations.

The pipeline centres each observation with smoothed mean curves, forms the
rank-one raw covariance matrices and smooths them into a covariance curve
with one of four estimators: local constant (``nw``), entrywise local
linear (``ll``, possibly indefinite), local Frechet (``lf``, the local
linear smoother projected onto the PSD cone) and the square-root metric
d-covariance (``dcov``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain.errors import (
    DegenerateDiagonalError,
    InvalidObservationsError,
    NotACovarianceError,
)
from .estimation_options import Estimator, WeightOrder
from .kernel_smoothing import (
    DEFAULT_KERNEL,
    Kernel,
    ScalarCurve,
    resolve_smoothing_tuning,
    weight_matrix,
)
from .matrix_space import (
    SymMatrix,
    cov_to_corr_stack,
    is_psd_stack,
    project_psd,
    project_psd_stack,
    symmetrize_stack,
)


@dataclass(frozen=True, slots=True)
class ObservationSet:
    """``n`` pairs ``(X_i, Y_i)`` with ``X_i`` in ``[0, T]`` and ``Y_i`` in R^p."""

    times: np.ndarray
    responses: np.ndarray
    domain_end: float
    subject_ids: np.ndarray | None = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        responses = np.asarray(self.responses, dtype=np.float64)
        if responses.ndim == 1:
            responses = responses[:, np.newaxis]
        if times.ndim != 1 or responses.ndim != 2 or responses.shape[0] != times.shape[0]:
            raise InvalidObservationsError(
                f"Expected times (n,) and responses (n, p); got {times.shape} and {responses.shape}."
            )
        if times.shape[0] < 2:
            raise InvalidObservationsError("At least two observations are required.")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(responses)):
            raise InvalidObservationsError("Observations must not contain missing or infinite values.")
        if not self.domain_end > 0.0:
            raise InvalidObservationsError(f"domain_end must be positive, got {self.domain_end!r}.")
        out_of_range = (times < 0.0) | (times > self.domain_end)
        if np.any(out_of_range):
            bad = float(times[np.argmax(out_of_range)])
            raise InvalidObservationsError(
                f"Time {bad:g} lies outside [0, {self.domain_end:g}].", location=bad
            )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "responses", responses)
        object.__setattr__(self, "domain_end", float(self.domain_end))
        if self.subject_ids is not None:
            subject_ids = np.asarray(self.subject_ids)
            if subject_ids.shape != times.shape:
                raise InvalidObservationsError("subject_ids must align with times.")
            object.__setattr__(self, "subject_ids", subject_ids)

    @property
    def n(self) -> int:
        return int(self.times.shape[0])

    @property
    def p(self) -> int:
        return int(self.responses.shape[1])

    def subset(self, indices: np.ndarray) -> "ObservationSet":
        indices = np.asarray(indices)
        return ObservationSet(
            times=self.times[indices],
            responses=self.responses[indices],
            domain_end=self.domain_end,
            subject_ids=None if self.subject_ids is None else self.subject_ids[indices],
        )


@dataclass(frozen=True, slots=True)
class RawCovSet:
    """Rank-one raw covariances ``C_i = v_i v_i^T`` with ``v_i = Y_i - mu(X_i)``."""

    times: np.ndarray
    residuals: np.ndarray
    matrices: np.ndarray
    mean_curves: tuple[ScalarCurve, ...]

    @property
    def n(self) -> int:
        return int(self.times.shape[0])

    @property
    def p(self) -> int:
        return int(self.residuals.shape[1])

    def matrix(self, index: int) -> SymMatrix:
        return SymMatrix(self.matrices[index], psd_certified=True)

    def subset(self, indices: np.ndarray) -> "RawCovSet":
        indices = np.asarray(indices)
        return RawCovSet(
            times=self.times[indices],
            residuals=self.residuals[indices],
            matrices=self.matrices[indices],
            mean_curves=self.mean_curves,
        )


@dataclass(frozen=True, slots=True)
class MatrixCurve:
    """One symmetric matrix per grid point, stored as an ``(m, p, p)`` stack."""

    grid: np.ndarray
    matrices: np.ndarray
    estimator: Estimator
    bandwidth: float
    psd_flags: np.ndarray
    mean_bandwidth: float | None = None
    correlation: bool = False

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.float64)
        if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
            raise ValueError("Matrix curve grid must be strictly increasing.")
        matrices = np.asarray(self.matrices, dtype=np.float64)
        if matrices.ndim != 3 or matrices.shape[0] != grid.shape[0]:
            raise ValueError("Matrix curve needs one p x p matrix per grid point.")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "matrices", matrices)
        object.__setattr__(self, "psd_flags", np.asarray(self.psd_flags, dtype=bool))

    @property
    def p(self) -> int:
        return int(self.matrices.shape[1])

    def __len__(self) -> int:
        return int(self.grid.shape[0])

    def at(self, index: int) -> SymMatrix:
        return SymMatrix(self.matrices[index], psd_certified=bool(self.psd_flags[index]))


def mean_grid(data: ObservationSet, points: int | None = None) -> np.ndarray:
    """Dense grid over the hull of the observed times."""

    points = points or resolve_smoothing_tuning().mean_grid_points
    return np.linspace(float(data.times.min()), float(data.times.max()), points)


def estimate_means(
    data: ObservationSet,
    h_mean: float,
    grid: np.ndarray | None = None,
    kernel: Kernel = DEFAULT_KERNEL,
) -> tuple[ScalarCurve, ...]:
    """Componentwise local linear mean curves sharing one bandwidth."""

    grid = mean_grid(data) if grid is None else np.asarray(grid, dtype=np.float64)
    weights = weight_matrix(data.times, grid, h_mean, WeightOrder.LOCAL_LINEAR, kernel)
    smoothed = weights @ data.responses
    return tuple(ScalarCurve(grid=grid, values=smoothed[:, j]) for j in range(data.p))


def evaluate_means(means: tuple[ScalarCurve, ...], times: np.ndarray) -> np.ndarray:
    return np.column_stack([curve.at(times) for curve in means])


def raw_covariances(data: ObservationSet, means: tuple[ScalarCurve, ...]) -> RawCovSet:
    if len(means) != data.p:
        raise InvalidObservationsError(
            f"Expected {data.p} mean curves, got {len(means)}."
        )
    residuals = data.responses - evaluate_means(means, data.times)
    matrices = residuals[:, :, np.newaxis] * residuals[:, np.newaxis, :]
    return RawCovSet(
        times=data.times,
        residuals=residuals,
        matrices=matrices,
        mean_curves=tuple(means),
    )


def _weighted_stack(weights: np.ndarray, stack: np.ndarray) -> np.ndarray:
    n, p, _ = stack.shape
    return symmetrize_stack((weights @ stack.reshape(n, p * p)).reshape(-1, p, p))


def _sqrt_rank_one(residuals: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(residuals, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    roots = residuals[:, :, np.newaxis] * residuals[:, np.newaxis, :] / safe[:, np.newaxis, np.newaxis]
    return np.where((norms > 0.0)[:, np.newaxis, np.newaxis], roots, 0.0)


def covariance_stack(
    raw: RawCovSet,
    grid: np.ndarray,
    h: float,
    estimator: Estimator,
    kernel: Kernel = DEFAULT_KERNEL,
) -> np.ndarray:
    """Covariance estimates at every grid point as an ``(m, p, p)`` stack."""

    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if estimator is Estimator.NW:
        weights = weight_matrix(raw.times, grid, h, WeightOrder.NW, kernel)
        return _weighted_stack(weights, raw.matrices)

    weights = weight_matrix(raw.times, grid, h, WeightOrder.LOCAL_LINEAR, kernel)
    if estimator is Estimator.LOCAL_LINEAR_RAW:
        return _weighted_stack(weights, raw.matrices)
    if estimator is Estimator.LOCAL_FRECHET:
        return project_psd_stack(_weighted_stack(weights, raw.matrices))
    averaged_root = _weighted_stack(weights, _sqrt_rank_one(raw.residuals))
    return symmetrize_stack(averaged_root @ averaged_root)


def estimate_nw(raw: RawCovSet, x: float, h: float, kernel: Kernel = DEFAULT_KERNEL) -> SymMatrix:
    entries = covariance_stack(raw, np.array([x]), h, Estimator.NW, kernel)[0]
    return SymMatrix(entries, psd_certified=bool(is_psd_stack(entries)))


def estimate_ll_raw(raw: RawCovSet, x: float, h: float, kernel: Kernel = DEFAULT_KERNEL) -> SymMatrix:
    entries = covariance_stack(raw, np.array([x]), h, Estimator.LOCAL_LINEAR_RAW, kernel)[0]
    return SymMatrix(entries)


def estimate_lf(raw: RawCovSet, x: float, h: float, kernel: Kernel = DEFAULT_KERNEL) -> SymMatrix:
    return project_psd(estimate_ll_raw(raw, x, h, kernel))


def estimate_dcov_sqrt(raw: RawCovSet, x: float, h: float, kernel: Kernel = DEFAULT_KERNEL) -> SymMatrix:
    entries = covariance_stack(raw, np.array([x]), h, Estimator.DCOV_SQRT, kernel)[0]
    return SymMatrix(entries, psd_certified=True)


def curve_from_raw(
    raw: RawCovSet,
    grid: np.ndarray,
    h_cov: float,
    estimator: Estimator,
    *,
    h_mean: float | None = None,
    kernel: Kernel = DEFAULT_KERNEL,
) -> MatrixCurve:
    grid = np.asarray(grid, dtype=np.float64)
    stack = covariance_stack(raw, grid, h_cov, estimator, kernel)
    if estimator in (Estimator.LOCAL_FRECHET, Estimator.DCOV_SQRT):
        flags = np.ones(grid.shape[0], dtype=bool)
    else:
        flags = is_psd_stack(stack)
    return MatrixCurve(
        grid=grid,
        matrices=stack,
        estimator=estimator,
        bandwidth=float(h_cov),
        psd_flags=flags,
        mean_bandwidth=None if h_mean is None else float(h_mean),
    )


def estimate_curve(
    data: ObservationSet,
    grid: np.ndarray,
    h_mean: float,
    h_cov: float,
    estimator: Estimator,
    kernel: Kernel = DEFAULT_KERNEL,
) -> MatrixCurve:
    """Means, raw covariances and the chosen estimator on ``grid``."""

    means = estimate_means(data, h_mean, kernel=kernel)
    raw = raw_covariances(data, means)
    return curve_from_raw(raw, grid, h_cov, estimator, h_mean=h_mean, kernel=kernel)


def one_observation_per_subject(data: ObservationSet, seed: int) -> ObservationSet:
    """Keep one uniformly chosen observation per subject."""

    if data.subject_ids is None:
        return data
    rng = np.random.default_rng(seed)
    _, inverse = np.unique(data.subject_ids, return_inverse=True)
    chosen = []
    for group in range(int(inverse.max()) + 1):
        members = np.flatnonzero(inverse == group)
        chosen.append(int(rng.choice(members)))
    return data.subset(np.sort(np.asarray(chosen)))


def correlation_curve(curve: MatrixCurve) -> MatrixCurve:
    """Pointwise correlation matrices of a covariance curve."""

    if curve.correlation:
        return curve
    corr = np.empty_like(curve.matrices)
    for index, x in enumerate(curve.grid):
        try:
            corr[index] = cov_to_corr_stack(curve.matrices[index])
        except (DegenerateDiagonalError, NotACovarianceError) as exc:
            raise type(exc)(f"{exc} (grid point x={x:g})", location=float(x)) from exc
    return MatrixCurve(
        grid=curve.grid,
        matrices=corr,
        estimator=curve.estimator,
        bandwidth=curve.bandwidth,
        psd_flags=curve.psd_flags,
        mean_bandwidth=curve.mean_bandwidth,
        correlation=True,
    )

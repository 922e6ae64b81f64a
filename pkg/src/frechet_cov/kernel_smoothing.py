"""Kernel weights and scalar curve smoothing.

Weights follow the local constant (Nadaraya-Watson) and local linear forms.
Local linear weights are normalized to sum to one, so both orders can be
used interchangeably as weights of a Frechet objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain.errors import ConfigError, DegenerateWindowError, MeanNotEvaluableError
from .estimation_options import KernelKind, WeightOrder


@dataclass(frozen=True, slots=True)
class SmoothingTuning:
    """Tunable constants for the scalar smoothers."""

    kernel: KernelKind
    mean_grid_points: int
    sigma_rel_tol: float
    candidate_count: int


SMOOTHING_TUNINGS: dict[str, SmoothingTuning] = {
    "default": SmoothingTuning(
        kernel=KernelKind.EPANECHNIKOV,
        mean_grid_points=501,
        sigma_rel_tol=1e-12,
        candidate_count=10,
    ),
}


def resolve_smoothing_tuning(profile: str = "default") -> SmoothingTuning:
    try:
        return SMOOTHING_TUNINGS[profile]
    except KeyError as exc:
        allowed = ", ".join(sorted(SMOOTHING_TUNINGS))
        raise ConfigError(
            f"Unknown smoothing profile '{profile}'. Allowed: {allowed}."
        ) from exc


@dataclass(frozen=True, slots=True)
class Kernel:
    """Symmetric probability density supported on [-1, 1]."""

    kind: KernelKind = KernelKind.EPANECHNIKOV

    def __call__(self, u: np.ndarray | float) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        inside = np.abs(u) <= 1.0
        if self.kind is KernelKind.EPANECHNIKOV:
            values = 0.75 * (1.0 - np.square(u))
        elif self.kind is KernelKind.UNIFORM:
            values = np.full_like(u, 0.5)
        else:
            values = 1.0 - np.abs(u)
        return np.where(inside, values, 0.0)


DEFAULT_KERNEL = Kernel(resolve_smoothing_tuning().kernel)


@dataclass(frozen=True, slots=True)
class LocalWeights:
    """Per-observation weights at one query time."""

    weights: np.ndarray
    query_time: float
    bandwidth: float
    order: WeightOrder


@dataclass(frozen=True, slots=True)
class ScalarCurve:
    """A scalar function discretized on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if grid.ndim != 1 or values.shape != grid.shape:
            raise ValueError("Curve grid and values must be 1D arrays of equal length.")
        if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
            raise ValueError("Curve grid must be strictly increasing.")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def at(self, times: np.ndarray | float) -> np.ndarray:
        """Linear interpolation inside the grid hull; raises outside of it."""

        times = np.asarray(times, dtype=np.float64)
        outside = (times < self.grid[0]) | (times > self.grid[-1])
        if np.any(outside):
            first = float(np.atleast_1d(times)[np.atleast_1d(outside)][0])
            raise MeanNotEvaluableError(
                f"Time {first:g} lies outside the curve grid "
                f"[{self.grid[0]:g}, {self.grid[-1]:g}].",
                location=first,
            )
        return np.interp(times, self.grid, self.values)


def kernel_eval(kernel: Kernel, u: float) -> float:
    return float(kernel(u))


def _window_moments(
    times: np.ndarray,
    grid: np.ndarray,
    h: float,
    kernel: Kernel,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not h > 0.0:
        raise ConfigError(f"Bandwidth must be positive, got {h!r}.")
    times = np.asarray(times, dtype=np.float64)
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    offsets = times[np.newaxis, :] - grid[:, np.newaxis]
    return grid, offsets, kernel(offsets / h)


def _degenerate_rows(order: WeightOrder, offsets: np.ndarray, k: np.ndarray) -> np.ndarray:
    counts = (k > 0.0).sum(axis=1)
    if order is WeightOrder.NW:
        return counts < 1
    s0 = k.sum(axis=1)
    s1 = (k * offsets).sum(axis=1)
    s2 = (k * np.square(offsets)).sum(axis=1)
    sigma2 = s0 * s2 - np.square(s1)
    tolerance = resolve_smoothing_tuning().sigma_rel_tol
    return (counts < 2) | (sigma2 <= tolerance * s0 * s2)


def window_validity(
    times: np.ndarray,
    grid: np.ndarray,
    h: float,
    order: WeightOrder,
    kernel: Kernel = DEFAULT_KERNEL,
) -> np.ndarray:
    """Boolean mask of grid points whose kernel window supports ``order``."""

    _, offsets, k = _window_moments(times, grid, h, kernel)
    return ~_degenerate_rows(order, offsets, k)


def weight_matrix(
    times: np.ndarray,
    grid: np.ndarray,
    h: float,
    order: WeightOrder,
    kernel: Kernel = DEFAULT_KERNEL,
) -> np.ndarray:
    """Smoothing weights for every grid point, one row per grid point.

    Rows sum to one. Entries for observations farther than ``h`` from the
    grid point are exactly zero.
    """

    grid, offsets, k = _window_moments(times, grid, h, kernel)
    degenerate = _degenerate_rows(order, offsets, k)
    if np.any(degenerate):
        x = float(grid[np.argmax(degenerate)])
        if order is WeightOrder.NW:
            message = f"No observations within h={h:g} of x={x:g}."
        else:
            message = f"Fewer than two distinct observation times within h={h:g} of x={x:g}."
        raise DegenerateWindowError(message, location=x)

    if order is WeightOrder.NW:
        return k / k.sum(axis=1, keepdims=True)
    s1 = (k * offsets).sum(axis=1)
    s2 = (k * np.square(offsets)).sum(axis=1)
    raw = k * (s2[:, np.newaxis] - s1[:, np.newaxis] * offsets)
    return raw / raw.sum(axis=1, keepdims=True)


def local_weights(
    times: np.ndarray,
    x: float,
    h: float,
    order: WeightOrder,
    kernel: Kernel = DEFAULT_KERNEL,
) -> LocalWeights:
    weights = weight_matrix(times, np.array([x]), h, order, kernel)[0]
    return LocalWeights(weights=weights, query_time=float(x), bandwidth=float(h), order=order)


def smooth_scalar(
    times: np.ndarray,
    responses: np.ndarray,
    grid: np.ndarray,
    h: float,
    order: WeightOrder = WeightOrder.LOCAL_LINEAR,
    kernel: Kernel = DEFAULT_KERNEL,
) -> ScalarCurve:
    times = np.asarray(times, dtype=np.float64)
    responses = np.asarray(responses, dtype=np.float64)
    if times.shape != responses.shape:
        raise ValueError("times and responses must have the same length.")
    grid = np.asarray(grid, dtype=np.float64)
    weights = weight_matrix(times, grid, h, order, kernel)
    return ScalarCurve(grid=grid, values=weights @ responses)


def loo_cv_score(
    times: np.ndarray,
    responses: np.ndarray,
    h: float,
    kernel: Kernel = DEFAULT_KERNEL,
) -> float:
    """Leave-one-out squared prediction error of the local linear smoother.

    Uses the deleted-residual identity ``e_i / (1 - H_ii)``, exact for every
    local weighted least-squares fit. ``responses`` may be ``(n,)`` or
    ``(n, q)``; errors are pooled over columns.
    """

    times = np.asarray(times, dtype=np.float64)
    responses = np.asarray(responses, dtype=np.float64)
    if responses.ndim == 1:
        responses = responses[:, np.newaxis]
    hat = weight_matrix(times, times, h, WeightOrder.LOCAL_LINEAR, kernel)
    leverage = np.diag(hat)
    if np.any(leverage >= 1.0 - 1e-10):
        x = float(times[np.argmax(leverage >= 1.0 - 1e-10)])
        raise DegenerateWindowError(
            f"Observation at x={x:g} is alone in its window for h={h:g}.", location=x
        )
    residuals = (responses - hat @ responses) / (1.0 - leverage)[:, np.newaxis]
    return float(np.sum(np.square(residuals)))


def default_bandwidth_candidates(
    times: np.ndarray,
    domain_end: float,
    count: int | None = None,
) -> np.ndarray:
    """Log-spaced bandwidths from twice the largest design gap to T/2."""

    count = count or resolve_smoothing_tuning().candidate_count
    ordered = np.sort(np.unique(np.asarray(times, dtype=np.float64)))
    if ordered.size < 2:
        raise DegenerateWindowError("At least two distinct observation times are required.")
    upper = 0.5 * float(domain_end)
    lower = min(2.0 * float(np.max(np.diff(ordered))), upper)
    if count == 1 or np.isclose(lower, upper):
        return np.array([upper])
    return np.geomspace(lower, upper, count)

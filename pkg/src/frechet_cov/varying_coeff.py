"""Varying-coefficient regression of a scalar outcome on the observed process.

The model ``E_i = beta_0 + beta(X_i)^T (Y_i - mu(X_i)) + eps_i`` is solved
pointwise as ``beta(x) = [Sigma(x) + lambda I]^{-1} Gamma(x)``, where
``Gamma`` is the smoothed cross-covariance between the centred process and
the centred outcome.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np
import scipy.linalg

from .bandwidth_selection import fold_partition, select_minimizer
from .domain.errors import (
    AllCandidatesDegenerateError,
    ConfigError,
    DegenerateWindowError,
    InvalidObservationsError,
    SingularSystemError,
)
from .dyn_cov import (
    MatrixCurve,
    ObservationSet,
    covariance_stack,
    curve_from_raw,
    estimate_means,
    evaluate_means,
    raw_covariances,
)
from .estimation_options import Estimator, WeightOrder
from .kernel_smoothing import (
    DEFAULT_KERNEL,
    Kernel,
    ScalarCurve,
    weight_matrix,
    window_validity,
)
from .matrix_space import SymMatrix

logger = logging.getLogger(__name__)

SINGULAR_REL_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class RidgeTuning:
    lambda_min: float
    lambda_max: float
    lambda_count: int
    folds: int
    baseline: float

    def candidates(self) -> np.ndarray:
        return np.geomspace(self.lambda_min, self.lambda_max, self.lambda_count)


RIDGE_TUNINGS: dict[str, RidgeTuning] = {
    "default": RidgeTuning(
        lambda_min=1e-4,
        lambda_max=10.0,
        lambda_count=20,
        folds=5,
        baseline=100.0,
    ),
}


def resolve_ridge_tuning(profile: str = "default") -> RidgeTuning:
    try:
        return RIDGE_TUNINGS[profile]
    except KeyError as exc:
        allowed = ", ".join(sorted(RIDGE_TUNINGS))
        raise ConfigError(f"Unknown ridge profile '{profile}'. Allowed: {allowed}.") from exc


@dataclass(frozen=True, slots=True)
class OutcomeSet:
    """Scalar outcomes aligned row by row with an ``ObservationSet``."""

    scores: np.ndarray
    baseline: float = RIDGE_TUNINGS["default"].baseline

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1 or not np.all(np.isfinite(scores)):
            raise InvalidObservationsError("Outcome scores must be a finite 1D vector.")
        object.__setattr__(self, "scores", scores)

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])

    def check_aligned(self, data: ObservationSet) -> None:
        if self.n != data.n:
            raise InvalidObservationsError(
                f"Outcome count {self.n} does not match observation count {data.n}."
            )

    def centred(self) -> np.ndarray:
        return self.scores - self.baseline

    def with_baseline(self, baseline: float) -> "OutcomeSet":
        return OutcomeSet(scores=self.scores, baseline=float(baseline))


@dataclass(frozen=True, slots=True)
class VcmConfig:
    grid: np.ndarray
    h_mean: float
    h_cov: float
    h_gamma: float | None = None
    ridge_lambda: float | None = None
    lambda_candidates: np.ndarray | None = None
    folds: int = RIDGE_TUNINGS["default"].folds
    seed: int = 0
    estimate_baseline: bool = False

    def resolved_h_gamma(self) -> float:
        return self.h_cov if self.h_gamma is None else self.h_gamma

    def resolved_candidates(self) -> np.ndarray:
        if self.lambda_candidates is None:
            return resolve_ridge_tuning().candidates()
        return np.asarray(self.lambda_candidates, dtype=np.float64)


@dataclass(frozen=True, slots=True)
class VcmFit:
    grid: np.ndarray
    gamma: tuple[ScalarCurve, ...]
    beta: tuple[ScalarCurve, ...]
    r_squared: ScalarCurve
    ridge_lambda: float
    bandwidths: tuple[float, float, float]
    baseline: float
    covariance: MatrixCurve


def _cross_products(
    data: ObservationSet,
    outcomes: OutcomeSet,
    means: tuple[ScalarCurve, ...],
) -> np.ndarray:
    residuals = data.responses - evaluate_means(means, data.times)
    return residuals * outcomes.centred()[:, np.newaxis]


def estimate_gamma(
    data: ObservationSet,
    outcomes: OutcomeSet,
    means: tuple[ScalarCurve, ...],
    grid: np.ndarray,
    h_gamma: float,
    kernel: Kernel = DEFAULT_KERNEL,
) -> tuple[ScalarCurve, ...]:
    """Local linear smooths of ``G_ij = (Y_ij - mu_j(X_i)) (E_i - beta_0)``."""

    outcomes.check_aligned(data)
    grid = np.asarray(grid, dtype=np.float64)
    products = _cross_products(data, outcomes, means)
    smoothed = weight_matrix(data.times, grid, h_gamma, WeightOrder.LOCAL_LINEAR, kernel) @ products
    return tuple(ScalarCurve(grid=grid, values=smoothed[:, j]) for j in range(data.p))


def _check_ridge(sigma: np.ndarray, ridge_lambda: float) -> None:
    if ridge_lambda < 0.0:
        raise ConfigError(f"Ridge parameter must be nonnegative, got {ridge_lambda!r}.")
    if ridge_lambda == 0.0:
        eigvals = np.linalg.eigvalsh(sigma)
        if eigvals[..., 0].min() <= SINGULAR_REL_TOL * max(float(np.abs(eigvals).max()), 1e-300):
            raise SingularSystemError(
                "Covariance is rank deficient; a positive ridge parameter is required."
            )


def estimate_beta(sigma: SymMatrix, gamma: np.ndarray, ridge_lambda: float) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=np.float64)
    _check_ridge(sigma.entries, ridge_lambda)
    system = sigma.entries + ridge_lambda * np.eye(sigma.dim)
    try:
        return scipy.linalg.solve(system, gamma, assume_a="pos")
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystemError(f"Ridge system could not be solved: {exc}") from exc


def estimate_r2(sigma: SymMatrix, gamma: np.ndarray, ridge_lambda: float) -> float:
    gamma = np.asarray(gamma, dtype=np.float64)
    return float(gamma @ estimate_beta(sigma, gamma, ridge_lambda))


def ridge_solutions(sigma: np.ndarray, gamma: np.ndarray, ridge_lambda: float) -> np.ndarray:
    """Batched ``[Sigma + lambda I]^{-1} Gamma`` for ``(m, p, p)`` and ``(m, p)`` inputs."""

    _check_ridge(sigma, ridge_lambda)
    eigvals, eigvecs = np.linalg.eigh(sigma)
    coords = np.einsum("mji,mj->mi", eigvecs, gamma)
    return np.einsum("mij,mj->mi", eigvecs, coords / (eigvals + ridge_lambda))


def select_lambda(
    data: ObservationSet,
    outcomes: OutcomeSet,
    candidates: np.ndarray,
    folds: int,
    *,
    h_mean: float,
    h_cov: float,
    h_gamma: float | None = None,
    seed: int = 0,
    kernel: Kernel = DEFAULT_KERNEL,
) -> float:
    """Ridge parameter minimizing k-fold held-out squared outcome error.

    Mean curves, covariance and cross-covariance are all re-estimated on
    each training fold, and the held-out observations are centred with the
    training means. Held-out points outside the training hull or with a
    degenerate window are skipped for every candidate, as are folds whose
    training means cannot be smoothed.
    """

    outcomes.check_aligned(data)
    candidates = np.atleast_1d(np.asarray(candidates, dtype=np.float64))
    if np.any(candidates <= 0.0):
        raise ConfigError("Ridge candidates must be positive.")
    h_gamma = h_cov if h_gamma is None else h_gamma

    centred = outcomes.centred()
    errors = np.zeros(candidates.shape[0])
    used = 0
    for fold in fold_partition(data.n, folds, seed):
        train = np.setdiff1d(np.arange(data.n), fold)
        train_data = data.subset(train)
        try:
            train_means = estimate_means(train_data, h_mean, kernel=kernel)
        except DegenerateWindowError as exc:
            logger.debug("Skipping ridge fold: %s", exc)
            continue
        test_times = data.times[fold]
        hull = train_means[0].grid
        valid = (test_times >= hull[0]) & (test_times <= hull[-1])
        valid &= window_validity(train_data.times, test_times, h_cov, WeightOrder.LOCAL_LINEAR, kernel)
        valid &= window_validity(train_data.times, test_times, h_gamma, WeightOrder.LOCAL_LINEAR, kernel)
        if not np.any(valid):
            continue
        held_out = fold[valid]
        held_out_times = data.times[held_out]
        train_outcomes = OutcomeSet(scores=outcomes.scores[train], baseline=outcomes.baseline)

        sigma = covariance_stack(
            raw_covariances(train_data, train_means), held_out_times, h_cov, Estimator.LOCAL_FRECHET, kernel
        )
        gamma = weight_matrix(
            train_data.times, held_out_times, h_gamma, WeightOrder.LOCAL_LINEAR, kernel
        ) @ _cross_products(train_data, train_outcomes, train_means)
        residuals = data.responses[held_out] - evaluate_means(train_means, held_out_times)

        eigvals, eigvecs = np.linalg.eigh(sigma)
        gamma_coords = np.einsum("mji,mj->mi", eigvecs, gamma)
        residual_coords = np.einsum("mji,mj->mi", eigvecs, residuals)
        for index, ridge_lambda in enumerate(candidates):
            fitted = np.sum(gamma_coords * residual_coords / (eigvals + ridge_lambda), axis=1)
            errors[index] += float(np.sum(np.square(centred[held_out] - fitted)))
        used += held_out.size

    if used == 0:
        raise AllCandidatesDegenerateError(
            "No held-out observation has a valid smoothing window for ridge selection."
        )
    logger.debug("Ridge selection used %d of %d held-out observations.", used, data.n)
    return select_minimizer(candidates, errors, 1e-12 * float(np.sum(np.square(centred))))


def fit_vcm(data: ObservationSet, outcomes: OutcomeSet, config: VcmConfig) -> VcmFit:
    outcomes.check_aligned(data)
    if config.estimate_baseline:
        outcomes = outcomes.with_baseline(float(outcomes.scores.mean()))
    grid = np.asarray(config.grid, dtype=np.float64)
    h_gamma = config.resolved_h_gamma()

    means = estimate_means(data, config.h_mean)
    raw = raw_covariances(data, means)
    cov_curve = curve_from_raw(raw, grid, config.h_cov, Estimator.LOCAL_FRECHET, h_mean=config.h_mean)
    gamma_curves = estimate_gamma(data, outcomes, means, grid, h_gamma)

    ridge_lambda = config.ridge_lambda
    if ridge_lambda is None:
        ridge_lambda = select_lambda(
            data,
            outcomes,
            config.resolved_candidates(),
            config.folds,
            h_mean=config.h_mean,
            h_cov=config.h_cov,
            h_gamma=h_gamma,
            seed=config.seed,
        )

    gamma = np.column_stack([curve.values for curve in gamma_curves])
    beta = ridge_solutions(cov_curve.matrices, gamma, ridge_lambda)
    r_squared = np.sum(gamma * beta, axis=1)
    return VcmFit(
        grid=grid,
        gamma=gamma_curves,
        beta=tuple(ScalarCurve(grid=grid, values=beta[:, j]) for j in range(data.p)),
        r_squared=ScalarCurve(grid=grid, values=r_squared),
        ridge_lambda=float(ridge_lambda),
        bandwidths=(float(config.h_mean), float(config.h_cov), float(h_gamma)),
        baseline=float(outcomes.baseline),
        covariance=cov_curve,
    )

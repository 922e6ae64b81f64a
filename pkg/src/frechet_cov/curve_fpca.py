"""Descriptive functional PCA over scalar curves sharing one grid."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .domain.errors import ConfigError, InvalidObservationsError, RankDeficientError
from .dyn_cov import MatrixCurve, correlation_curve
from .kernel_smoothing import ScalarCurve

POSITIVE_EIG_RTOL = 1e-12


@dataclass(frozen=True, slots=True)
class CurveCollection:
    grid: np.ndarray
    curves: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.float64)
        curves = np.asarray(self.curves, dtype=np.float64)
        if grid.ndim != 1 or curves.ndim != 2 or curves.shape[1] != grid.shape[0]:
            raise InvalidObservationsError(
                f"Curves must be (N, {grid.shape[0]}) on the grid, got {curves.shape}."
            )
        if curves.shape[0] < 2:
            raise InvalidObservationsError("FPCA needs at least two curves.")
        if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
            raise InvalidObservationsError("Curve grid must be strictly increasing.")
        if not np.all(np.isfinite(curves)):
            raise InvalidObservationsError("Curves must not contain missing values.")
        labels = tuple(self.labels) or tuple(str(index) for index in range(curves.shape[0]))
        if len(labels) != curves.shape[0]:
            raise InvalidObservationsError("Need exactly one label per curve.")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return int(self.curves.shape[0])


@dataclass(frozen=True, slots=True)
class FpcaResult:
    mean_curve: ScalarCurve
    eigenfunctions: tuple[ScalarCurve, ...]
    eigenvalues: np.ndarray
    fve: np.ndarray
    scores: np.ndarray
    labels: tuple[str, ...]
    total_variance: float


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Quadrature weights with ``weights @ f`` equal to the trapezoidal integral of ``f``."""

    grid = np.asarray(grid, dtype=np.float64)
    if grid.size < 2:
        raise ConfigError("Quadrature needs at least two grid points.")
    steps = np.diff(grid)
    weights = np.zeros_like(grid)
    weights[:-1] += 0.5 * steps
    weights[1:] += 0.5 * steps
    return weights


def fpca(collection: CurveCollection, num_components: int) -> FpcaResult:
    """Eigen-decomposition of the quadrature-weighted sample covariance.

    Eigenfunctions are orthonormal under the trapezoidal inner product and
    signed so that their integral is nonnegative. The covariance divisor is
    the number of curves.
    """

    limit = min(collection.size - 1, collection.grid.shape[0])
    if not 1 <= num_components <= limit:
        raise ConfigError(f"num_components must lie in [1, {limit}], got {num_components}.")

    weights = trapezoid_weights(collection.grid)
    root_weights = np.sqrt(weights)
    mean = collection.curves.mean(axis=0)
    centred = collection.curves - mean
    covariance = centred.T @ centred / collection.size
    weighted = root_weights[:, np.newaxis] * covariance * root_weights[np.newaxis, :]

    eigvals, eigvecs = scipy.linalg.eigh(weighted)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    scale = max(float(eigvals[0]), 0.0)
    positive = eigvals > POSITIVE_EIG_RTOL * scale if scale > 0.0 else np.zeros_like(eigvals, dtype=bool)
    if int(positive.sum()) < num_components:
        raise RankDeficientError(
            f"Only {int(positive.sum())} positive eigenvalues; {num_components} components requested."
        )

    functions = eigvecs[:, :num_components] / root_weights[:, np.newaxis]
    signs = np.where(weights @ functions < 0.0, -1.0, 1.0)
    functions = functions * signs
    scores = centred @ (weights[:, np.newaxis] * functions)
    total = float(eigvals[positive].sum())
    retained = eigvals[:num_components]
    return FpcaResult(
        mean_curve=ScalarCurve(grid=collection.grid, values=mean),
        eigenfunctions=tuple(
            ScalarCurve(grid=collection.grid, values=functions[:, k]) for k in range(num_components)
        ),
        eigenvalues=retained,
        fve=retained / total,
        scores=scores,
        labels=collection.labels,
        total_variance=total,
    )


def pointwise_band(
    collection: CurveCollection,
    probs: Sequence[float] = (0.25, 0.5, 0.75),
) -> tuple[ScalarCurve, ...]:
    probs_arr = np.asarray(probs, dtype=np.float64)
    if probs_arr.size == 0 or np.any((probs_arr <= 0.0) | (probs_arr >= 1.0)):
        raise ConfigError("Quantile levels must lie strictly between 0 and 1.")
    quantiles = np.quantile(collection.curves, probs_arr, axis=0)
    return tuple(ScalarCurve(grid=collection.grid, values=row) for row in quantiles)


def correlation_collection(curve: MatrixCurve) -> CurveCollection:
    """Upper-triangle correlation curves labelled ``"j-k"`` (1-based)."""

    corr = correlation_curve(curve)
    rows, cols = np.triu_indices(corr.p, k=1)
    if rows.size < 2:
        raise InvalidObservationsError("Need at least three components for a correlation collection.")
    return CurveCollection(
        grid=corr.grid,
        curves=corr.matrices[:, rows, cols].T,
        labels=tuple(f"{j + 1}-{k + 1}" for j, k in zip(rows, cols)),
    )

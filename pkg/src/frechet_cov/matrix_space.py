"""Operations on symmetric matrices under the Frobenius metric.

Symmetry is structural: every ``SymMatrix`` is built by mirroring its upper
triangle, so ``entries[j, k] == entries[k, j]`` holds bit-for-bit. The
``*_stack`` functions work on ``(m, p, p)`` arrays and back the single-matrix
operations.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .domain.errors import (
    ConfigError,
    DegenerateDiagonalError,
    DimMismatchError,
    EigFailureError,
    NotACovarianceError,
    NotPositiveSemidefiniteError,
)

PSD_REL_TOL = 1e-10
PINV_RTOL = 1e-8
DIAG_FLOOR = 1e-12
CORR_CLAMP_TOL = 1e-10


def symmetrize_stack(stack: np.ndarray) -> np.ndarray:
    """Mirror the upper triangle of each matrix onto its lower triangle."""

    stack = np.asarray(stack, dtype=np.float64)
    upper = np.triu(stack)
    return upper + np.swapaxes(np.triu(stack, 1), -1, -2)


def _eigh_stack(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(stack)
    except np.linalg.LinAlgError as exc:
        raise EigFailureError(f"Symmetric eigensolver did not converge: {exc}") from exc


def _spectral_map(stack: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    eigvals, eigvecs = _eigh_stack(stack)
    mapped = (eigvecs * fn(eigvals)[..., np.newaxis, :]) @ np.swapaxes(eigvecs, -1, -2)
    return symmetrize_stack(mapped)


def is_psd_stack(stack: np.ndarray, rel_tol: float = PSD_REL_TOL) -> np.ndarray:
    eigvals, _ = _eigh_stack(stack)
    scale = np.max(np.abs(eigvals), axis=-1)
    return eigvals[..., 0] >= -rel_tol * scale


def project_psd_stack(stack: np.ndarray) -> np.ndarray:
    """Nearest PSD matrices in Frobenius norm (negative eigenvalues set to 0)."""

    return _spectral_map(stack, lambda eigvals: np.maximum(eigvals, 0.0))


@dataclass(frozen=True, slots=True)
class SymMatrix:
    """Dense symmetric ``p x p`` matrix with an explicit PSD certificate."""

    entries: np.ndarray
    psd_certified: bool = False

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimMismatchError(f"Expected a square matrix, got shape {entries.shape}.")
        entries = symmetrize_stack(entries)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def certified(cls, entries: np.ndarray) -> "SymMatrix":
        """Build a matrix and certify it as PSD, raising when it is not."""

        matrix = cls(entries)
        if not bool(is_psd_stack(matrix.entries)):
            raise NotPositiveSemidefiniteError(
                "Matrix has eigenvalues below the PSD tolerance."
            )
        return cls(matrix.entries, psd_certified=True)

    @classmethod
    def identity(cls, p: int) -> "SymMatrix":
        return cls(np.eye(p), psd_certified=True)


@dataclass(frozen=True, slots=True)
class CorrMatrix:
    """Correlation matrix: unit diagonal, entries in [-1, 1]."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


def frobenius_dist(a: SymMatrix, b: SymMatrix) -> float:
    if a.dim != b.dim:
        raise DimMismatchError(f"Cannot compare {a.dim}x{a.dim} with {b.dim}x{b.dim}.")
    return float(np.linalg.norm(a.entries - b.entries))


def project_psd(s: SymMatrix) -> SymMatrix:
    return SymMatrix(project_psd_stack(s.entries), psd_certified=True)


def sqrt_psd_stack(stack: np.ndarray) -> np.ndarray:
    """Principal square roots; negative eigenvalues are clamped to 0 first."""

    return _spectral_map(stack, lambda eigvals: np.sqrt(np.maximum(eigvals, 0.0)))


def matrix_exp_stack(stack: np.ndarray) -> np.ndarray:
    return _spectral_map(stack, np.exp)


def sqrt_psd(s: SymMatrix) -> SymMatrix:
    if not s.psd_certified:
        s = SymMatrix.certified(s.entries)
    return SymMatrix(sqrt_psd_stack(s.entries), psd_certified=True)


def matrix_exp(s: SymMatrix) -> SymMatrix:
    return SymMatrix(matrix_exp_stack(s.entries), psd_certified=True)


def pseudo_inverse(s: SymMatrix, rtol: float = PINV_RTOL) -> SymMatrix:
    if not rtol > 0.0:
        raise ConfigError(f"Pseudo-inverse rtol must be positive, got {rtol!r}.")
    return SymMatrix(pseudo_inverse_stack(s.entries, rtol))


def pseudo_inverse_stack(stack: np.ndarray, rtol: float = PINV_RTOL) -> np.ndarray:
    eigvals, eigvecs = _eigh_stack(stack)
    cutoff = rtol * np.max(np.abs(eigvals), axis=-1, keepdims=True)
    keep = np.abs(eigvals) > cutoff
    inverted = np.where(keep, 1.0 / np.where(keep, eigvals, 1.0), 0.0)
    mapped = (eigvecs * inverted[..., np.newaxis, :]) @ np.swapaxes(eigvecs, -1, -2)
    return symmetrize_stack(mapped)


def cov_to_corr(s: SymMatrix, diag_floor: float = DIAG_FLOOR) -> CorrMatrix:
    return CorrMatrix(cov_to_corr_stack(s.entries, diag_floor))


def cov_to_corr_stack(stack: np.ndarray, diag_floor: float = DIAG_FLOOR) -> np.ndarray:
    stack = np.asarray(stack, dtype=np.float64)
    diag = np.diagonal(stack, axis1=-2, axis2=-1)
    if np.any(diag <= diag_floor):
        raise DegenerateDiagonalError(
            f"Variance at or below {diag_floor:g} prevents correlation scaling."
        )
    scale = np.sqrt(diag)
    corr = stack / (scale[..., :, np.newaxis] * scale[..., np.newaxis, :])
    if np.any(np.abs(corr) > 1.0 + CORR_CLAMP_TOL):
        raise NotACovarianceError(
            "Scaled entries exceed 1 in magnitude; input is not a covariance matrix."
        )
    corr = symmetrize_stack(np.clip(corr, -1.0, 1.0))
    idx = np.arange(corr.shape[-1])
    corr[..., idx, idx] = 1.0
    return corr

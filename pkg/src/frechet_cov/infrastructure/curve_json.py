"""JSON codec for matrix curves, varying-coefficient fits and FPCA summaries.

Every document carries ``schema_version`` and ``kind``; readers reject
unknown keys. Matrices are stored row-major, one flat list per grid point.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
import json
from pathlib import Path
from typing import Any

import numpy as np

from frechet_cov.curve_fpca import CurveCollection, FpcaResult, correlation_collection
from frechet_cov.domain.errors import DataFormatError
from frechet_cov.dyn_cov import MatrixCurve
from frechet_cov.estimation_options import Estimator
from frechet_cov.infrastructure.result_tables import read_curve_csv
from frechet_cov.kernel_smoothing import ScalarCurve
from frechet_cov.sim_engine import SimConfig, true_beta, true_cov_stack, true_mean
from frechet_cov.varying_coeff import VcmFit

SCHEMA_VERSION = 1
MATRIX_CURVE_KIND = "matrix_curve"
MATRIX_CURVE_KEYS = frozenset(
    {
        "schema_version",
        "kind",
        "estimator",
        "bandwidth",
        "mean_bandwidth",
        "correlation",
        "dimension",
        "grid",
        "matrices",
        "psd_flags",
        "manifest",
    }
)


def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> dict[str, Any]:
    if not path.is_file():
        raise DataFormatError(f"Input file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}.", location=float(exc.lineno)) from exc
    if not isinstance(payload, dict):
        raise DataFormatError(f"{path}: top-level JSON value must be an object.")
    return payload


def check_keys(payload: Mapping[str, Any], allowed: frozenset[str], where: str) -> None:
    unknown = sorted(set(payload) - allowed)
    if unknown:
        raise DataFormatError(
            f"Unknown field '{unknown[0]}' in {where}. Allowed fields: {', '.join(sorted(allowed))}."
        )
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataFormatError(f"{where} has schema_version {version!r}; expected {SCHEMA_VERSION}.")


def _curve_values(curves: Sequence[ScalarCurve]) -> list[list[float]]:
    return [curve.values.tolist() for curve in curves]


def matrix_curve_to_dict(curve: MatrixCurve, manifest: str | None = None) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": MATRIX_CURVE_KIND,
        "estimator": curve.estimator.value,
        "bandwidth": curve.bandwidth,
        "mean_bandwidth": curve.mean_bandwidth,
        "correlation": curve.correlation,
        "dimension": curve.p,
        "grid": curve.grid.tolist(),
        "matrices": curve.matrices.reshape(len(curve), -1).tolist(),
        "psd_flags": [bool(flag) for flag in curve.psd_flags],
        "manifest": manifest,
    }


def matrix_curve_from_dict(payload: Mapping[str, Any]) -> MatrixCurve:
    check_keys(payload, MATRIX_CURVE_KEYS, "matrix curve")
    if payload.get("kind") != MATRIX_CURVE_KIND:
        raise DataFormatError(f"Expected kind '{MATRIX_CURVE_KIND}', got {payload.get('kind')!r}.")
    try:
        p = int(payload["dimension"])
        grid = np.asarray(payload["grid"], dtype=np.float64)
        flat = np.asarray(payload["matrices"], dtype=np.float64)
        estimator = Estimator(payload["estimator"])
        bandwidth = float(payload["bandwidth"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"Malformed matrix curve: {exc}.") from exc
    if flat.shape != (grid.shape[0], p * p):
        raise DataFormatError(
            f"Matrix curve needs {grid.shape[0]} rows of {p * p} entries, got shape {flat.shape}."
        )
    mean_bandwidth = payload.get("mean_bandwidth")
    return MatrixCurve(
        grid=grid,
        matrices=flat.reshape(-1, p, p),
        estimator=estimator,
        bandwidth=bandwidth,
        psd_flags=np.asarray(payload.get("psd_flags", [False] * grid.shape[0]), dtype=bool),
        mean_bandwidth=None if mean_bandwidth is None else float(mean_bandwidth),
        correlation=bool(payload.get("correlation", False)),
    )


def vcm_fit_to_dict(fit: VcmFit, manifest: str | None = None) -> dict[str, Any]:
    h_mean, h_cov, h_gamma = fit.bandwidths
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "vcm_fit",
        "grid": fit.grid.tolist(),
        "baseline": fit.baseline,
        "ridge_lambda": fit.ridge_lambda,
        "bandwidths": {"h_mean": h_mean, "h_cov": h_cov, "h_gamma": h_gamma},
        "gamma": _curve_values(fit.gamma),
        "beta": _curve_values(fit.beta),
        "r_squared": fit.r_squared.values.tolist(),
        "manifest": manifest,
    }


def fpca_to_dict(
    result: FpcaResult,
    bands: Sequence[ScalarCurve],
    probs: Sequence[float],
    manifest: str | None = None,
) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "fpca",
        "grid": result.mean_curve.grid.tolist(),
        "mean": result.mean_curve.values.tolist(),
        "eigenvalues": result.eigenvalues.tolist(),
        "fve": result.fve.tolist(),
        "eigenfunctions": _curve_values(result.eigenfunctions),
        "scores": [{"label": label, "values": row.tolist()} for label, row in zip(result.labels, result.scores)],
        "quantile_bands": {format(float(prob), "g"): band.values.tolist() for prob, band in zip(probs, bands)},
        "manifest": manifest,
    }


def truth_to_dict(config: SimConfig, grid: np.ndarray, manifest: str | None = None) -> dict[str, Any]:
    """Model mean, covariance and (for outcome designs) coefficient curves on ``grid``."""

    payload: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": "truth",
        "dimension": config.p,
        "grid": grid.tolist(),
        "mean": true_mean(config, grid).T.tolist(),
        "matrices": true_cov_stack(config, grid).reshape(grid.shape[0], -1).tolist(),
        "beta": None,
        "manifest": manifest,
    }
    if config.vcm is not None:
        payload["beta"] = true_beta(config, grid).T.tolist()
    return payload


def read_curve_collection(path: Path) -> CurveCollection:
    """Curve collection from a matrix-curve JSON (correlation pairs) or a curve CSV."""

    if path.suffix.lower() == ".csv":
        return read_curve_csv(path)
    return correlation_collection(matrix_curve_from_dict(read_json(path)))

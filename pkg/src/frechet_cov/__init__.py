"""Public package exports for frechet-cov with lazy imports."""

from __future__ import annotations

from importlib import import_module
from typing import Any

__version__ = "0.1.0"

__all__ = [
    "ObservationSet",
    "MatrixCurve",
    "SymMatrix",
    "estimate_means",
    "raw_covariances",
    "estimate_curve",
    "correlation_curve",
    "project_psd",
    "select_bandwidths",
    "fit_vcm",
    "fpca",
    "SimConfig",
    "run_benchmark",
    "FrechetCovError",
]

_EXPORT_MODULES: dict[str, str] = {
    "ObservationSet": "frechet_cov.dyn_cov",
    "MatrixCurve": "frechet_cov.dyn_cov",
    "estimate_means": "frechet_cov.dyn_cov",
    "raw_covariances": "frechet_cov.dyn_cov",
    "estimate_curve": "frechet_cov.dyn_cov",
    "correlation_curve": "frechet_cov.dyn_cov",
    "SymMatrix": "frechet_cov.matrix_space",
    "project_psd": "frechet_cov.matrix_space",
    "select_bandwidths": "frechet_cov.bandwidth_selection",
    "fit_vcm": "frechet_cov.varying_coeff",
    "fpca": "frechet_cov.curve_fpca",
    "SimConfig": "frechet_cov.sim_engine",
    "run_benchmark": "frechet_cov.sim_engine",
    "FrechetCovError": "frechet_cov.domain.errors",
}


def __getattr__(name: str) -> Any:
    if name not in _EXPORT_MODULES:
        raise AttributeError(f"module 'frechet_cov' has no attribute {name!r}")

    module = import_module(_EXPORT_MODULES[name])
    value = getattr(module, name)
    globals()[name] = value
    return value

"""CLI-facing handlers that delegate to application services.

Handlers take JSON-friendly keyword arguments (paths as strings, enums by
value) so that the resolved arguments stored in a run manifest can be fed
straight back into the same handler by ``replay_manifest``.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import replace
from datetime import datetime, timezone
from enum import Enum
import inspect
from pathlib import Path
import time
from typing import Any, TypeVar
from uuid import uuid4

import numpy as np

from frechet_cov import __version__
from frechet_cov.application.estimation_service import (
    EstimateCovarianceCurve,
    FitVaryingCoefficients,
    RunBenchmarkSuite,
    SimulateObservations,
    SummarizeCurves,
)
from frechet_cov.domain.errors import ConfigError
from frechet_cov.domain.models import (
    BenchmarkRequest,
    CommandName,
    FitRequest,
    FpcaRequest,
    RunManifest,
    VcmRequest,
)
from frechet_cov.dyn_cov import one_observation_per_subject
from frechet_cov.estimation_options import Estimator, SamplingDesign, parse_case_insensitive_enum
from frechet_cov.infrastructure.curve_json import (
    fpca_to_dict,
    matrix_curve_from_dict,
    matrix_curve_to_dict,
    read_curve_collection,
    read_json,
    truth_to_dict,
    vcm_fit_to_dict,
    write_json,
)
from frechet_cov.infrastructure.logging_event_publisher import LoggingEventPublisher
from frechet_cov.infrastructure.manifest_store import manifest_path_for, read_manifest, write_manifest
from frechet_cov.infrastructure.observation_csv import (
    read_observations,
    read_outcomes,
    write_observations,
    write_outcomes,
)
from frechet_cov.infrastructure.result_tables import write_benchmark_tables, write_mean_curves
from frechet_cov.settings import load_runtime_settings
from frechet_cov.sim_engine import RepeatDesign, SimConfig, parse_estimators, resolve_benchmark_profile, score_curve

estimate_covariance = EstimateCovarianceCurve(event_publisher=LoggingEventPublisher(CommandName.FIT.value))
fit_varying_coefficients = FitVaryingCoefficients(event_publisher=LoggingEventPublisher(CommandName.VCM.value))
simulate_observations = SimulateObservations(event_publisher=LoggingEventPublisher(CommandName.SIMULATE.value))
run_benchmark_suite = RunBenchmarkSuite(event_publisher=LoggingEventPublisher(CommandName.BENCHMARK.value))
summarize_curves = SummarizeCurves(event_publisher=LoggingEventPublisher(CommandName.FPCA.value))

EnumT = TypeVar("EnumT", bound=Enum)


def _parse_option(raw: str | EnumT, enum_cls: type[EnumT], option: str) -> EnumT:
    if isinstance(raw, enum_cls):
        return raw
    try:
        return parse_case_insensitive_enum(str(raw), enum_cls, option)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_seed(seed: int | None) -> int:
    return load_runtime_settings().seed if seed is None else int(seed)


def _resolve_threads(threads: int | None) -> int | None:
    if threads is None:
        return load_runtime_settings().threads
    if threads < 1:
        raise ConfigError(f"--threads must be at least 1, got {threads}.")
    return int(threads)


def _sibling(output: Path, suffix: str) -> Path:
    return output.with_name(f"{output.stem}{suffix}")


def _record_run(
    command: CommandName,
    run_id: str,
    output: Path,
    arguments: dict[str, Any],
    resolved: dict[str, Any],
    outputs: Sequence[Path],
    started_at: datetime,
    started: float,
) -> Path:
    manifest = RunManifest(
        command=command.value,
        run_id=run_id,
        arguments=arguments,
        resolved=resolved,
        software_version=__version__,
        outputs=tuple(str(path) for path in outputs),
        started_at=started_at.isoformat(),
        wall_time_seconds=time.perf_counter() - started,
    )
    return write_manifest(output, manifest)


def simulate_to_path(
    config: str | Path,
    output: str | Path,
    design: str = SamplingDesign.SINGLE.value,
    truth_points: int | None = None,
    run_id: str | None = None,
) -> list[Path]:
    """Simulate observations from a JSON config; returns every written file."""

    started_at, started = datetime.now(timezone.utc), time.perf_counter()
    run_id = run_id or str(uuid4())
    output = Path(output)
    sampling = _parse_option(design, SamplingDesign, "--design")
    sim_config = SimConfig.from_dict(read_json(Path(config)))
    if sampling is SamplingDesign.REPEATED and sim_config.repeat_design is None:
        sim_config = replace(sim_config, repeat_design=RepeatDesign())

    result = simulate_observations.run(sim_config, sampling, run_id=run_id)
    manifest_name = manifest_path_for(output).name
    written = [write_observations(output, result.data)]
    written.append(write_json(_sibling(output, ".config.json"), sim_config.to_dict()))
    if result.outcomes is not None:
        written.append(write_outcomes(_sibling(output, ".outcomes.csv"), result.data, result.outcomes))
    if truth_points is not None:
        if truth_points < 2:
            raise ConfigError(f"--truth-points must be at least 2, got {truth_points}.")
        grid = np.linspace(0.0, 1.0, truth_points)
        written.append(write_json(_sibling(output, ".truth.json"), truth_to_dict(sim_config, grid, manifest_name)))

    arguments = {
        "config": str(config),
        "output": str(output),
        "design": sampling.value,
        "truth_points": truth_points,
    }
    resolved = {"seed": sim_config.seed, "p": sim_config.p, "n": sim_config.n, "rows": result.data.n}
    _record_run(CommandName.SIMULATE, run_id, output, arguments, resolved, written, started_at, started)
    return written


def fit_from_paths(
    data: str | Path,
    output: str | Path,
    estimator: str = Estimator.LOCAL_FRECHET.value,
    grid_points: int = 101,
    grid_start: float | None = None,
    grid_end: float | None = None,
    h_mean: float | None = None,
    h_cov: float | None = None,
    correlation: bool = False,
    domain_end: float | None = None,
    one_per_subject: bool = False,
    folds: int = 5,
    seed: int | None = None,
    threads: int | None = None,
    run_id: str | None = None,
) -> list[Path]:
    """Estimate a covariance (or correlation) curve from an observation CSV."""

    started_at, started = datetime.now(timezone.utc), time.perf_counter()
    run_id = run_id or str(uuid4())
    output = Path(output)
    seed = _resolve_seed(seed)
    threads = _resolve_threads(threads)
    observations = read_observations(Path(data), domain_end)
    if one_per_subject:
        observations = one_observation_per_subject(observations, seed)

    request = FitRequest(
        grid_points=grid_points,
        grid_start=grid_start,
        grid_end=grid_end,
        h_mean=h_mean,
        h_cov=h_cov,
        estimator=_parse_option(estimator, Estimator, "--estimator"),
        correlation=correlation,
        folds=folds,
        seed=seed,
        threads=threads,
    )
    fit = estimate_covariance.run(observations, request, run_id=run_id)
    manifest_name = manifest_path_for(output).name
    written = [
        write_json(output, matrix_curve_to_dict(fit.curve, manifest_name)),
        write_mean_curves(_sibling(output, ".means.csv"), fit.means),
    ]

    arguments = {
        "data": str(data),
        "output": str(output),
        "estimator": request.estimator.value,
        "grid_points": grid_points,
        "grid_start": grid_start,
        "grid_end": grid_end,
        "h_mean": h_mean,
        "h_cov": h_cov,
        "correlation": correlation,
        "domain_end": domain_end,
        "one_per_subject": one_per_subject,
        "folds": folds,
        "seed": seed,
        "threads": threads,
    }
    resolved: dict[str, Any] = {
        "h_mean": fit.h_mean,
        "h_cov": fit.curve.bandwidth,
        "grid": [float(fit.curve.grid[0]), float(fit.curve.grid[-1]), len(fit.curve)],
        "domain_end": observations.domain_end,
        "observations": observations.n,
    }
    if fit.selection is not None:
        resolved.update(h1=fit.selection.h1, h2=fit.selection.h2)
    _record_run(CommandName.FIT, run_id, output, arguments, resolved, written, started_at, started)
    return written


def vcm_from_paths(
    data: str | Path,
    outcomes: str | Path,
    output: str | Path,
    grid_points: int = 101,
    h_mean: float | None = None,
    h_cov: float | None = None,
    h_gamma: float | None = None,
    ridge_lambda: float | None = None,
    baseline: float = 100.0,
    estimate_baseline: bool = False,
    domain_end: float | None = None,
    folds: int = 5,
    seed: int | None = None,
    threads: int | None = None,
    run_id: str | None = None,
) -> list[Path]:
    started_at, started = datetime.now(timezone.utc), time.perf_counter()
    run_id = run_id or str(uuid4())
    output = Path(output)
    seed = _resolve_seed(seed)
    threads = _resolve_threads(threads)
    observations = read_observations(Path(data), domain_end)
    scores = read_outcomes(Path(outcomes), observations, baseline)

    request = VcmRequest(
        grid_points=grid_points,
        h_mean=h_mean,
        h_cov=h_cov,
        h_gamma=h_gamma,
        ridge_lambda=ridge_lambda,
        baseline=baseline,
        estimate_baseline=estimate_baseline,
        folds=folds,
        seed=seed,
        threads=threads,
    )
    fit = fit_varying_coefficients.run(observations, scores, request, run_id=run_id)
    written = [write_json(output, vcm_fit_to_dict(fit, manifest_path_for(output).name))]

    arguments = {
        "data": str(data),
        "outcomes": str(outcomes),
        "output": str(output),
        "grid_points": grid_points,
        "h_mean": h_mean,
        "h_cov": h_cov,
        "h_gamma": h_gamma,
        "ridge_lambda": ridge_lambda,
        "baseline": baseline,
        "estimate_baseline": estimate_baseline,
        "domain_end": domain_end,
        "folds": folds,
        "seed": seed,
        "threads": threads,
    }
    h_mean_used, h_cov_used, h_gamma_used = fit.bandwidths
    resolved = {
        "h_mean": h_mean_used,
        "h_cov": h_cov_used,
        "h_gamma": h_gamma_used,
        "ridge_lambda": fit.ridge_lambda,
        "baseline": fit.baseline,
    }
    _record_run(CommandName.VCM, run_id, output, arguments, resolved, written, started_at, started)
    return written


def benchmark_to_path(
    output: str | Path,
    profile: str = "smoke",
    dims: Sequence[int] | None = None,
    sizes: Sequence[int] | None = None,
    estimators: str | None = None,
    bandwidths: Sequence[float] | None = None,
    replicates: int | None = None,
    design: str = SamplingDesign.SINGLE.value,
    seed: int | None = None,
    threads: int | None = None,
    run_id: str | None = None,
) -> list[Path]:
    """Run the Monte Carlo grid; explicit values override the named profile."""

    started_at, started = datetime.now(timezone.utc), time.perf_counter()
    run_id = run_id or str(uuid4())
    output = Path(output)
    base = resolve_benchmark_profile(profile)
    request = BenchmarkRequest(
        dims=tuple(int(p) for p in (dims or base.dims)),
        sizes=tuple(int(n) for n in (sizes or base.sizes)),
        estimators=parse_estimators(estimators) if estimators else base.estimators,
        bandwidths=tuple(float(h) for h in (bandwidths or base.bandwidths)),
        replicates=base.replicates if replicates is None else int(replicates),
        seed=_resolve_seed(seed),
        design=_parse_option(design, SamplingDesign, "--design"),
        ise_points=base.ise_points,
        ise_trim=base.ise_trim,
        threads=_resolve_threads(threads),
    )
    result = run_benchmark_suite.run(request, run_id=run_id)
    written = list(write_benchmark_tables(output, result))

    arguments = {
        "output": str(output),
        "profile": profile,
        "dims": list(request.dims),
        "sizes": list(request.sizes),
        "estimators": ",".join(estimator.value for estimator in request.estimators),
        "bandwidths": list(request.bandwidths),
        "replicates": request.replicates,
        "design": request.design.value,
        "seed": request.seed,
        "threads": request.threads,
    }
    resolved = {
        "ise_points": request.ise_points,
        "ise_trim": request.ise_trim,
        "mean_bandwidths": {
            f"{p}x{n}": float(np.median(values)) for (p, n), values in result.mean_bandwidths.items()
        },
    }
    _record_run(CommandName.BENCHMARK, run_id, output, arguments, resolved, written, started_at, started)
    return written


def score_from_paths(curve: str | Path, config: str | Path) -> float:
    """ISE of a fitted matrix-curve JSON against the simulation model in ``config``."""

    return score_curve(
        matrix_curve_from_dict(read_json(Path(curve))),
        SimConfig.from_dict(read_json(Path(config))),
    )


def fpca_from_paths(
    curves: str | Path,
    output: str | Path,
    components: int = 3,
    probs: Sequence[float] = (0.25, 0.5, 0.75),
    run_id: str | None = None,
) -> list[Path]:
    started_at, started = datetime.now(timezone.utc), time.perf_counter()
    run_id = run_id or str(uuid4())
    output = Path(output)
    collection = read_curve_collection(Path(curves))
    request = FpcaRequest(components=components, probs=tuple(float(prob) for prob in probs))
    result, bands = summarize_curves.run(collection, request, run_id=run_id)
    written = [write_json(output, fpca_to_dict(result, bands, request.probs, manifest_path_for(output).name))]

    arguments = {
        "curves": str(curves),
        "output": str(output),
        "components": components,
        "probs": list(request.probs),
    }
    resolved = {"curves": collection.size, "grid_points": int(collection.grid.shape[0])}
    _record_run(CommandName.FPCA, run_id, output, arguments, resolved, written, started_at, started)
    return written


_REPLAY_HANDLERS: dict[CommandName, Callable[..., list[Path]]] = {
    CommandName.SIMULATE: simulate_to_path,
    CommandName.FIT: fit_from_paths,
    CommandName.VCM: vcm_from_paths,
    CommandName.BENCHMARK: benchmark_to_path,
    CommandName.FPCA: fpca_from_paths,
}


def replay_manifest(manifest: str | Path, run_id: str | None = None) -> list[Path]:
    """Re-run the command recorded in ``manifest`` with its resolved arguments."""

    recorded = read_manifest(Path(manifest))
    handler = _REPLAY_HANDLERS[CommandName(recorded.command)]
    accepted = set(inspect.signature(handler).parameters) - {"run_id"}
    unknown = sorted(set(recorded.arguments) - accepted)
    if unknown:
        raise ConfigError(
            f"Manifest argument '{unknown[0]}' is not accepted by the '{recorded.command}' command."
        )
    return handler(**recorded.arguments, run_id=run_id)

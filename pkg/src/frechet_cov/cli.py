"""CLI interface for frechet-cov."""

from __future__ import annotations

from collections.abc import Callable
import logging
from pathlib import Path
from typing import TypeVar

import typer

from .domain.errors import FrechetCovError
from .estimation_options import Estimator, SamplingDesign, choices_text, enum_values
from .interfaces.cli_handlers import (
    benchmark_to_path,
    fit_from_paths,
    fpca_from_paths,
    replay_manifest,
    score_from_paths,
    simulate_to_path,
    vcm_from_paths,
)
from .settings import load_runtime_settings
from .sim_engine import BENCHMARK_PROFILES

app = typer.Typer(help="Time-varying covariance estimation by local Frechet regression")

ResultT = TypeVar("ResultT")


def _run(action: Callable[[], ResultT]) -> ResultT:
    try:
        return action()
    except FrechetCovError as error:
        payload = error.as_dict()
        typer.echo(f"error[{payload['code']}]: {payload['message']}", err=True)
        raise typer.Exit(error.exit_code) from error


def _echo_written(paths: list[Path]) -> None:
    for path in paths:
        typer.echo(f"Written: {path}")


def _parse_list(raw: str | None, cast: Callable[[str], ResultT], flag: str) -> list[ResultT] | None:
    if raw is None:
        return None
    try:
        return [cast(item.strip()) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise typer.BadParameter(f"{flag} must be a comma-separated list, got {raw!r}.") from exc


@app.callback()
def main(
    log_level: str | None = typer.Option(
        None,
        "--log-level",
        help="Root log level; defaults to FRECHET_COV_LOG_LEVEL or WARNING.",
    ),
) -> None:
    """Estimate, benchmark and summarize time-varying covariance curves."""

    level = _run(lambda: log_level or load_runtime_settings().log_level).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise typer.BadParameter(f"Unknown log level {log_level!r}.")
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@app.command("simulate")
def simulate_command(
    config: Path = typer.Option(..., "--config", "-c", help="Simulation config JSON."),
    output: Path = typer.Option(..., "--output", "-o", help="Observation CSV to write."),
    design: SamplingDesign = typer.Option(
        SamplingDesign.SINGLE,
        "--design",
        case_sensitive=False,
        help=f"Sampling design: {choices_text(enum_values(SamplingDesign))} observations per subject.",
    ),
    truth_points: int | None = typer.Option(
        None,
        "--truth-points",
        help="Also write the model's mean and covariance curves on this many points.",
    ),
) -> None:
    """Draw observations from the simulation model."""

    _echo_written(
        _run(
            lambda: simulate_to_path(
                config, output, design=design.value, truth_points=truth_points
            )
        )
    )


@app.command("fit")
def fit_command(
    data: Path = typer.Argument(..., help="Observation CSV with header subject,time,y1..yp."),
    output: Path = typer.Option(..., "--output", "-o", help="Matrix-curve JSON to write."),
    estimator: Estimator = typer.Option(
        Estimator.LOCAL_FRECHET,
        "--estimator",
        case_sensitive=False,
        help=f"Covariance estimator: {choices_text(enum_values(Estimator))}.",
    ),
    grid_points: int = typer.Option(101, "--grid-points", min=2, help="Output grid size."),
    grid_start: float | None = typer.Option(None, "--grid-start", help="Output grid start (default: first time)."),
    grid_end: float | None = typer.Option(None, "--grid-end", help="Output grid end (default: last time)."),
    h_mean: float | None = typer.Option(None, "--h-mean", help="Mean bandwidth; cross-validated when omitted."),
    h_cov: float | None = typer.Option(None, "--h-cov", help="Covariance bandwidth; fixes it instead of selecting."),
    select_bandwidth: bool = typer.Option(
        False,
        "--select-bandwidth",
        help="Select the covariance bandwidth by cross-validation (the default without --h-cov).",
    ),
    correlation: bool = typer.Option(False, "--correlation", help="Convert each matrix to a correlation matrix."),
    domain_end: float | None = typer.Option(None, "--domain-end", help="End of the time domain (default: last time)."),
    one_per_subject: bool = typer.Option(
        False,
        "--one-per-subject",
        help="Keep one randomly chosen observation per subject.",
    ),
    folds: int = typer.Option(5, "--folds", min=2, help="Cross-validation folds."),
    seed: int | None = typer.Option(None, "--seed", help="Seed for folds and subsampling."),
    threads: int | None = typer.Option(None, "--threads", min=1, help="Worker threads."),
) -> None:
    """Estimate a covariance or correlation curve from sparse observations."""

    if select_bandwidth and h_cov is not None:
        raise typer.BadParameter("Use either --h-cov or --select-bandwidth, not both.")
    _echo_written(
        _run(
            lambda: fit_from_paths(
                data,
                output,
                estimator=estimator.value,
                grid_points=grid_points,
                grid_start=grid_start,
                grid_end=grid_end,
                h_mean=h_mean,
                h_cov=h_cov,
                correlation=correlation,
                domain_end=domain_end,
                one_per_subject=one_per_subject,
                folds=folds,
                seed=seed,
                threads=threads,
            )
        )
    )


@app.command("vcm")
def vcm_command(
    data: Path = typer.Argument(..., help="Observation CSV."),
    outcomes: Path = typer.Argument(..., help="Outcome CSV with header subject,score."),
    output: Path = typer.Option(..., "--output", "-o", help="Varying-coefficient fit JSON to write."),
    grid_points: int = typer.Option(101, "--grid-points", min=2, help="Output grid size."),
    h_mean: float | None = typer.Option(None, "--h-mean", help="Mean bandwidth."),
    h_cov: float | None = typer.Option(None, "--h-cov", help="Covariance bandwidth."),
    h_gamma: float | None = typer.Option(None, "--h-gamma", help="Cross-covariance bandwidth (default: --h-cov)."),
    ridge_lambda: float | None = typer.Option(
        None,
        "--lambda",
        min=0.0,
        help="Ridge penalty; cross-validated when omitted.",
    ),
    select_lambda: bool = typer.Option(
        False,
        "--select-lambda",
        help="Select the ridge penalty by cross-validation (the default without --lambda).",
    ),
    baseline: float = typer.Option(100.0, "--baseline", help="Population outcome level subtracted from scores."),
    estimate_baseline: bool = typer.Option(
        False,
        "--estimate-baseline",
        help="Use the sample mean outcome instead of --baseline.",
    ),
    domain_end: float | None = typer.Option(None, "--domain-end", help="End of the time domain."),
    folds: int = typer.Option(5, "--folds", min=2, help="Cross-validation folds."),
    seed: int | None = typer.Option(None, "--seed", help="Seed for fold assignment."),
    threads: int | None = typer.Option(None, "--threads", min=1, help="Worker threads."),
) -> None:
    """Fit time-varying coefficients linking observations to an outcome."""

    if select_lambda and ridge_lambda is not None:
        raise typer.BadParameter("Use either --lambda or --select-lambda, not both.")
    _echo_written(
        _run(
            lambda: vcm_from_paths(
                data,
                outcomes,
                output,
                grid_points=grid_points,
                h_mean=h_mean,
                h_cov=h_cov,
                h_gamma=h_gamma,
                ridge_lambda=ridge_lambda,
                baseline=baseline,
                estimate_baseline=estimate_baseline,
                domain_end=domain_end,
                folds=folds,
                seed=seed,
                threads=threads,
            )
        )
    )


@app.command("benchmark")
def benchmark_command(
    output: Path | None = typer.Option(None, "--output", "-o", help="Results table CSV to write."),
    profile: str = typer.Option("smoke", "--profile", help=f"Named grid: {choices_text(BENCHMARK_PROFILES)}."),
    dims: str | None = typer.Option(None, "--dims", help="Comma-separated dimensions, e.g. 20,40."),
    sizes: str | None = typer.Option(None, "--sizes", help="Comma-separated sample sizes."),
    replicates: int | None = typer.Option(None, "--replicates", min=1, help="Replicates per cell."),
    estimators: str | None = typer.Option(
        None,
        "--estimators",
        help=f"Comma-separated estimators from {choices_text(enum_values(Estimator))}.",
    ),
    h_grid: str | None = typer.Option(None, "--h-grid", help="Comma-separated candidate bandwidths."),
    design: SamplingDesign = typer.Option(
        SamplingDesign.SINGLE,
        "--design",
        case_sensitive=False,
        help=f"Sampling design: {choices_text(enum_values(SamplingDesign))}.",
    ),
    seed: int | None = typer.Option(None, "--seed", help="Parameter and replicate seed."),
    threads: int | None = typer.Option(None, "--threads", min=1, help="Worker threads."),
    score: Path | None = typer.Option(
        None,
        "--score",
        help="Score this matrix-curve JSON against --sim-config instead of running the grid.",
    ),
    sim_config: Path | None = typer.Option(None, "--sim-config", help="Simulation config JSON used by --score."),
) -> None:
    """Run the Monte Carlo benchmark, or score one fitted curve."""

    if score is not None:
        if sim_config is None:
            raise typer.BadParameter("--score requires --sim-config.")
        value = _run(lambda: score_from_paths(score, sim_config))
        typer.echo(f"ISE: {value:.17g}")
        return
    if output is None:
        raise typer.BadParameter("--output is required when running the benchmark grid.")

    _echo_written(
        _run(
            lambda: benchmark_to_path(
                output,
                profile=profile,
                dims=_parse_list(dims, int, "--dims"),
                sizes=_parse_list(sizes, int, "--sizes"),
                estimators=estimators,
                bandwidths=_parse_list(h_grid, float, "--h-grid"),
                replicates=replicates,
                design=design.value,
                seed=seed,
                threads=threads,
            )
        )
    )


@app.command("fpca")
def fpca_command(
    curves: Path = typer.Argument(..., help="Matrix-curve JSON (correlation pairs) or curve CSV."),
    output: Path = typer.Option(..., "--output", "-o", help="FPCA summary JSON to write."),
    components: int = typer.Option(3, "--components", "-k", min=1, help="Number of components."),
    probs: str = typer.Option("0.25,0.5,0.75", "--probs", help="Comma-separated quantile levels."),
) -> None:
    """Summarize a collection of curves by functional principal components."""

    levels = _parse_list(probs, float, "--probs") or []
    _echo_written(_run(lambda: fpca_from_paths(curves, output, components=components, probs=levels)))


@app.command("replay")
def replay_command(
    manifest: Path = typer.Argument(..., help="Run manifest written next to an earlier output."),
) -> None:
    """Re-run a command from its manifest, reproducing its outputs."""

    _echo_written(_run(lambda: replay_manifest(manifest)))


if __name__ == "__main__":
    app()

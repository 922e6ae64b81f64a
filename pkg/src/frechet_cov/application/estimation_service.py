"""Application services orchestrating estimation use-cases."""

from __future__ import annotations

from dataclasses import dataclass
from uuid import uuid4

import numpy as np

from frechet_cov.application.event_publisher import EventPublisher, NullEventPublisher
from frechet_cov.bandwidth_selection import (
    BandwidthGrid,
    BandwidthSelection,
    cv_mean_bandwidth,
    select_bandwidths,
)
from frechet_cov.curve_fpca import CurveCollection, FpcaResult, fpca, pointwise_band
from frechet_cov.domain.errors import ConfigError, FrechetCovError
from frechet_cov.domain.events import (
    BandwidthSelected,
    BenchmarkCellCompleted,
    CovarianceCurveEstimated,
    CurvesSummarized,
    EstimationFailed,
    MeansEstimated,
    ObservationsLoaded,
    VaryingCoefficientsFitted,
)
from frechet_cov.domain.models import BenchmarkRequest, FitRequest, FpcaRequest, VcmRequest
from frechet_cov.dyn_cov import (
    MatrixCurve,
    ObservationSet,
    correlation_curve,
    curve_from_raw,
    estimate_means,
    raw_covariances,
)
from frechet_cov.estimation_options import SamplingDesign
from frechet_cov.kernel_smoothing import ScalarCurve
from frechet_cov.sim_engine import (
    BenchResult,
    BenchRow,
    SimConfig,
    default_ise_grid,
    draw_repeat_counts,
    generate,
    generate_outcomes,
    generate_repeated,
    run_benchmark,
)
from frechet_cov.varying_coeff import OutcomeSet, VcmConfig, VcmFit, fit_vcm


@dataclass(frozen=True, slots=True)
class CovarianceFit:
    curve: MatrixCurve
    means: tuple[ScalarCurve, ...]
    h_mean: float
    selection: BandwidthSelection | None


@dataclass(frozen=True, slots=True)
class SimulationOutput:
    data: ObservationSet
    outcomes: OutcomeSet | None
    counts: np.ndarray | None


def output_grid(data: ObservationSet, points: int, start: float | None, end: float | None) -> np.ndarray:
    """Evenly spaced grid, defaulting to the hull of the observed times."""

    if points < 2:
        raise ConfigError(f"Output grid needs at least 2 points, got {points}.")
    lower = float(data.times.min()) if start is None else float(start)
    upper = float(data.times.max()) if end is None else float(end)
    if not lower < upper:
        raise ConfigError(f"Output grid start {lower:g} must lie below its end {upper:g}.")
    return np.linspace(lower, upper, points)


def _observations_summary(data: ObservationSet, source: str) -> dict[str, object]:
    subjects = data.n if data.subject_ids is None else int(np.unique(data.subject_ids).size)
    return {
        "source": source,
        "observations": data.n,
        "subjects": subjects,
        "dimension": data.p,
        "domain_end": data.domain_end,
    }


def _failure(run_id: str, stage: str, error: FrechetCovError) -> EstimationFailed:
    return EstimationFailed(run_id=run_id, payload_summary={"stage": stage, **error.as_dict()})


def _resolve_mean_bandwidth(
    data: ObservationSet,
    h_mean: float | None,
    folds: int,
    seed: int,
    threads: int | None,
) -> float:
    if h_mean is not None:
        return float(h_mean)
    return cv_mean_bandwidth(data, BandwidthGrid.default_for(data, folds=folds, seed=seed), workers=threads)


@dataclass(slots=True)
class EstimateCovarianceCurve:
    """Use case that turns observations into a covariance or correlation curve."""

    event_publisher: EventPublisher = NullEventPublisher()

    def run(self, data: ObservationSet, request: FitRequest, run_id: str | None = None) -> CovarianceFit:
        run_id = run_id or str(uuid4())
        stage = "means"
        self.event_publisher.publish(
            ObservationsLoaded(run_id=run_id, payload_summary=_observations_summary(data, "file"))
        )
        try:
            h_mean = _resolve_mean_bandwidth(data, request.h_mean, request.folds, request.seed, request.threads)
            means = estimate_means(data, h_mean)
            self.event_publisher.publish(
                MeansEstimated(
                    run_id=run_id,
                    payload_summary={"h_mean": h_mean, "selected": request.h_mean is None},
                )
            )

            stage = "bandwidth"
            selection = None
            h_cov = request.h_cov
            if h_cov is None:
                selection = select_bandwidths(
                    data,
                    BandwidthGrid.default_for(data, folds=request.folds, seed=request.seed),
                    h_mean,
                    workers=request.threads,
                )
                h_cov = selection.h_opt
                self.event_publisher.publish(
                    BandwidthSelected(
                        run_id=run_id,
                        payload_summary={"h1": selection.h1, "h2": selection.h2, "h_opt": selection.h_opt},
                    )
                )

            stage = "curve"
            grid = output_grid(data, request.grid_points, request.grid_start, request.grid_end)
            raw = raw_covariances(data, means)
            curve = curve_from_raw(raw, grid, h_cov, request.estimator, h_mean=h_mean)
            if request.correlation:
                curve = correlation_curve(curve)
        except FrechetCovError as error:
            self.event_publisher.publish(_failure(run_id, stage, error))
            raise

        self.event_publisher.publish(
            CovarianceCurveEstimated(
                run_id=run_id,
                payload_summary={
                    "estimator": request.estimator.value,
                    "grid_points": len(curve),
                    "h_cov": h_cov,
                    "correlation": curve.correlation,
                    "psd_points": int(curve.psd_flags.sum()),
                },
            )
        )
        return CovarianceFit(curve=curve, means=means, h_mean=h_mean, selection=selection)


@dataclass(slots=True)
class FitVaryingCoefficients:
    """Use case fitting the varying-coefficient outcome model."""

    event_publisher: EventPublisher = NullEventPublisher()

    def run(
        self,
        data: ObservationSet,
        outcomes: OutcomeSet,
        request: VcmRequest,
        run_id: str | None = None,
    ) -> VcmFit:
        run_id = run_id or str(uuid4())
        stage = "bandwidth"
        self.event_publisher.publish(
            ObservationsLoaded(run_id=run_id, payload_summary=_observations_summary(data, "file"))
        )
        try:
            h_mean = _resolve_mean_bandwidth(data, request.h_mean, request.folds, request.seed, request.threads)
            h_cov = request.h_cov
            if h_cov is None:
                h_cov = select_bandwidths(
                    data,
                    BandwidthGrid.default_for(data, folds=request.folds, seed=request.seed),
                    h_mean,
                    workers=request.threads,
                ).h_opt
            stage = "fit"
            config = VcmConfig(
                grid=output_grid(data, request.grid_points, None, None),
                h_mean=h_mean,
                h_cov=h_cov,
                h_gamma=request.h_gamma,
                ridge_lambda=request.ridge_lambda,
                folds=request.folds,
                seed=request.seed,
                estimate_baseline=request.estimate_baseline,
            )
            fit = fit_vcm(data, outcomes.with_baseline(request.baseline), config)
        except FrechetCovError as error:
            self.event_publisher.publish(_failure(run_id, stage, error))
            raise

        self.event_publisher.publish(
            VaryingCoefficientsFitted(
                run_id=run_id,
                payload_summary={
                    "ridge_lambda": fit.ridge_lambda,
                    "selected_lambda": request.ridge_lambda is None,
                    "bandwidths": list(fit.bandwidths),
                    "max_r_squared": float(fit.r_squared.values.max()),
                },
            )
        )
        return fit


@dataclass(slots=True)
class SimulateObservations:
    event_publisher: EventPublisher = NullEventPublisher()

    def run(
        self,
        config: SimConfig,
        design: SamplingDesign = SamplingDesign.SINGLE,
        run_id: str | None = None,
    ) -> SimulationOutput:
        run_id = run_id or str(uuid4())
        rng = np.random.default_rng(config.seed)
        counts = None
        if design is SamplingDesign.REPEATED:
            counts = draw_repeat_counts(config)
            data = generate_repeated(config, rng, counts)
        else:
            data = generate(config, rng)
        outcomes = generate_outcomes(config, data, rng) if config.vcm is not None else None
        self.event_publisher.publish(
            ObservationsLoaded(run_id=run_id, payload_summary=_observations_summary(data, "simulated"))
        )
        return SimulationOutput(data=data, outcomes=outcomes, counts=counts)


@dataclass(slots=True)
class RunBenchmarkSuite:
    """Use case running the Monte Carlo benchmark grid."""

    event_publisher: EventPublisher = NullEventPublisher()

    def run(self, request: BenchmarkRequest, run_id: str | None = None) -> BenchResult:
        run_id = run_id or str(uuid4())

        def publish_cell(row: BenchRow) -> None:
            self.event_publisher.publish(
                BenchmarkCellCompleted(
                    run_id=run_id,
                    payload_summary={
                        "estimator": row.estimator.value,
                        "p": row.p,
                        "n": row.n,
                        "design": row.design.value,
                        "log_mean_ise": row.log_mean_ise,
                        "best_bandwidth": row.best_bandwidth,
                    },
                )
            )

        try:
            return run_benchmark(
                request.dims,
                request.sizes,
                request.estimators,
                request.bandwidths,
                request.replicates,
                request.seed,
                design=request.design,
                ise_grid=default_ise_grid(request.ise_points, request.ise_trim),
                workers=request.threads,
                on_cell=publish_cell,
            )
        except FrechetCovError as error:
            self.event_publisher.publish(_failure(run_id, "benchmark", error))
            raise


@dataclass(slots=True)
class SummarizeCurves:
    event_publisher: EventPublisher = NullEventPublisher()

    def run(
        self,
        collection: CurveCollection,
        request: FpcaRequest,
        run_id: str | None = None,
    ) -> tuple[FpcaResult, tuple[ScalarCurve, ...]]:
        run_id = run_id or str(uuid4())
        try:
            result = fpca(collection, request.components)
            bands = pointwise_band(collection, request.probs)
        except FrechetCovError as error:
            self.event_publisher.publish(_failure(run_id, "fpca", error))
            raise
        self.event_publisher.publish(
            CurvesSummarized(
                run_id=run_id,
                payload_summary={
                    "curves": collection.size,
                    "components": request.components,
                    "fve": [float(value) for value in result.fve],
                },
            )
        )
        return result, bands

from __future__ import annotations

import logging

import numpy as np
import pytest

from frechet_cov.application.estimation_service import (
    EstimateCovarianceCurve,
    FitVaryingCoefficients,
    RunBenchmarkSuite,
    SimulateObservations,
    SummarizeCurves,
)
from frechet_cov.application.event_publisher import RecordingEventPublisher
from frechet_cov.curve_fpca import CurveCollection
from frechet_cov.domain.errors import ConfigError, DegenerateWindowError
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
from frechet_cov.estimation_options import Estimator, SamplingDesign
from frechet_cov.infrastructure.logging_event_publisher import LoggingEventPublisher
from frechet_cov.sim_engine import RepeatDesign, SimConfig, VcmDesign


@pytest.fixture(scope="module")
def simulation():
    config = SimConfig.draw(2, 300, seed=21, vcm=VcmDesign())
    return SimulateObservations().run(config)


def test_fit_emits_events_in_order_with_selected_bandwidth(simulation) -> None:
    publisher = RecordingEventPublisher()
    service = EstimateCovarianceCurve(event_publisher=publisher)

    fit = service.run(simulation.data, FitRequest(grid_points=21, h_mean=0.3, seed=1), run_id="run-1")

    assert [type(event) for event in publisher.events] == [
        ObservationsLoaded,
        MeansEstimated,
        BandwidthSelected,
        CovarianceCurveEstimated,
    ]
    assert all(event.run_id == "run-1" for event in publisher.events)
    assert publisher.events[2].payload_summary["h_opt"] == fit.selection.h_opt
    assert publisher.events[1].payload_summary == {"h_mean": 0.3, "selected": False}
    assert publisher.events[3].payload_summary["grid_points"] == 21


def test_fit_with_fixed_bandwidth_skips_selection_event(simulation) -> None:
    publisher = RecordingEventPublisher()

    fit = EstimateCovarianceCurve(event_publisher=publisher).run(
        simulation.data,
        FitRequest(grid_points=11, h_mean=0.3, h_cov=0.3, estimator=Estimator.NW, correlation=True),
    )

    assert BandwidthSelected not in [type(event) for event in publisher.events]
    assert fit.selection is None and fit.curve.correlation
    assert len({event.run_id for event in publisher.events}) == 1


def test_fit_failure_reports_stage(simulation) -> None:
    publisher = RecordingEventPublisher()
    service = EstimateCovarianceCurve(event_publisher=publisher)

    with pytest.raises(ConfigError):
        service.run(simulation.data, FitRequest(grid_points=1, h_mean=0.3, h_cov=0.3), run_id="run-fail")

    assert [type(event) for event in publisher.events] == [ObservationsLoaded, MeansEstimated, EstimationFailed]
    failure = publisher.events[-1].payload_summary
    assert failure["stage"] == "curve" and failure["code"] == "config_error"
    assert failure["message"].startswith("Output grid needs at least 2 points")
    assert "location" not in failure


def test_failure_payload_carries_the_failing_grid_value(simulation) -> None:
    publisher = RecordingEventPublisher()
    times = simulation.data.times

    with pytest.raises(DegenerateWindowError):
        EstimateCovarianceCurve(event_publisher=publisher).run(
            simulation.data, FitRequest(grid_points=201, h_mean=0.3, h_cov=1e-4)
        )

    (failure,) = publisher.of_type(EstimationFailed)
    assert failure.payload_summary["code"] == "degenerate_window"
    assert times.min() <= failure.payload_summary["location"] <= times.max()


def test_vcm_service_emits_fitted_event(simulation) -> None:
    publisher = RecordingEventPublisher()

    fit = FitVaryingCoefficients(event_publisher=publisher).run(
        simulation.data,
        simulation.outcomes,
        VcmRequest(grid_points=11, h_mean=0.3, h_cov=0.3, ridge_lambda=0.1),
    )

    assert [type(event) for event in publisher.events] == [ObservationsLoaded, VaryingCoefficientsFitted]
    assert publisher.events[-1].payload_summary["ridge_lambda"] == fit.ridge_lambda == 0.1
    assert publisher.events[-1].payload_summary["selected_lambda"] is False


def test_simulation_service_reports_repeated_subjects() -> None:
    publisher = RecordingEventPublisher()
    config = SimConfig.draw(2, 40, seed=2, repeat_design=RepeatDesign())

    output = SimulateObservations(event_publisher=publisher).run(config, SamplingDesign.REPEATED)

    summary = publisher.events[0].payload_summary
    assert summary["source"] == "simulated"
    assert summary["subjects"] == 40
    assert summary["observations"] == output.data.n == int(output.counts.sum())
    assert output.outcomes is None


def test_benchmark_service_publishes_each_cell() -> None:
    publisher = RecordingEventPublisher()
    request = BenchmarkRequest(
        dims=(2,),
        sizes=(80,),
        estimators=(Estimator.NW, Estimator.LOCAL_FRECHET),
        bandwidths=(0.3, 0.5),
        replicates=2,
        ise_points=21,
    )

    result = RunBenchmarkSuite(event_publisher=publisher).run(request, run_id="bench")

    assert [type(event) for event in publisher.events] == [BenchmarkCellCompleted, BenchmarkCellCompleted]
    assert [event.payload_summary["estimator"] for event in publisher.events] == ["nw", "lf"]
    assert publisher.events[1].payload_summary["log_mean_ise"] == result.rows[1].log_mean_ise


def test_summary_service_emits_success_and_failure_events() -> None:
    grid = np.linspace(0.0, 1.0, 11)
    rng = np.random.default_rng(0)
    collection = CurveCollection(grid=grid, curves=rng.normal(size=(6, 11)))
    publisher = RecordingEventPublisher()
    service = SummarizeCurves(event_publisher=publisher)

    service.run(collection, FpcaRequest(components=2))
    with pytest.raises(ConfigError):
        service.run(collection, FpcaRequest(components=9))

    assert [type(event) for event in publisher.events] == [CurvesSummarized, EstimationFailed]
    assert publisher.events[1].payload_summary["stage"] == "fpca"


def test_logging_publisher_attaches_structured_fields(caplog, simulation) -> None:
    caplog.set_level(logging.INFO, logger="frechet_cov.events")

    SimulateObservations(event_publisher=LoggingEventPublisher()).run(
        SimConfig.draw(2, 20, seed=0), run_id="logged"
    )

    record = next(r for r in caplog.records if r.getMessage() == "domain_event_emitted")
    assert record.event_name == "ObservationsLoaded"
    assert record.run_id == "logged"
    assert record.payload_summary["observations"] == 20
    assert record.occurred_at.endswith("+00:00")


def test_logging_publisher_tags_command_and_warns_on_failure(caplog) -> None:
    caplog.set_level(logging.INFO, logger="frechet_cov.events")
    collection = CurveCollection(grid=np.linspace(0.0, 1.0, 5), curves=np.eye(5)[:3])

    with pytest.raises(ConfigError):
        SummarizeCurves(event_publisher=LoggingEventPublisher("fpca")).run(
            collection, FpcaRequest(components=4), run_id="failing"
        )

    (record,) = [r for r in caplog.records if r.getMessage() == "domain_event_emitted"]
    assert record.levelno == logging.WARNING
    assert record.command == "fpca"
    assert record.event_name == "EstimationFailed"
    assert record.payload_summary["code"] == "config_error"

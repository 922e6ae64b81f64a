"""Application layer: use-case services and the event publishing port."""

from .estimation_service import (
    CovarianceFit,
    EstimateCovarianceCurve,
    FitVaryingCoefficients,
    RunBenchmarkSuite,
    SimulateObservations,
    SimulationOutput,
    SummarizeCurves,
)
from .event_publisher import EventPublisher, NullEventPublisher, RecordingEventPublisher

__all__ = [
    "EventPublisher",
    "NullEventPublisher",
    "RecordingEventPublisher",
    "CovarianceFit",
    "SimulationOutput",
    "EstimateCovarianceCurve",
    "FitVaryingCoefficients",
    "SimulateObservations",
    "RunBenchmarkSuite",
    "SummarizeCurves",
]

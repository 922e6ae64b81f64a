"""Domain layer: errors, events and run models."""

from .errors import (
    AllCandidatesDegenerateError,
    ConfigError,
    DataFormatError,
    DegenerateDiagonalError,
    DegenerateWindowError,
    DimMismatchError,
    EigFailureError,
    FrechetCovError,
    GridTooCoarseError,
    InvalidDesignError,
    InvalidObservationsError,
    MeanNotEvaluableError,
    NotACovarianceError,
    NotPositiveSemidefiniteError,
    NumericalError,
    RankDeficientError,
    SingularSystemError,
)
from .events import (
    BandwidthSelected,
    BenchmarkCellCompleted,
    CovarianceCurveEstimated,
    CurvesSummarized,
    DomainEvent,
    EstimationFailed,
    MeansEstimated,
    ObservationsLoaded,
    VaryingCoefficientsFitted,
)
from .models import BenchmarkRequest, CommandName, FitRequest, FpcaRequest, RunManifest, VcmRequest

__all__ = [
    "FrechetCovError",
    "ConfigError",
    "DataFormatError",
    "InvalidDesignError",
    "InvalidObservationsError",
    "MeanNotEvaluableError",
    "GridTooCoarseError",
    "NumericalError",
    "DegenerateWindowError",
    "DimMismatchError",
    "EigFailureError",
    "NotPositiveSemidefiniteError",
    "DegenerateDiagonalError",
    "NotACovarianceError",
    "AllCandidatesDegenerateError",
    "SingularSystemError",
    "RankDeficientError",
    "DomainEvent",
    "ObservationsLoaded",
    "MeansEstimated",
    "BandwidthSelected",
    "CovarianceCurveEstimated",
    "VaryingCoefficientsFitted",
    "BenchmarkCellCompleted",
    "CurvesSummarized",
    "EstimationFailed",
    "RunManifest",
    "CommandName",
    "FitRequest",
    "VcmRequest",
    "BenchmarkRequest",
    "FpcaRequest",
]

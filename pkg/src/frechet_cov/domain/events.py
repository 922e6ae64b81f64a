"""Domain event contracts for estimation workflows."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any


@dataclass(frozen=True, slots=True)
class DomainEvent:
    """Base domain event emitted by application services."""

    run_id: str
    payload_summary: dict[str, Any]
    occurred_at: datetime = field(default_factory=lambda: datetime.now(tz=timezone.utc))


@dataclass(frozen=True, slots=True)
class ObservationsLoaded(DomainEvent):
    """An observation set was read from disk or simulated."""


@dataclass(frozen=True, slots=True)
class MeansEstimated(DomainEvent):
    """Mean curves were smoothed with the resolved mean bandwidth."""


@dataclass(frozen=True, slots=True)
class BandwidthSelected(DomainEvent):
    """Covariance bandwidth criteria were evaluated and combined."""


@dataclass(frozen=True, slots=True)
class CovarianceCurveEstimated(DomainEvent):
    """A covariance or correlation curve was computed on the output grid."""


@dataclass(frozen=True, slots=True)
class VaryingCoefficientsFitted(DomainEvent):
    """Cross-covariance, slope and R^2 curves were fitted."""


@dataclass(frozen=True, slots=True)
class BenchmarkCellCompleted(DomainEvent):
    """One (estimator, p, n) benchmark cell finished."""


@dataclass(frozen=True, slots=True)
class CurvesSummarized(DomainEvent):
    """Functional PCA and quantile bands were computed for a curve collection."""


@dataclass(frozen=True, slots=True)
class EstimationFailed(DomainEvent):
    """A command failed at a named stage."""

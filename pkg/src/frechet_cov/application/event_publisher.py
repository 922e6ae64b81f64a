"""Application-level event publishing contracts."""

from __future__ import annotations

from typing import Protocol

from frechet_cov.domain.events import DomainEvent


class EventPublisher(Protocol):
    """Port for publishing domain events."""

    def publish(self, event: DomainEvent) -> None:
        """Publish a single event."""


class NullEventPublisher:
    """Default for library calls: estimation runs without an event sink."""

    def publish(self, event: DomainEvent) -> None:  # noqa: ARG002
        return


class RecordingEventPublisher:
    """Keeps a run's events in publication order."""

    def __init__(self) -> None:
        self.events: list[DomainEvent] = []

    def publish(self, event: DomainEvent) -> None:
        self.events.append(event)

    def of_type(self, event_type: type[DomainEvent]) -> list[DomainEvent]:
        return [event for event in self.events if isinstance(event, event_type)]

"""Logging-backed implementation of the event publisher."""

from __future__ import annotations

from dataclasses import dataclass
import logging

from frechet_cov.domain.events import DomainEvent, EstimationFailed

LOGGER = logging.getLogger("frechet_cov.events")


@dataclass(frozen=True, slots=True)
class LoggingEventPublisher:
    """Emit event payload summaries to structured logs, tagged with the CLI command."""

    command: str | None = None

    def publish(self, event: DomainEvent) -> None:
        level = logging.WARNING if isinstance(event, EstimationFailed) else logging.INFO
        LOGGER.log(
            level,
            "domain_event_emitted",
            extra={
                "event_name": type(event).__name__,
                "command": self.command,
                "run_id": event.run_id,
                "payload_summary": event.payload_summary,
                "occurred_at": event.occurred_at.isoformat(),
            },
        )

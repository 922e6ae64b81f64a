"""Infrastructure layer: file codecs, manifests and the logging event sink."""

from .logging_event_publisher import LoggingEventPublisher

__all__ = ["LoggingEventPublisher"]

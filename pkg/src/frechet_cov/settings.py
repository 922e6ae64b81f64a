"""Environment-driven runtime settings shared by the CLI and services."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import logging
import os

from .domain.errors import ConfigError

SEED_ENV = "FRECHET_COV_SEED"
THREADS_ENV = "FRECHET_COV_THREADS"
LOG_LEVEL_ENV = "FRECHET_COV_LOG_LEVEL"


@dataclass(frozen=True, slots=True)
class RuntimeSettings:
    seed: int = 0
    threads: int | None = None
    log_level: str = "WARNING"


def _int_env(name: str, minimum: int) -> int | None:
    raw = os.getenv(name, "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}.") from exc
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}.")
    return value


@lru_cache(maxsize=1)
def load_runtime_settings() -> RuntimeSettings:
    seed = _int_env(SEED_ENV, 0)
    threads = _int_env(THREADS_ENV, 1)
    log_level = os.getenv(LOG_LEVEL_ENV, "WARNING").strip().upper() or "WARNING"
    if not isinstance(logging.getLevelName(log_level), int):
        raise ConfigError(f"{LOG_LEVEL_ENV} must name a logging level, got {log_level!r}.")
    return RuntimeSettings(
        seed=0 if seed is None else seed,
        threads=threads or os.cpu_count(),
        log_level=log_level,
    )

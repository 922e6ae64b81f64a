"""Run manifests stored next to each command's primary output."""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path

from frechet_cov.domain.errors import DataFormatError
from frechet_cov.domain.models import CommandName, MANIFEST_SCHEMA_VERSION, RunManifest
from frechet_cov.infrastructure.curve_json import read_json, write_json

MANIFEST_SUFFIX = ".manifest.json"
MANIFEST_KEYS = frozenset(RunManifest.__dataclass_fields__)


def manifest_path_for(output: Path) -> Path:
    return output.with_name(output.name + MANIFEST_SUFFIX)


def write_manifest(output: Path, manifest: RunManifest) -> Path:
    payload = asdict(manifest)
    payload["outputs"] = list(manifest.outputs)
    return write_json(manifest_path_for(output), payload)


def read_manifest(path: Path) -> RunManifest:
    payload = read_json(path)
    unknown = sorted(set(payload) - MANIFEST_KEYS)
    if unknown:
        raise DataFormatError(
            f"Unknown field '{unknown[0]}' in run manifest. Allowed fields: {', '.join(sorted(MANIFEST_KEYS))}."
        )
    if payload.get("schema_version") != MANIFEST_SCHEMA_VERSION:
        raise DataFormatError(
            f"Run manifest has schema_version {payload.get('schema_version')!r}; "
            f"expected {MANIFEST_SCHEMA_VERSION}."
        )
    if payload.get("command") not in {command.value for command in CommandName}:
        raise DataFormatError(f"Run manifest names unknown command {payload.get('command')!r}.")
    try:
        return RunManifest(
            command=str(payload["command"]),
            run_id=str(payload["run_id"]),
            arguments=dict(payload["arguments"]),
            resolved=dict(payload.get("resolved", {})),
            software_version=str(payload.get("software_version", "")),
            outputs=tuple(payload.get("outputs", ())),
            started_at=str(payload.get("started_at", "")),
            wall_time_seconds=float(payload.get("wall_time_seconds", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"Malformed run manifest {path}: {exc}.") from exc

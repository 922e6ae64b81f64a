"""CSV codec for observation and outcome files.

Observation files carry the header ``subject,time,y1,...,yp``; outcome files
carry ``subject,score`` with rows aligned to the observation file. Numbers
are written with 17 significant digits so a read after a write is exact.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from frechet_cov.domain.errors import DataFormatError
from frechet_cov.dyn_cov import ObservationSet
from frechet_cov.varying_coeff import OutcomeSet

OUTCOME_HEADER = ("subject", "score")


def format_number(value: float) -> str:
    return format(float(value), ".17g")


def _subject_labels(data: ObservationSet) -> list[str]:
    if data.subject_ids is None:
        return [str(index) for index in range(data.n)]
    return [str(subject) for subject in data.subject_ids]


def _read_rows(path: Path) -> list[list[str]]:
    if not path.is_file():
        raise DataFormatError(f"Input file not found: {path}")
    with path.open("r", newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle)]
    if not rows:
        raise DataFormatError(f"{path} is empty.", location=1.0)
    return rows


def _parse_float(raw: str, path: Path, line: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise DataFormatError(
            f"{path}:{line}: column '{column}' is not a number: {raw!r}.", location=float(line)
        ) from exc
    if not np.isfinite(value):
        raise DataFormatError(f"{path}:{line}: column '{column}' is not finite.", location=float(line))
    return value


def write_observations(path: Path, data: ObservationSet) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["subject", "time", *(f"y{j}" for j in range(1, data.p + 1))])
        for subject, time, response in zip(_subject_labels(data), data.times, data.responses):
            writer.writerow([subject, format_number(time), *(format_number(v) for v in response)])
    return path


def read_observations(path: Path, domain_end: float | None = None) -> ObservationSet:
    """Parse an observation CSV; ``domain_end`` defaults to the latest time."""

    rows = _read_rows(path)
    header = [cell.strip() for cell in rows[0]]
    expected = ["subject", "time", *(f"y{j}" for j in range(1, len(header) - 1))]
    if len(header) < 3 or header != expected:
        raise DataFormatError(
            f"{path}:1: header must be 'subject,time,y1,...,yp', got {','.join(header)!r}.",
            location=1.0,
        )

    subjects: list[str] = []
    times: list[float] = []
    responses: list[list[float]] = []
    for line, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataFormatError(
                f"{path}:{line}: expected {len(header)} columns, got {len(row)}.", location=float(line)
            )
        subjects.append(row[0].strip())
        times.append(_parse_float(row[1], path, line, "time"))
        responses.append([_parse_float(cell, path, line, name) for cell, name in zip(row[2:], header[2:])])

    if len(times) < 2:
        raise DataFormatError(f"{path}: at least two observation rows are required.")
    times_arr = np.asarray(times)
    return ObservationSet(
        times=times_arr,
        responses=np.asarray(responses),
        domain_end=float(times_arr.max()) if domain_end is None else float(domain_end),
        subject_ids=np.asarray(subjects),
    )


def write_outcomes(path: Path, data: ObservationSet, outcomes: OutcomeSet) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(OUTCOME_HEADER)
        for subject, score in zip(_subject_labels(data), outcomes.scores):
            writer.writerow([subject, format_number(score)])
    return path


def read_outcomes(path: Path, data: ObservationSet, baseline: float = 100.0) -> OutcomeSet:
    """Parse an outcome CSV whose rows must match ``data`` subject by subject."""

    rows = _read_rows(path)
    if tuple(cell.strip() for cell in rows[0]) != OUTCOME_HEADER:
        raise DataFormatError(f"{path}:1: header must be 'subject,score'.", location=1.0)
    body = [(line, row) for line, row in enumerate(rows[1:], start=2) if row]
    if len(body) != data.n:
        raise DataFormatError(
            f"{path}: {len(body)} outcome rows for {data.n} observations."
        )
    labels = _subject_labels(data)
    scores = []
    for (line, row), expected in zip(body, labels):
        if len(row) != 2:
            raise DataFormatError(f"{path}:{line}: expected 2 columns, got {len(row)}.", location=float(line))
        if row[0].strip() != expected:
            raise DataFormatError(
                f"{path}:{line}: subject {row[0].strip()!r} does not match observation subject {expected!r}.",
                location=float(line),
            )
        scores.append(_parse_float(row[1], path, line, "score"))
    return OutcomeSet(scores=np.asarray(scores), baseline=baseline)

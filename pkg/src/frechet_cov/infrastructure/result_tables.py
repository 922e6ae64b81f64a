"""CSV tables for mean curves, curve collections and benchmark results."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from frechet_cov.curve_fpca import CurveCollection
from frechet_cov.domain.errors import DataFormatError
from frechet_cov.infrastructure.observation_csv import format_number
from frechet_cov.kernel_smoothing import ScalarCurve
from frechet_cov.sim_engine import BenchResult

BENCH_TABLE_HEADER = (
    "estimator",
    "p",
    "n",
    "design",
    "log_mean_ise",
    "best_bandwidth",
    "replicates",
    "valid_replicates",
)
BENCH_RUNS_HEADER = ("estimator", "p", "n", "design", "replicate", "bandwidth", "ise")
BENCH_PROFILE_HEADER = ("estimator", "p", "n", "design", "bandwidth", "mean_ise", "valid_replicates")


def _writer_rows(path: Path, header: tuple[str, ...] | list[str], rows: list[list[str]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_mean_curves(path: Path, means: tuple[ScalarCurve, ...]) -> Path:
    grid = means[0].grid
    rows = [
        [format_number(t), *(format_number(curve.values[index]) for curve in means)]
        for index, t in enumerate(grid)
    ]
    return _writer_rows(path, ["time", *(f"mu{j}" for j in range(1, len(means) + 1))], rows)


def write_curve_csv(path: Path, collection: CurveCollection) -> Path:
    """One curve per row: ``label`` then one column per grid time."""

    rows = [
        [label, *(format_number(v) for v in curve)]
        for label, curve in zip(collection.labels, collection.curves)
    ]
    return _writer_rows(path, ["label", *(format_number(t) for t in collection.grid)], rows)


def read_curve_csv(path: Path) -> CurveCollection:
    if not path.is_file():
        raise DataFormatError(f"Input file not found: {path}")
    with path.open("r", newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows or rows[0][0].strip() != "label":
        raise DataFormatError(f"{path}:1: header must start with 'label'.", location=1.0)
    try:
        grid = np.asarray([float(cell) for cell in rows[0][1:]])
    except ValueError as exc:
        raise DataFormatError(f"{path}:1: grid times must be numbers.", location=1.0) from exc
    labels: list[str] = []
    curves: list[list[float]] = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != grid.size + 1:
            raise DataFormatError(
                f"{path}:{line}: expected {grid.size + 1} columns, got {len(row)}.", location=float(line)
            )
        try:
            curves.append([float(cell) for cell in row[1:]])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{line}: curve values must be numbers.", location=float(line)) from exc
        labels.append(row[0].strip())
    return CurveCollection(grid=grid, curves=np.asarray(curves), labels=tuple(labels))


def write_benchmark_tables(path: Path, result: BenchResult) -> tuple[Path, Path, Path]:
    """Summary table at ``path`` plus ``.runs.csv`` and ``.profile.csv`` siblings.

    The runs file holds per-replicate ISE at each cell's selected bandwidth;
    the profile file holds mean ISE and defined-replicate counts per bandwidth.
    """

    summary_rows = []
    run_rows = []
    profile_rows = []
    for row in result.rows:
        cell = [row.estimator.value, str(row.p), str(row.n), row.design.value]
        summary_rows.append(
            [
                *cell,
                format_number(row.log_mean_ise),
                format_number(row.best_bandwidth),
                str(row.replicates),
                str(int(row.valid_counts[row.best_index])),
            ]
        )
        for replicate, value in enumerate(row.best_run_ise):
            run_rows.append([*cell, str(replicate), format_number(row.best_bandwidth), format_number(value)])
        for h, mean, count in zip(result.bandwidths, row.mean_ise, row.valid_counts):
            profile_rows.append([*cell, format_number(h), format_number(mean), str(int(count))])

    runs_path = path.with_name(f"{path.stem}.runs.csv")
    profile_path = path.with_name(f"{path.stem}.profile.csv")
    return (
        _writer_rows(path, BENCH_TABLE_HEADER, summary_rows),
        _writer_rows(runs_path, BENCH_RUNS_HEADER, run_rows),
        _writer_rows(profile_path, BENCH_PROFILE_HEADER, profile_rows),
    )

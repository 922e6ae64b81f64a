from pathlib import Path
import json

import numpy as np
import pytest
import typer
from typer.testing import CliRunner

from frechet_cov.cli import app
from frechet_cov.domain.errors import ConfigError
from frechet_cov.infrastructure.curve_json import matrix_curve_from_dict, read_json, write_json
from frechet_cov.infrastructure.manifest_store import manifest_path_for, read_manifest
from frechet_cov.infrastructure.result_tables import BENCH_TABLE_HEADER
from frechet_cov.interfaces import cli_handlers
from frechet_cov.settings import load_runtime_settings

runner = CliRunner()


@pytest.fixture(autouse=True)
def single_thread_settings(monkeypatch):
    monkeypatch.setenv("FRECHET_COV_THREADS", "1")
    monkeypatch.delenv("FRECHET_COV_SEED", raising=False)
    load_runtime_settings.cache_clear()
    yield
    load_runtime_settings.cache_clear()


def _simulate(tmp_path: Path, payload: dict, **kwargs) -> tuple[Path, list[Path]]:
    config = write_json(tmp_path / "sim.json", payload)
    output = tmp_path / "obs.csv"
    return config, cli_handlers.simulate_to_path(config, output, **kwargs)


def test_simulate_writes_observations_outcomes_truth_and_manifest(tmp_path: Path) -> None:
    _, written = _simulate(tmp_path, {"p": 2, "n": 50, "seed": 3, "vcm": {}}, truth_points=11)

    assert [path.name for path in written] == ["obs.csv", "obs.config.json", "obs.outcomes.csv", "obs.truth.json"]
    header = (tmp_path / "obs.csv").read_text().splitlines()[0]
    assert header == "subject,time,y1,y2"
    truth = read_json(tmp_path / "obs.truth.json")
    assert truth["kind"] == "truth" and len(truth["beta"]) == 2 and len(truth["grid"]) == 11
    manifest = read_manifest(manifest_path_for(tmp_path / "obs.csv"))
    assert manifest.command == "simulate"
    assert manifest.resolved["rows"] == 50
    assert manifest.outputs == tuple(str(path) for path in written)


def test_repeated_design_simulation_records_row_count(tmp_path: Path) -> None:
    _simulate(tmp_path, {"p": 2, "n": 30, "seed": 1}, design="REPEATED")

    manifest = read_manifest(manifest_path_for(tmp_path / "obs.csv"))
    rows = (tmp_path / "obs.csv").read_text().splitlines()
    assert manifest.arguments["design"] == "repeated"
    assert manifest.resolved["rows"] == len(rows) - 1 >= 30


def test_fit_writes_curve_and_means_and_replays_bit_identically(tmp_path: Path) -> None:
    _simulate(tmp_path, {"p": 2, "n": 200, "seed": 5})
    output = tmp_path / "fit" / "curve.json"

    written = cli_handlers.fit_from_paths(tmp_path / "obs.csv", output, grid_points=31, h_mean=0.3, seed=4)

    assert written == [output, tmp_path / "fit" / "curve.means.csv"]
    curve = matrix_curve_from_dict(read_json(output))
    assert len(curve) == 31 and curve.psd_flags.all()
    manifest_path = manifest_path_for(output)
    manifest = read_manifest(manifest_path)
    assert manifest.resolved["h_cov"] == curve.bandwidth
    assert {"h1", "h2"} <= set(manifest.resolved)
    assert manifest.arguments["seed"] == 4 and manifest.arguments["threads"] == 1

    before = [path.read_bytes() for path in written]
    replayed = cli_handlers.replay_manifest(manifest_path)

    assert replayed == written
    assert [path.read_bytes() for path in replayed] == before


def test_replay_rejects_arguments_the_command_does_not_accept(tmp_path: Path) -> None:
    _simulate(tmp_path, {"p": 2, "n": 20, "seed": 0})
    manifest_path = manifest_path_for(tmp_path / "obs.csv")
    payload = json.loads(manifest_path.read_text())
    payload["arguments"]["bandwidth"] = 0.2
    manifest_path.write_text(json.dumps(payload))

    with pytest.raises(ConfigError, match="bandwidth"):
        cli_handlers.replay_manifest(manifest_path)


def test_vcm_from_paths_records_fixed_penalty(tmp_path: Path) -> None:
    _simulate(tmp_path, {"p": 2, "n": 300, "seed": 8, "vcm": {}})
    output = tmp_path / "vcm.json"

    cli_handlers.vcm_from_paths(
        tmp_path / "obs.csv",
        tmp_path / "obs.outcomes.csv",
        output,
        grid_points=11,
        h_mean=0.3,
        h_cov=0.3,
        ridge_lambda=0.1,
    )

    payload = read_json(output)
    assert payload["kind"] == "vcm_fit" and payload["ridge_lambda"] == 0.1
    assert len(payload["beta"]) == 2 and len(payload["r_squared"]) == 11
    assert read_manifest(manifest_path_for(output)).resolved["h_gamma"] == 0.3


def test_fpca_of_correlation_curve_summarizes_each_pair(tmp_path: Path) -> None:
    _simulate(tmp_path, {"p": 3, "n": 250, "seed": 2})
    curve = tmp_path / "corr.json"
    cli_handlers.fit_from_paths(
        tmp_path / "obs.csv", curve, grid_points=21, h_mean=0.3, h_cov=0.3, correlation=True
    )
    output = tmp_path / "fpca.json"

    cli_handlers.fpca_from_paths(curve, output, components=2)

    payload = read_json(output)
    assert [entry["label"] for entry in payload["scores"]] == ["1-2", "1-3", "2-3"]
    assert sorted(payload["quantile_bands"]) == ["0.25", "0.5", "0.75"]
    assert payload["fve"][0] >= payload["fve"][1]


def test_benchmark_smoke_profile_writes_three_tables(tmp_path: Path) -> None:
    output = tmp_path / "bench.csv"

    written = cli_handlers.benchmark_to_path(output, profile="smoke", sizes=[100], seed=2)

    assert [path.name for path in written] == ["bench.csv", "bench.runs.csv", "bench.profile.csv"]
    summary = output.read_text().splitlines()
    assert summary[0] == ",".join(BENCH_TABLE_HEADER)
    assert [line.split(",")[0] for line in summary[1:]] == ["nw", "lf"]
    runs = (tmp_path / "bench.runs.csv").read_text().splitlines()
    assert len(runs) == 1 + 2 * 2
    manifest = read_manifest(manifest_path_for(output))
    assert manifest.arguments["sizes"] == [100] and manifest.arguments["estimators"] == "nw,lf"


def test_score_reads_curve_and_config(tmp_path: Path) -> None:
    config, _ = _simulate(tmp_path, {"p": 2, "n": 200, "seed": 6})
    curve = tmp_path / "curve.json"
    cli_handlers.fit_from_paths(
        tmp_path / "obs.csv", curve, grid_points=25, grid_start=0.05, grid_end=0.7, h_mean=0.3, h_cov=0.3
    )

    value = cli_handlers.score_from_paths(curve, config)

    assert np.isfinite(value) and value > 0.0
    result = runner.invoke(app, ["benchmark", "--score", str(curve), "--sim-config", str(config)])
    assert result.exit_code == 0
    assert result.output.strip() == f"ISE: {value:.17g}"


def test_cli_maps_error_families_to_exit_codes(tmp_path: Path) -> None:
    bad_config = write_json(tmp_path / "bad.json", {"p": 2, "n": 10, "bandwith": 0.1})
    rank_one = tmp_path / "curves.csv"
    rank_one.write_text("label,0,0.5,1\na,1,2,3\nb,2,4,6\nc,3,6,9\n")

    config_error = runner.invoke(app, ["simulate", "--config", str(bad_config), "--output", str(tmp_path / "x.csv")])
    data_error = runner.invoke(app, ["fit", str(tmp_path / "missing.csv"), "--output", str(tmp_path / "c.json")])
    numerical_error = runner.invoke(app, ["fpca", str(rank_one), "--output", str(tmp_path / "f.json"), "-k", "2"])

    assert config_error.exit_code == 2 and "error[config_error]" in config_error.output
    assert data_error.exit_code == 3 and "error[data_format_error]" in data_error.output
    assert numerical_error.exit_code == 4 and "error[rank_deficient]" in numerical_error.output


def test_cli_rejects_conflicting_bandwidth_flags(tmp_path: Path) -> None:
    result = runner.invoke(
        app,
        ["fit", str(tmp_path / "obs.csv"), "--output", str(tmp_path / "c.json"), "--h-cov", "0.2", "--select-bandwidth"],
    )

    assert result.exit_code == 2


def test_cli_fit_prints_written_paths(tmp_path: Path) -> None:
    _simulate(tmp_path, {"p": 2, "n": 120, "seed": 9})
    output = tmp_path / "curve.json"

    result = runner.invoke(
        app,
        ["fit", str(tmp_path / "obs.csv"), "-o", str(output), "--estimator", "NW", "--h-mean", "0.3", "--h-cov", "0.3"],
    )

    assert result.exit_code == 0, result.output
    assert f"Written: {output}" in result.output
    assert read_json(output)["estimator"] == "nw"


def test_option_help_lists_values_from_the_option_enums() -> None:
    commands = typer.main.get_command(app).commands

    def option_help(command: str, name: str) -> str:
        return next(param.help for param in commands[command].params if param.name == name)

    assert option_help("fit", "estimator") == "Covariance estimator: nw, ll, lf or dcov."
    assert option_help("benchmark", "design") == "Sampling design: single or repeated."
    assert option_help("benchmark", "profile") == "Named grid: full, desk or smoke."

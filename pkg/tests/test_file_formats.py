from pathlib import Path
import json

import numpy as np
import pytest

from frechet_cov.curve_fpca import CurveCollection
from frechet_cov.domain.errors import DataFormatError, InvalidObservationsError
from frechet_cov.domain.models import RunManifest
from frechet_cov.dyn_cov import MatrixCurve, ObservationSet
from frechet_cov.estimation_options import Estimator
from frechet_cov.infrastructure.curve_json import (
    matrix_curve_from_dict,
    matrix_curve_to_dict,
    read_curve_collection,
    read_json,
    truth_to_dict,
)
from frechet_cov.infrastructure.manifest_store import manifest_path_for, read_manifest, write_manifest
from frechet_cov.infrastructure.observation_csv import (
    read_observations,
    read_outcomes,
    write_observations,
    write_outcomes,
)
from frechet_cov.infrastructure.result_tables import read_curve_csv, write_curve_csv
from frechet_cov.sim_engine import SimConfig, true_cov_stack
from frechet_cov.varying_coeff import OutcomeSet


def _observations() -> ObservationSet:
    rng = np.random.default_rng(3)
    return ObservationSet(
        times=np.sort(rng.uniform(0.0, 1.0, 6)),
        responses=rng.normal(size=(6, 2)) / 3.0,
        domain_end=1.0,
        subject_ids=np.array(["s1", "s1", "s2", "s3", "s3", "s4"]),
    )


def test_observation_csv_preserves_every_bit(tmp_path: Path) -> None:
    data = _observations()
    path = write_observations(tmp_path / "obs.csv", data)

    loaded = read_observations(path, domain_end=1.0)

    assert np.array_equal(loaded.times, data.times)
    assert np.array_equal(loaded.responses, data.responses)
    assert loaded.subject_ids.tolist() == data.subject_ids.tolist()
    assert read_observations(path).domain_end == data.times.max()


def test_observation_csv_reports_offending_line(tmp_path: Path) -> None:
    path = tmp_path / "obs.csv"
    path.write_text("subject,time,y1\na,0.1,1.0\nb,0.2,oops\n")

    with pytest.raises(DataFormatError) as caught:
        read_observations(path)

    assert caught.value.location == 3.0
    assert "y1" in str(caught.value)


def test_observation_csv_rejects_bad_header_and_out_of_domain_times(tmp_path: Path) -> None:
    header = tmp_path / "header.csv"
    header.write_text("id,time,y1\na,0.1,1\nb,0.2,2\n")
    domain = tmp_path / "domain.csv"
    domain.write_text("subject,time,y1\na,0.1,1\nb,0.9,2\n")

    with pytest.raises(DataFormatError):
        read_observations(header)
    with pytest.raises(InvalidObservationsError):
        read_observations(domain, domain_end=0.5)


def test_outcomes_must_match_observation_subjects(tmp_path: Path) -> None:
    data = _observations()
    outcomes = OutcomeSet(scores=np.linspace(95.0, 105.0, 6))
    path = write_outcomes(tmp_path / "outcomes.csv", data, outcomes)

    assert np.array_equal(read_outcomes(path, data).scores, outcomes.scores)

    lines = path.read_text().splitlines()
    lines[2] = "s9," + lines[2].split(",")[1]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(DataFormatError) as caught:
        read_outcomes(path, data)
    assert caught.value.location == 3.0


def test_matrix_curve_json_restores_curve_and_rejects_unknown_fields(tmp_path: Path) -> None:
    grid = np.linspace(0.1, 0.9, 4)
    curve = MatrixCurve(
        grid=grid,
        matrices=true_cov_stack(SimConfig.draw(3, 10, seed=1), grid),
        estimator=Estimator.DCOV_SQRT,
        bandwidth=0.25,
        psd_flags=np.ones(4, dtype=bool),
        mean_bandwidth=0.3,
    )
    payload = json.loads(json.dumps(matrix_curve_to_dict(curve, "curve.json.manifest.json")))

    restored = matrix_curve_from_dict(payload)

    assert np.array_equal(restored.matrices, curve.matrices)
    assert restored.estimator is Estimator.DCOV_SQRT and restored.mean_bandwidth == 0.3
    with pytest.raises(DataFormatError, match="colour"):
        matrix_curve_from_dict({**payload, "colour": "red"})
    with pytest.raises(DataFormatError):
        matrix_curve_from_dict({**payload, "schema_version": 2})
    with pytest.raises(DataFormatError):
        matrix_curve_from_dict({**payload, "dimension": 2})


def test_truth_document_flattens_model_matrices() -> None:
    config = SimConfig.draw(2, 10, seed=0)
    grid = np.linspace(0.0, 1.0, 3)

    payload = truth_to_dict(config, grid)

    assert payload["beta"] is None
    assert np.array_equal(np.asarray(payload["matrices"]).reshape(3, 2, 2), true_cov_stack(config, grid))
    assert len(payload["mean"]) == 2


def test_curve_csv_feeds_curve_collections(tmp_path: Path) -> None:
    collection = CurveCollection(
        grid=np.array([0.0, 0.5, 1.0]),
        curves=np.array([[1.0, 2.0, 3.0], [0.5, 0.25, 0.125]]),
        labels=("left", "right"),
    )
    path = write_curve_csv(tmp_path / "curves.csv", collection)

    loaded = read_curve_collection(path)

    assert loaded.labels == ("left", "right")
    assert np.array_equal(loaded.curves, collection.curves)
    path.write_text("label,0,1\na,1\n")
    with pytest.raises(DataFormatError) as caught:
        read_curve_csv(path)
    assert caught.value.location == 2.0


def test_json_reader_reports_syntax_errors(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text('{\n  "p": 2,\n  "n": \n}\n')

    with pytest.raises(DataFormatError) as caught:
        read_json(path)

    assert caught.value.location == 4.0


def test_manifest_is_written_next_to_output_and_validated(tmp_path: Path) -> None:
    output = tmp_path / "curve.json"
    manifest = RunManifest(
        command="fit",
        run_id="r1",
        arguments={"data": "obs.csv", "output": str(output)},
        resolved={"h_cov": 0.2},
        software_version="0.1.0",
        outputs=(str(output),),
    )

    path = write_manifest(output, manifest)

    assert path == manifest_path_for(output) == tmp_path / "curve.json.manifest.json"
    assert read_manifest(path) == manifest
    payload = json.loads(path.read_text())
    payload["command"] = "master"
    path.write_text(json.dumps(payload))
    with pytest.raises(DataFormatError, match="master"):
        read_manifest(path)

import json
import os

import pytest

from plthick.cli import (
    PipelineConfig,
    canonical_json,
    complex_from_obj,
    complex_to_obj,
    geometric_map_from_obj,
    geometric_map_to_obj,
    main,
    run_pipeline,
)
from plthick.errors import ValidationError
from plthick.fixtures import FIXTURE_NAMES, fixture
from plthick.geometry import sample_general_position_map


# -- serialization ------------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_complex_round_trip_is_byte_exact(name):
    X = fixture(name)
    blob = canonical_json(complex_to_obj(X))
    Y = complex_from_obj(json.loads(blob.decode()))
    assert Y == X
    assert canonical_json(complex_to_obj(Y)) == blob


def test_geometric_map_round_trip():
    X = fixture("boundary_delta3")
    m = sample_general_position_map(X, 3, seed=5)
    blob = canonical_json(geometric_map_to_obj(m))
    m2 = geometric_map_from_obj(json.loads(blob.decode()))
    assert m2.points == m.points
    assert canonical_json(geometric_map_to_obj(m2)) == blob


def test_non_reduced_rational_rejected_in_map():
    obj = {"n": 1, "vertices": [{"id": "a", "coords": ["2/4"]}],
           "simplices": [["a"]]}
    with pytest.raises(ValidationError):
        geometric_map_from_obj(obj)


def test_missing_vertex_reference_rejected():
    obj = {"vertices": [{"id": "a"}], "simplices": [["a", "b"]]}
    with pytest.raises(ValidationError):
        complex_from_obj(obj)


# -- CLI surface ------------------------------------------------------------------

def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_validate_subcommand(capsys):
    code, obj = run_cli(capsys, "validate", "fixture:boundary_delta3")
    assert code == 0
    assert obj["counts"] == {"0": 4, "1": 6, "2": 4}


def test_check_subcommand_reports_links(capsys):
    code, obj = run_cli(capsys, "check", "fixture:pinched_spheres")
    assert code == 0
    assert obj["isolated_singularities"] is True
    assert obj["vertex_links"]["a"]["components"] == 2


def test_orient_subcommand_witness(capsys):
    code, obj = run_cli(capsys, "orient", "fixture:projective_plane_6")
    assert code == 0
    assert obj["orientable"] is False
    assert len(obj["odd_cycle"]) >= 4


def test_homology_subcommand_relative(capsys):
    code, obj = run_cli(capsys, "homology", "fixture:four_cycle_cone",
                        "--rel", "boundary")
    assert code == 0
    assert obj["betti"][2] == 1


def test_spine_subcommand(capsys):
    code, obj = run_cli(capsys, "spine", "fixture:boundary_delta3")
    assert code == 0
    assert obj["first_betti"] == 3


def test_links_subcommand(capsys):
    code, obj = run_cli(capsys, "links", "fixture:torus_7")
    assert code == 0
    assert all(entry["kind"] == "Circle" for entry in obj.values())


def test_embed_subcommand(capsys):
    code, obj = run_cli(capsys, "embed", "fixture:single_triangle", "--seed", "3")
    assert code == 0
    assert obj["general_position"] is True
    assert obj["singular_dim"] == -1


def test_error_object_for_bad_input(capsys):
    code, obj = run_cli(capsys, "thicken", "fixture:single_edge")
    assert code == 1
    assert obj["error"]["stage"] == "validate"
    assert "d >= 2 required" in obj["error"]["message"]


def test_subdivide_subcommand(capsys):
    code, obj = run_cli(capsys, "subdivide", "fixture:single_edge")
    assert code == 0
    assert len(obj["vertices"]) == 3


def test_close_budget_error(capsys, pipeline_cache):
    out, _ = pipeline_cache("single_triangle", 0)
    import tempfile
    with tempfile.NamedTemporaryFile("wb", suffix=".json", delete=False) as fh:
        fh.write(canonical_json(complex_to_obj(out.P)))
        path = fh.name
    try:
        code, obj = run_cli(capsys, "close", path, "--budget", "1000")
        assert code == 1
        assert obj["error"]["type"] == "BudgetExceededError"
    finally:
        os.unlink(path)


def test_thread_env_validation(capsys, monkeypatch):
    monkeypatch.setenv("PLTHICK_THREADS", "0")
    code, obj = run_cli(capsys, "validate", "fixture:single_edge")
    assert code == 1
    assert "PLTHICK_THREADS" in obj["error"]["message"]

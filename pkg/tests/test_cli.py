"""End-to-end CLI behavior: outputs, exit codes, schemas, cache determinism."""

import json
from pathlib import Path

import jsonschema
import pytest
from click.testing import CliRunner

from spflab.cli import main

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schemas"


def _schema(name):
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())


@pytest.fixture()
def run(tmp_path):
    runner = CliRunner()

    def invoke(*args, expect=0):
        argv = ["--cache-dir", str(tmp_path)] + list(args)
        result = runner.invoke(main, argv)
        assert result.exit_code == expect, result.output
        return result

    return invoke


def _json_of(result):
    return json.loads(result.output)


def test_parse_text_and_json(run):
    res = run("parse", "twist(S^2, 1)")
    assert "canonical: twist(S^2, 1)" in res.output
    assert "degree: 4" in res.output
    assert "seed: 20240801" in res.output

    res = run("--json", "parse", "twist(S^2, 1)")
    data = _json_of(res)
    jsonschema.validate(data, _schema("parse"))
    assert data["canonical"] == "twist(S^2, 1)"
    assert data["degree"] == 4
    assert data["seed"] == 20240801


def test_parse_error_exit_code(run):
    res = run("parse", "S^2 ^", expect=2)
    assert "parse error" in res.output


def test_unsupported_prime_rejected(run):
    run("--p", "4", "parse", "I", expect=2)


def test_ext_identity(run):
    res = run("--json", "ext", "I", "I")
    data = _json_of(res)
    jsonschema.validate(data, _schema("ext"))
    assert data["dims"] == [1, 0, 0, 0, 0]


def test_ext_twisted_identity(run):
    res = run("--json", "ext", "frob(1)", "frob(1)")
    data = _json_of(res)
    jsonschema.validate(data, _schema("ext"))
    assert data["dims"] == [1, 0, 1, 0, 0]


def test_ext_degree_mismatch_is_usage_error(run):
    run("ext", "S^2", "S^3", expect=2)


def test_ext_text_and_json_report_identical_numbers(run):
    text = run("ext", "frob(1)", "frob(1)").output
    data = _json_of(run("--json", "ext", "frob(1)", "frob(1)"))
    for i, dim in enumerate(data["dims"]):
        assert f"i = {i}: dim {dim}" in text


def test_guard_refusal_exit_code(run):
    run("--guard-dim", "2", "ext", "S^2", "S^2", expect=3)


def test_coresolve(run):
    res = run("--json", "coresolve", "frob(1)")
    data = _json_of(res)
    jsonschema.validate(data, _schema("coresolve"))
    assert data["terms"] == [3, 4, 3, 0, 0]
    assert data["homology"] == [2, 0, 0, 0, 0]


def test_formality(run):
    res = run("--json", "formality", "I")
    data = _json_of(res)
    jsonschema.validate(data, _schema("formality"))
    assert data["verdict"] == "even-concentration"
    assert [e["hom_dim"] for e in data["degrees"]] == [2, 0, 2]


def test_formality_requires_p2(run):
    run("--p", "3", "formality", "I", expect=2)


def test_hyperext_alpha(run):
    res = run("--json", "--imax", "3", "hyperext", "S^2", "G^2", "frob(1)", "--map", "alpha")
    data = _json_of(res)
    jsonschema.validate(data, _schema("hyperext"))
    assert data["collapsed_from_2"] is False
    assert data["total_homology"] == {"0": 1, "3": 1}
    assert data["page2"] == {"(0,0)": 1, "(0,1)": 1, "(2,0)": 1, "(2,1)": 1}


def test_hyperext_zero_map_collapses(run):
    res = run("--json", "--imax", "2", "hyperext", "S^2", "G^2", "frob(1)", "--map", "zero")
    data = _json_of(res)
    jsonschema.validate(data, _schema("hyperext"))
    assert data["collapsed_from_2"] is True


def test_check_suite(run):
    res = run("--json", "check", "exponential")
    data = _json_of(res)
    jsonschema.validate(data, _schema("check"))
    assert data["ok"] is True
    assert all(r["ok"] for r in data["suites"]["exponential"])


def test_check_polarization_suite(run):
    res = run("check", "polarization")
    assert "all checks passed" in res.output


def test_cache_written_and_runs_are_byte_identical(tmp_path):
    runner = CliRunner()
    argv = ["--cache-dir", str(tmp_path), "--json", "ext", "frob(1)", "frob(1)"]
    cold = runner.invoke(main, argv)
    assert cold.exit_code == 0
    cache_files = list(tmp_path.glob("*.sc"))
    assert cache_files, "structure-constant cache was not persisted"
    warm = runner.invoke(main, argv)
    assert warm.exit_code == 0
    assert warm.output == cold.output
    # a run against a fresh cache directory reports the same bytes
    other = tmp_path / "fresh"
    fresh = runner.invoke(
        main, ["--cache-dir", str(other), "--json", "ext", "frob(1)", "frob(1)"]
    )
    assert fresh.exit_code == 0
    assert fresh.output == cold.output


def test_seed_flag_round_trips(run):
    res = run("--seed", "7", "parse", "I")
    assert "seed: 7" in res.output
    data = _json_of(run("--seed", "7", "--json", "parse", "I"))
    assert data["seed"] == 7

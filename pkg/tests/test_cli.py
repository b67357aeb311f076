import json

import pytest

from conekit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_check_classical_exit_zero(capsys):
    code, out = run(capsys, "check", "builtin:classical_simplex:d=3")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "Classical"
    assert doc["dim_R"] == 3
    assert doc["model"]["cardinality"] == 3


def test_check_nonclassical_exit_one(capsys):
    code, out = run(capsys, "check", "builtin:gpt_square")
    assert code == 1
    assert json.loads(out)["verdict"] == "NonClassical"


def test_check_with_oracle_agrees(capsys):
    code, out = run(capsys, "check", "builtin:qubit_six_state", "--oracle")
    assert code == 0
    assert json.loads(out)["oracle"]["agrees"]


def test_inspect_and_swap(capsys):
    code, out = run(capsys, "inspect", "builtin:qubit_trine",
                    "--swap-reduced")
    assert code == 0
    doc = json.loads(out)
    assert doc["dim_R"] == doc["dim_R_swapped"] == 3


def test_model_artifact_verifies(tmp_path, capsys):
    art = tmp_path / "model.json"
    code, _ = run(capsys, "model", "builtin:classical_simplex:d=2",
                  "--out", str(art))
    assert code == 0
    code, out = run(capsys, "verify", str(art),
                    "builtin:classical_simplex:d=2")
    assert code == 0
    assert json.loads(out)["ok"]


def test_witness_artifact_verifies_and_mutations_fail(tmp_path, capsys):
    art = tmp_path / "wit.json"
    code, _ = run(capsys, "witness", "builtin:gpt_square", "--witnesses",
                  "--out", str(art))
    assert code == 1
    code, out = run(capsys, "verify", str(art), "builtin:gpt_square")
    assert code == 0 and json.loads(out)["ok"]

    doc = json.loads(art.read_text())
    flipped = tmp_path / "flipped.json"
    mut = json.loads(art.read_text())
    mut["witness"]["coords"] = [_neg(x) for x in doc["witness"]["coords"]]
    flipped.write_text(json.dumps(mut))
    code, out = run(capsys, "verify", str(flipped), "builtin:gpt_square")
    assert code == 1 and not json.loads(out)["ok"]

    scaled = tmp_path / "scaled.json"
    mut = json.loads(art.read_text())
    coords = doc["witness"]["coords"]
    k = max(range(len(coords)), key=lambda i: abs(_f(coords[i])))
    mut["witness"]["coords"][k] = _neg(_scale(coords[k], 5))
    scaled.write_text(json.dumps(mut))
    code, out = run(capsys, "verify", str(scaled), "builtin:gpt_square")
    assert code == 1 and not json.loads(out)["ok"]


def _f(x):
    from fractions import Fraction
    return float(Fraction(x)) if isinstance(x, str) else float(x)


def _neg(x):
    from fractions import Fraction
    if isinstance(x, str):
        return str(-Fraction(x))
    return -x


def _scale(x, c):
    from fractions import Fraction
    if isinstance(x, str):
        return str(c * Fraction(x))
    return c * x


def test_wrong_kind_exit_five(capsys):
    assert run(capsys, "witness", "builtin:classical_simplex:d=2")[0] == 5
    assert run(capsys, "model", "builtin:gpt_square")[0] == 5


def test_invalid_input_exit_two(capsys, tmp_path):
    assert run(capsys, "check", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"mode": "quantum"}))
    assert run(capsys, "check", str(bad))[0] == 2


def test_resource_guard_exit_four(capsys, monkeypatch):
    monkeypatch.setenv("CONEKIT_MAX_TENSOR_DIM", "8")
    assert run(capsys, "check", "builtin:qubit_six_state")[0] == 4


def test_approx_and_entangle_exits(capsys):
    code, out = run(capsys, "approx",
                    "builtin:qubit_full:n_state_rays=8,n_effect_rays=8",
                    "--max-level", "3")
    assert code == 1
    assert json.loads(out)["kind"] == "WitnessedNonClassical"
    assert run(capsys, "entangle", "bell")[0] == 1
    assert run(capsys, "entangle", "mixed")[0] == 0


def test_reports_byte_identical_across_threads(tmp_path, capsys):
    outs = []
    for threads in ("1", "8"):
        f = tmp_path / f"r{threads}.json"
        run(capsys, "check", "builtin:qubit_six_state",
            "--threads", threads, "--seed", "0", "--out", str(f))
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]


def test_scenario_file_roundtrip(tmp_path, capsys):
    from conekit.scenario import builtin_scenario, serialize_scenario
    doc = serialize_scenario(builtin_scenario("gpt_square"))
    f = tmp_path / "sq.json"
    f.write_text(json.dumps(doc))
    code, out = run(capsys, "check", str(f))
    assert code == 1
    assert json.loads(out)["verdict"] == "NonClassical"


def test_float_flag_forces_float_pipeline(capsys):
    code, out = run(capsys, "check", "builtin:qubit_six_state", "--float")
    assert code == 0
    assert json.loads(out)["exact"] is False


def test_exact_flag_rejects_float_scenario(capsys):
    assert run(capsys, "check", "builtin:qubit_trine", "--exact")[0] == 2

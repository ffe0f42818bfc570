import json
import subprocess
import sys

import numpy as np
import pytest

from clarklab import monomial
from clarklab.cli import run


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def out_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_clark_square(tmp_path, capsys):
    th = write(tmp_path, "th.json", monomial(2).to_json())
    assert run(["clark", "--theta", th, "--c", "0.0"]) == 0
    atoms = out_json(capsys)["atoms"]
    assert sorted(a["arg_over_2pi"] for a in atoms) == pytest.approx([0.0, 0.5])
    assert [a["weight"] for a in atoms] == pytest.approx([0.5, 0.5])


def test_from_measure_point_mass(tmp_path, capsys):
    mu = write(tmp_path, "mu.json", {"atoms": [{"arg_over_2pi": 0.0, "weight": 1.0}]})
    assert run(["from-measure", "--mu", mu]) == 0
    doc = out_json(capsys)
    assert len(doc["zeros"]) == 1 and doc["zeros"][0] == {"re": 0.0, "im": 0.0}
    assert doc["front_constant_arg_over_2pi"] == pytest.approx(0.0, abs=1e-12)


def test_example_and_verify(tmp_path, capsys):
    out = str(tmp_path / "inst.json")
    assert run(["example", "crofoot", "--degree", "3", "--lambda", "0.5", "0", "--out", out]) == 0
    assert run(["verify", "--instance", out, "--n-sweep", "100"]) == 0
    rep = out_json(capsys)
    assert rep["passed"] and len(rep["reports"]) == 1


def test_example_clark_weight(capsys):
    assert run(["example", "clark-weight", "--degree", "2", "--phi", "1,2"]) == 0
    doc = out_json(capsys)
    assert doc["kind"] == "clark_weight" and doc["dim"] == 2


def test_tampered_instance_fails(tmp_path, capsys):
    assert run(["random", "--degree", "3", "--kind", "crofoot", "--seed", "1"]) == 0
    doc = out_json(capsys)
    doc["T"][1][0] += 1e-3
    path = write(tmp_path, "bad.json", doc)
    assert run(["verify", "--instance", path, "--suite", "core"]) == 1
    assert "FAIL" in capsys.readouterr().err


def test_bad_input_exit_two(tmp_path, capsys):
    assert run(["clark", "--theta", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["from-measure", "--mu", str(bad)]) == 2
    assert run(["random", "--degree", "3", "--kind", "nope", "--seed", "1"]) == 2
    assert run(["frobnicate"]) == 2
    th = write(tmp_path, "th.json", {"zeros": [{"re": 0.5, "im": 0.0}]})
    assert run(["clark", "--theta", th]) == 2
    assert "error" in capsys.readouterr().err


def test_sweep_csv(tmp_path, capsys):
    op = write(tmp_path, "op.json", {"rows": 2, "cols": 2,
                                     "matrix": [[1, 0], [-2, 0], [0, 0], [-1, 0]]})
    csv_path = tmp_path / "n.csv"
    assert run(["sweep", "--operator", op, "--n", "10", "--csv", str(csv_path)]) == 0
    doc = out_json(capsys)
    assert doc["m_plus"] == pytest.approx(1 + np.sqrt(2))
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "n,norm_plus,norm_minus" and len(lines) == 12


def test_sweep_of_instance(tmp_path, capsys):
    assert run(["random", "--degree", "2", "--kind", "triangular", "--seed", "3"]) == 0
    path = write(tmp_path, "t.json", out_json(capsys))
    assert run(["sweep", "--operator", path, "--n", "20"]) == 0
    assert out_json(capsys)["n_sweep"] == 20
    assert run(["sweep", "--operator", write(tmp_path, "x.json", {"a": 1})]) == 2


def test_random_is_reproducible(capsys):
    run(["random", "--degree", "4", "--kind", "clark_weight", "--seed", "9"])
    a = capsys.readouterr().out
    run(["random", "--degree", "4", "--kind", "clark_weight", "--seed", "9"])
    assert capsys.readouterr().out == a


def test_manifest_parallel_matches_serial(tmp_path, capsys):
    man = write(tmp_path, "m.json", {"instances": [
        {"kind": "crofoot", "degree": 2, "seed": 0},
        {"kind": "triangular", "degree": 3, "seed": 1},
    ]})
    assert run(["verify", "--manifest", man, "--n-sweep", "100"]) == 0
    serial = capsys.readouterr().out
    assert run(["verify", "--manifest", man, "--n-sweep", "100", "--jobs", "2"]) == 0
    assert capsys.readouterr().out == serial


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "clarklab", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "verify" in out.stdout

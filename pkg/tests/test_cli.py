import json

import numpy as np
import pytest

from rdmaps.channels import channel_to_json, example_e1, qutrit_mu
from rdmaps.cli import main
from rdmaps.numerics import encode_matrix
from rdmaps.states import bell_state, ket_density, random_cq, state_to_json


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_classify_e1(tmp_path, capsys):
    f = _write(tmp_path / "e1.json", channel_to_json(example_e1()))
    assert main(["classify", f, "--destroyer", "dephasing", "--remixes", "20"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["conditions"]["selective_nongenerating"]["verdict"] == "witnessed"
    assert rep["conditions"]["commuting"]["verdict"] == "fail"
    assert rep["config"]["seed"] == 0
    assert set(rep["versions"]) == {"rdmaps", "numpy", "python"}


def test_classify_mu_embeds_on_a(tmp_path):
    f = _write(tmp_path / "mu.json", channel_to_json(qutrit_mu()))
    out = tmp_path / "rep.json"
    code = main(["classify", f, "--destroyer", "discord", "--dims", "3,3", "--samples", "40",
                 "--remixes", "5", "--out", str(out)])
    assert code == 0
    ng = json.loads(out.read_text())["conditions"]["nongenerating"]
    assert ng["verdict"] == "fail"
    assert np.array(ng["witness"]).shape == (9, 9, 2)


def test_classify_output_is_reproducible(tmp_path):
    f = _write(tmp_path / "e1.json", channel_to_json(example_e1()))
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        main(["classify", f, "--destroyer", "dephasing", "--remixes", "10", "--seed", "3", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize(
    "state, destroyer, measure, expected",
    [
        (bell_state(), "discord", "relative-entropy", "1.000000000000"),
        (ket_density([1, 1]), "dephasing", "relative-entropy", "1.000000000000"),
        (ket_density([1, 1]), "dephasing", "trace-distance", "0.500000000000"),
        (random_cq((2, 2), 0), "discord", "relative-entropy", "0.000000000000"),
    ],
)
def test_monotone(tmp_path, capsys, state, destroyer, measure, expected):
    f = _write(tmp_path / "s.json", state_to_json(state))
    assert main(["monotone", f, "--destroyer", destroyer, "--measure", measure]) == 0
    assert capsys.readouterr().out.strip() == expected


def test_extreme_destroyer_from_file(tmp_path, capsys):
    rho0 = _write(tmp_path / "r0.json", state_to_json(ket_density([1, 0])))
    f = _write(tmp_path / "s.json", state_to_json(ket_density([1, 1])))
    assert main(["monotone", f, "--destroyer", f"extreme:{rho0}", "--measure", "trace-distance"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_twirl_destroyer_from_file(tmp_path, capsys):
    group = [np.eye(2), np.diag([1.0, -1.0])]
    g = _write(tmp_path / "g.json", {"unitaries": [encode_matrix(m) for m in group]})
    f = _write(tmp_path / "s.json", state_to_json(ket_density([1, 1])))
    assert main(["monotone", f, "--destroyer", f"twirl:{g}"]) == 0
    assert capsys.readouterr().out.strip() == "1.000000000000"


@pytest.mark.parametrize(
    "content",
    ["{bad json", json.dumps({"label": "x"}), json.dumps({"kraus": [encode_matrix(np.eye(2))] * 2})],
    ids=["malformed", "no-kraus", "trace-increasing"],
)
def test_classify_input_errors_exit_2(tmp_path, capsys, content):
    f = tmp_path / "bad.json"
    f.write_text(content)
    assert main(["classify", str(f), "--destroyer", "dephasing"]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_file_exit_2(capsys):
    assert main(["monotone", "/nonexistent.json", "--destroyer", "dephasing"]) == 2


def test_invalid_state_exit_2(tmp_path):
    f = _write(tmp_path / "s.json", {"matrix": [[[2, 0], [0, 0]], [[0, 0], [0, 0]]]})
    assert main(["monotone", f, "--destroyer", "dephasing"]) == 2


def test_bad_dims_exit_2(tmp_path):
    f = _write(tmp_path / "e1.json", channel_to_json(example_e1()))
    assert main(["classify", f, "--destroyer", "discord", "--dims", "2"]) == 2


def test_scan_csv(tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["scan", "--family", "swap", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "epsilon,value_bits,jump_flag"
    assert sum(r.endswith(",1") for r in rows[1:]) == 1


def test_scan_bad_family_exit_2():
    assert main(["scan", "--family", "nope"]) == 2


def test_paper_suite_small_run(tmp_path, capsys):
    out = tmp_path / "suite.json"
    assert main(["paper-suite", "--samples", "20", "--remixes", "100", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["passed"]
    assert rep["config"]["samples"] == 20
    assert "checks passed" in capsys.readouterr().out

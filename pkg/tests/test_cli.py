import json

import pytest

from sitepercolation.cli import main
from sitepercolation.generators import random_regular
from sitepercolation.graph import read_edge_list


def test_generate_roundtrip(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["generate", "--family", "random-regular", "--n", "50", "--d", "4", "--seed", "3",
                 "--out", str(out)]) == 0
    assert read_edge_list(out) == random_regular(50, 4, seed=3)


def test_generate_from_config(tmp_path):
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"family": "circulant", "n": 10, "d": 4, "offsets": [1, 2], "seed": 0}))
    out = tmp_path / "g.txt"
    assert main(["generate", "--config", str(cfg), "--out", str(out)]) == 0
    assert read_edge_list(out).degree_bound == 4


def test_spectral_json(capsys):
    assert main(["spectral", "--family", "complete", "--n", "30"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lambda"] == pytest.approx(1) and out["d"] == 29 and out["certified"]


def test_run_and_check(tmp_path, capsys):
    rep = tmp_path / "run.json"
    wit = tmp_path / "path.txt"
    assert main(["run", "--family", "random-regular", "--n", "2000", "--d", "10", "--graph-seed", "1",
                 "--epsilon", "0.3", "--side", "subcritical", "--seed", "4", "--out", str(rep),
                 "--witness", str(wit)]) == 0
    data = json.loads(rep.read_text())
    assert data["p"] == pytest.approx(0.07) and data["total_queries"] == 2000
    assert len(wit.read_text().splitlines()) == data["max_stack_global"]
    assert main(["check", "--report", str(rep), "--epsilon", "0.3"]) == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["side"] == "subcritical" and verdict["passed"]


def test_check_failure_exit_code(tmp_path):
    rep = tmp_path / "run.json"
    rep.write_text(json.dumps({"n": 1000, "d": 10, "p": 0.13, "largest_component": 2,
                               "max_stack_global": 1}))
    assert main(["check", "--report", str(rep), "--epsilon", "0.3"]) == 3


def test_enumerate(capsys):
    assert main(["enumerate", "--family", "disjoint-cliques", "--n", "12", "--d", "3", "--m", "4",
                 "--alpha0", "0.2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["total"] == 495 and out["non_expanding"] >= 3


def test_sweep(tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"graph": {"family": "random-regular", "n": 300, "d": 4, "seed": 1},
                               "p_grid": {"center": "1/d", "epsilons": [-0.3]}, "trials": 3}))
    prefix = tmp_path / "res"
    code = main(["sweep", "--config", str(cfg), "--out", str(prefix), "--workers", "1"])
    assert code in (0, 3)
    assert len((tmp_path / "res.csv").read_text().splitlines()) == 4
    summary = json.loads((tmp_path / "res.json").read_text())
    assert code == (0 if summary["all_verdicts_pass"] else 3)


@pytest.mark.parametrize("argv", [
    ["generate", "--family", "random-regular", "--n", "5", "--d", "3"],
    ["run", "--family", "cycle", "--n", "5"],
    ["spectral", "--graph", "/nonexistent/file.txt"],
    ["sweep"],
])
def test_input_errors(argv):
    assert main(argv) == 1


def test_numerical_error(monkeypatch):
    from sitepercolation import cli, spectral

    def boom(*a, **k):
        raise spectral.NumericalError("no convergence", 1.0, 0.5)

    monkeypatch.setattr(cli, "spectral_report", boom)
    assert main(["spectral", "--family", "cycle", "--n", "5"]) == 2

import csv
import json
import subprocess
import sys

import pytest

from supplynet import __version__
from supplynet.cli import main
from supplynet.model import load_network, load_setup


@pytest.fixture()
def setup_file(tmp_path):
    path = tmp_path / "setup.json"
    assert main(["generate-setup", "--n", "10", "--seed", "3", "--out", str(path)]) == 0
    return path


def test_generate_setup(setup_file):
    s = load_setup(setup_file)
    assert s.n == 10 and len(s.demanders) == 5 and s.rng_seed == 3


def test_solve_and_motifs(setup_file, tmp_path, capsys):
    net_path = tmp_path / "net.json"
    assert main(["solve-min-cost", "--setup", str(setup_file), "--out", str(net_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["d"] == 1.0 and out["r"] == 0.0
    assert load_network(net_path).m == out["m"]
    assert main(["motifs", "--network", str(net_path), "--ensemble", "20"]) == 0
    sig = json.loads(capsys.readouterr().out)
    assert len(sig["counts"]) == 13 and len(sig["z"]) == 13 and -1 <= sig["sigma"] <= 1


def test_optimize(setup_file, tmp_path):
    out = tmp_path / "opt"
    argv = ["optimize", "--setup", str(setup_file), "--mmin", "8", "--mmax", "12",
            "--generations", "5", "--pop", "20", "--out", str(out)]
    assert main(argv) == 0
    with open(out / "front.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and list(rows[0]) == ["member_id", "c", "r", "sigma", "m"]
    doc = json.loads((out / "networks.json").read_text())
    assert len(doc["members"]) == len(rows)


def test_experiment_spec_and_run(tmp_path, capsys):
    spec = tmp_path / "e4.yaml"
    assert main(["experiment", "spec", "--kind", "e4", "--template", "--out", str(spec)]) == 0
    text = spec.read_text().replace("ensemble_size: 500", "ensemble_size: 10")
    text = text.replace("t_values: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]", "t_values: [0.1]")
    spec.write_text(text)
    out = tmp_path / "run"
    assert main(["experiment", "run", "--spec", str(spec), "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"scatter.csv", "correlations.csv", "spec.json", "run_manifest.json"}
    assert main(["experiment", "spec", "--kind", "e1"]) == 0
    assert "kind: E1_robustness_signatures" in capsys.readouterr().out


def test_errors_exit_2(tmp_path, capsys):
    assert main(["solve-min-cost", "--setup", str(tmp_path / "missing.json"), "--out", "x"]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("kind: e7\n")
    assert main(["experiment", "run", "--spec", str(bad), "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "supplynet", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout

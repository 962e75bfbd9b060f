import csv
import json
import subprocess
import sys

import pytest

from regresslab import __version__, serialize
from regresslab.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def rental_csv(tmp_path):
    path = tmp_path / "rental.csv"
    assert run("synth", "--kind", "rental", "--out", path) == 0
    return path


@pytest.fixture
def sine_csv(tmp_path):
    path = tmp_path / "sine.csv"
    assert run("synth", "--kind", "sine", "--m", 10, "--seed", 42, "--out", path) == 0
    return path


def test_version(capsys):
    assert run("version") == 0
    assert __version__ in capsys.readouterr().out


def test_fit_rental_and_eval_round_trip(tmp_path, rental_csv):
    out = tmp_path / "fit"
    assert run("fit", "--data", rental_csv, "--label", "rent", "--model", "linear", "--closed-form",
               "--out", out) == 0
    report = json.loads((out / "fit_report.json").read_text())
    coefs = {r["name"]: r["value"] for r in report["coefficients"]}
    slope = [v for k, v in coefs.items() if k != "bias"][0]
    assert abs(slope - 82.6) <= 0.1
    assert abs(coefs["bias"] - 228.4) <= 0.5
    metrics_path = tmp_path / "m.json"
    assert run("eval", "--model", out / "model.json", "--data", rental_csv, "--out", metrics_path) == 0
    loss = json.loads(metrics_path.read_text())["loss"]
    assert abs(loss - report["final_loss"]) <= 1e-12 * max(1.0, abs(report["final_loss"]))


@pytest.mark.parametrize("extra", [
    ["--model", "lbfm", "--degree", "3", "--closed-form"],
    ["--model", "lbfm", "--basis", "rbf", "--n-basis", "5", "--closed-form"],
    ["--model", "kernel-ridge", "--kernel", "rbf", "--sigma", "0.3", "--lambda", "1e-3"],
    ["--model", "mlp", "--hidden", "5", "--lr", "0.1", "--iters", "200"],
    ["--model", "linear", "--gd", "--lr", "0.1", "--iters", "500", "--penalty", "l2", "--lambda", "0.01"],
])
def test_fit_regression_models(tmp_path, sine_csv, extra):
    out = tmp_path / "o"
    assert run("fit", "--data", sine_csv, *extra, "--out", out) == 0
    assert (out / "model.json").exists()
    report = serialize.load(out / "fit_report.json")
    assert report["final_loss"] >= 0
    assert run("eval", "--model", out / "model.json", "--data", sine_csv, "--out", tmp_path / "m.json") == 0


@pytest.mark.parametrize("model", ["logistic", "softmax"])
@pytest.mark.parametrize("method", ["--closed-form", "--gd"])
def test_fit_classifiers(tmp_path, model, method):
    data = tmp_path / "g.csv"
    assert run("synth", "--kind", "two-gaussians", "--m", 50, "--seed", 1, "--out", data) == 0
    out = tmp_path / "o"
    assert run("fit", "--data", data, "--label-kind", "class", "--model", model, method, "--out", out) == 0
    m = tmp_path / "m.json"
    assert run("eval", "--model", out / "model.json", "--data", data, "--label-kind", "class", "--out", m) == 0
    report = json.loads(m.read_text())
    assert report["accuracy"] > 0.75 and 0.5 < report["auc"] <= 1.0


def test_gd_writes_trace(tmp_path, sine_csv):
    out = tmp_path / "o"
    assert run("fit", "--data", sine_csv, "--model", "linear", "--gd", "--iters", "50", "--out", out) == 0
    rows = read_csv(out / "trace.csv")
    assert rows[0] == ["t", "loss", "eta", "grad_inf_norm"] and len(rows) > 1


def test_config_file(tmp_path):
    cfg = {"seed": 3, "data": {"generator": "sine", "params": {"m": 20}},
           "model": {"kind": "lbfm", "basis": {"kind": "polynomial", "count": 3}},
           "output": {"directory": str(tmp_path / "cfgout")}}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert run("fit", "--config", path) == 0
    assert serialize.load(tmp_path / "cfgout" / "fit_report.json")["seed"] == 3


def test_sweep_degrees(tmp_path, sine_csv, capsys):
    out = tmp_path / "s"
    assert run("sweep", "--data", sine_csv, "--degrees", "0-9", "--cv", "loocv", "--out", out) == 0
    assert "best_degree\t3" in capsys.readouterr().out
    rows = read_csv(out / "cv_scores.csv")
    assert len(rows) == 11 and rows[-1][-1] == "inf"


def test_sweep_l1_path(tmp_path):
    data = tmp_path / "sp.csv"
    assert run("synth", "--kind", "sparse", "--seed", 2, "--out", data) == 0
    out = tmp_path / "s"
    assert run("sweep", "--data", data, "--penalty", "l1", "--out", out) == 0
    rows = read_csv(out / "path.csv")
    header = rows[0]
    assert rows[-1][header.index("nonzero_count")] == "0"
    assert (out / "cv_scores.csv").exists()


def test_sweep_l2_with_grid(tmp_path, sine_csv):
    cfg = {"data": {"path": str(sine_csv)}, "model": {"kind": "linear"},
           "penalty": {"kind": "l2", "grid": [0.1, 10.0, 1.0]}}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert run("sweep", "--config", path, "--out", tmp_path / "s") == 0
    assert len(read_csv(tmp_path / "s" / "path.csv")) == 4


def test_gradcheck_command(tmp_path):
    out = tmp_path / "g.json"
    assert run("gradcheck", "--draws", 5, "--out", out) == 0
    assert json.loads(out.read_text())["all_passed"]


def test_empty_csv_exit_2(tmp_path, capsys):
    data = tmp_path / "e.csv"
    data.write_text("x,y\n")
    assert run("fit", "--data", data, "--out", tmp_path / "o") == 2
    err = capsys.readouterr().err
    assert err.startswith("regresslab: error:") and err.count("\n") == 1


def test_bad_config_exit_2(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"data": {"generator": "sine"}, "model": {"kind": "tree"}}))
    assert run("fit", "--config", path) == 2
    path.write_text("{not json")
    assert run("fit", "--config", path) == 2


def test_divergence_exit_3(tmp_path, rental_csv):
    code = run("fit", "--data", rental_csv, "--label", "rent", "--gd", "--lr", "50", "--out", tmp_path / "o")
    assert code == 3


def test_unknown_subcommand_exit_2():
    proc = subprocess.run([sys.executable, "-m", "regresslab", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_module_entry_point_version():
    proc = subprocess.run([sys.executable, "-m", "regresslab", "version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout


def _fit_bytes(tmp_path, name, env_seed=None, monkeypatch=None):
    data = tmp_path / f"{name}.csv"
    if monkeypatch is not None and env_seed is not None:
        monkeypatch.setenv("REGRESSLAB_SEED", str(env_seed))
    run("synth", "--kind", "sine", "--m", 30, "--seed", 5, "--out", data)
    out = tmp_path / name
    assert run("fit", "--data", data, "--model", "mlp", "--hidden", "4", "--strategy", "minibatch",
               "--batch-size", 7, "--iters", 30, "--seed", 5, "--out", out) == 0
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_determinism_and_env_override(tmp_path, monkeypatch):
    monkeypatch.delenv("REGRESSLAB_SEED", raising=False)
    a = _fit_bytes(tmp_path, "a")
    b = _fit_bytes(tmp_path, "b")
    assert a == b and set(a) == {"model.json", "fit_report.json", "trace.csv"}
    c = _fit_bytes(tmp_path, "c", env_seed=99, monkeypatch=monkeypatch)
    assert c["model.json"] != a["model.json"]
    assert json.loads(c["fit_report.json"])["seed"] == 99

"""Command-line harness: subcommands, overrides, exit codes, artifacts."""
import json
import subprocess
import sys

import pytest

from phlab.cli import main


def _write_config(tmp_path, **extra):
    config = {"model": "heisenberg:n=1", "experiment": "identity-suite",
              "points": 1, "out": str(tmp_path / "out")}
    config.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


def test_list_models_table(capsys):
    assert main(["list", "models"]) == 0
    text = capsys.readouterr().out
    for family in ("heisenberg", "sphere", "quadric", "weighted-sphere",
                   "conformal"):
        assert family in text


def test_list_models_json(capsys):
    assert main(["list", "models", "--json"]) == 0
    catalog = json.loads(capsys.readouterr().out)
    assert [row["family"] for row in catalog] == [
        "heisenberg", "sphere", "quadric", "weighted-sphere", "conformal"]


def test_list_experiments_both_forms(capsys):
    assert main(["list", "experiments"]) == 0
    table = capsys.readouterr().out
    assert main(["list", "experiments", "--json"]) == 0
    catalog = json.loads(capsys.readouterr().out)
    ids = [row["id"] for row in catalog]
    assert len(ids) == 9
    for exp_id in ids:
        assert exp_id in table


def test_run_passing_config(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main(["run", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    out_dir = tmp_path / "out"
    report = json.loads(
        (out_dir / "identity-suite-heisenberg_n_1.json").read_text())
    assert report["summary"]["failed"] == 0
    assert (out_dir / "identity-suite-heisenberg_n_1-residuals.csv").exists()
    assert (out_dir / "identity-suite-heisenberg_n_1-residuals.png").exists()


def test_run_failing_rows_exit_one(tmp_path, capsys):
    cfg = _write_config(tmp_path,
                        tolerances={"second-bianchi": 1e-30},
                        figures=False)
    assert main(["run", str(cfg)]) == 1
    assert "FAIL  second-bianchi" in capsys.readouterr().out


def test_unknown_experiment_exit_two(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main(["run", str(cfg), "--experiment", "bogus"]) == 2
    err = capsys.readouterr().err
    assert "bogus" in err
    assert "identity-suite" in err        # diagnostics name the valid ids


def test_unknown_model_exit_two(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main(["run", str(cfg), "--model", "torus:n=1"]) == 2
    err = capsys.readouterr().err
    assert "torus" in err
    assert "heisenberg:n=1" in err        # diagnostics name valid examples


def test_config_error_paths(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    assert main(["run", str(missing)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 2
    listy = tmp_path / "list.json"
    listy.write_text("[1, 2]")
    assert main(["run", str(listy)]) == 2
    capsys.readouterr()


def test_radii_override_validation(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main(["run", str(cfg), "--radii", "0.2,zebra"]) == 2
    assert "--radii" in capsys.readouterr().err


def test_overrides_reach_report(tmp_path, capsys):
    cfg = _write_config(tmp_path, figures=False)
    out2 = tmp_path / "other"
    code = main(["run", str(cfg), "--experiment", "circle-length",
                 "--radii", "0.2,0.1", "--seed", "3", "--points", "1",
                 "--out", str(out2)])
    assert code == 0
    capsys.readouterr()
    report = json.loads(
        (out2 / "circle-length-heisenberg_n_1.json").read_text())
    assert report["config"]["radii"] == [0.2, 0.1]
    assert report["config"]["seed"] == 3
    assert report["config"]["experiment"] == "circle-length"
    assert (out2 / "circle-length-heisenberg_n_1-circle.csv").exists()


def test_module_entry_point(tmp_path):
    """The module runs as a subprocess console program."""
    proc = subprocess.run(
        [sys.executable, "-m", "phlab.cli", "list", "models", "--json"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["family"] == "heisenberg"

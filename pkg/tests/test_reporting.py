"""Report assembly: determinism, overrides, CSV/JSON/figure emission."""
import csv
import json

import numpy as np
import pytest

import phlab
from phlab import InvalidArgument

ROWS = [
    {"id": "beta", "residual": 2.5e-9, "tolerance": 1e-7, "passed": True,
     "note": "fine"},
    {"id": "alpha", "residual": np.float64(3.0e-6), "tolerance": 1e-5,
     "passed": np.bool_(True)},
    {"id": "alpha-control", "residual": 0.02, "tolerance": 1e-3,
     "passed": True, "note": "negative control: must exceed the floor"},
    {"id": "gamma", "residual": 4.0e-3, "tolerance": 1e-5, "passed": False},
]

CONFIG = {"model": "sphere:n=1", "experiment": "identity-suite", "seed": 0}


def test_build_report_sorts_and_summarizes():
    report = phlab.build_report(CONFIG, ROWS)
    assert [r["id"] for r in report.rows] == ["alpha", "alpha-control",
                                              "beta", "gamma"]
    assert report.summary["rows"] == 4
    assert report.summary["passed"] == 3
    assert report.summary["failed"] == 1
    assert not report.all_passed
    # numpy scalars are converted to plain JSON types
    assert isinstance(report.rows[0]["residual"], float)
    assert isinstance(report.rows[0]["passed"], bool)


def test_build_report_validates_rows():
    with pytest.raises(InvalidArgument):
        phlab.build_report(CONFIG, [{"id": "x", "residual": 1.0}])


def test_report_json_deterministic():
    report = phlab.build_report(CONFIG, ROWS, timestamp="2026-01-01T00:00:00+00:00")
    again = phlab.build_report(CONFIG, ROWS, timestamp="2026-01-01T00:00:00+00:00")
    assert phlab.report_json(report) == phlab.report_json(again)
    doc = json.loads(phlab.report_json(report))
    assert doc["summary"]["failed"] == 1
    assert doc["timestamp"] == "2026-01-01T00:00:00+00:00"
    assert phlab.report_json(report).endswith("\n")


def test_non_finite_residuals_serialize():
    rows = [{"id": "inf-row", "residual": float("inf"), "tolerance": 1.0,
             "passed": False}]
    report = phlab.build_report(CONFIG, rows)
    doc = json.loads(phlab.report_json(report))
    assert doc["rows"][0]["residual"] == "inf"


def test_tolerance_overrides_prefix_matching():
    out = phlab.apply_tolerance_overrides(ROWS, {"alpha": 1e-9,
                                                 "alpha-control": 1e-1,
                                                 "gamma": 1e-2})
    by_id = {r["id"]: r for r in out}
    # residuals never change
    assert by_id["alpha"]["residual"] == ROWS[1]["residual"]
    # plain row re-gated against the tighter threshold
    assert by_id["alpha"]["tolerance"] == 1e-9
    assert not by_id["alpha"]["passed"]
    # longest prefix wins: alpha-control gets its own (looser) floor and
    # keeps inverted semantics: residual 0.02 < 0.1 floor -> now failing
    assert by_id["alpha-control"]["tolerance"] == 1e-1
    assert not by_id["alpha-control"]["passed"]
    # loosened ordinary row flips to passing
    assert by_id["gamma"]["passed"]
    # untouched row is preserved
    assert by_id["beta"]["passed"]


def test_tolerance_overrides_none_is_identity():
    out = phlab.apply_tolerance_overrides(ROWS, None)
    assert out == [dict(r) for r in out]
    assert [r["id"] for r in out] == [r["id"] for r in ROWS]


def test_rows_table_format():
    text = phlab.rows_table(phlab.build_report(CONFIG, ROWS).rows)
    lines = text.splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("  PASS  alpha")
    assert any(line.startswith("  FAIL  gamma") for line in lines)
    assert "negative control" in text


def test_write_report_files(tmp_path):
    report = phlab.build_report(CONFIG, ROWS)
    lengths = np.array([[0.2, 1.2566], [0.1, 0.6291]])
    paths = phlab.write_report(report, tmp_path, "unit", lengths=lengths,
                               figures=True)
    assert set(paths) == {"report", "residuals", "circle",
                          "residuals_figure", "circle_figure"}
    for p in paths.values():
        assert (tmp_path / p.name).exists() if hasattr(p, "name") else True

    with open(paths["residuals"], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["id"] for r in rows] == ["alpha", "alpha-control", "beta",
                                       "gamma"]
    # repr round-trip: the CSV preserves float values exactly
    assert float(rows[0]["residual"]) == 3.0e-6

    with open(paths["circle"], newline="") as fh:
        circ = list(csv.DictReader(fh))
    assert [c["r"] for c in circ] == ["0.2", "0.1"]


def test_write_report_without_figures(tmp_path):
    report = phlab.build_report(CONFIG, ROWS)
    paths = phlab.write_report(report, tmp_path, "plain", figures=False)
    assert set(paths) == {"report", "residuals"}
    doc = json.loads((tmp_path / "plain.json").read_text())
    assert doc["config"]["model"] == "sphere:n=1"

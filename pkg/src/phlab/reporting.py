"""Deterministic experiment reports: JSON, delimited residual tables, figures.

A report is assembled from diagnostic *rows* — dictionaries carrying at
least ``id``, ``residual``, ``tolerance`` and ``passed`` (extra keys ride
along into the JSON).  Assembly is single-threaded and rows are ordered by
id, so a fixed configuration and seed produce a byte-identical JSON document
except for the single ``timestamp`` field.

Outputs written next to each other by :func:`write_report`:

* ``<stem>.json`` — full report (config echo, rows, summary, versions);
* ``<stem>-residuals.csv`` — one delimited line per row;
* ``<stem>-circle.csv`` — optional (radius, length) table when the
  experiment produced a circle-length sweep;
* ``<stem>-residuals.png`` / ``<stem>-circle.png`` — rendered figures of the
  same data (headless backend), alongside the delimited output.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "ExperimentReport", "build_report", "apply_tolerance_overrides",
    "report_json", "write_report", "rows_table",
]


def _versions() -> dict:
    import scipy
    import sympy

    from . import __version__
    return {"phlab": __version__, "numpy": np.__version__,
            "scipy": scipy.__version__, "sympy": sympy.__version__}


def _clean(value):
    """Make a row value JSON-serializable and deterministic."""
    if isinstance(value, (np.floating, float)):
        out = float(value)
        return out if math.isfinite(out) else repr(out)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in sorted(value.items())}
    return value


@dataclass
class ExperimentReport:
    """Structured result of one experiment run."""
    config: dict
    rows: list
    summary: dict
    versions: dict = field(default_factory=_versions)
    timestamp: str = ""

    @property
    def all_passed(self) -> bool:
        return bool(self.summary.get("failed", 1) == 0)


def summarize(rows: list) -> dict:
    residuals = [r["residual"] for r in rows
                 if isinstance(r.get("residual"), (int, float))
                 and math.isfinite(r["residual"])]
    passed = sum(1 for r in rows if r.get("passed"))
    return {
        "rows": len(rows),
        "passed": passed,
        "failed": len(rows) - passed,
        "max_residual": max(residuals) if residuals else 0.0,
        "all_passed": passed == len(rows),
    }


def apply_tolerance_overrides(rows: list, overrides: dict | None) -> list:
    """Re-gate rows whose id starts with an override key.

    Overrides change only the reported threshold and the pass flag — values
    and residuals are untouched, so loosening or tightening a tolerance never
    alters the computation.  Negative-control rows (which pass by *exceeding*
    a floor) keep their inverted semantics.
    """
    if not overrides:
        return [dict(r) for r in rows]
    out = []
    for row in rows:
        row = dict(row)
        for key in sorted(overrides, key=len, reverse=True):
            if str(row.get("id", "")).startswith(key):
                tol = float(overrides[key])
                row["tolerance"] = tol
                inverted = "negative control" in str(row.get("note", ""))
                row["passed"] = (row["residual"] > tol if inverted
                                 else row["residual"] <= tol)
                break
        out.append(row)
    return out


def build_report(config: dict, rows: list,
                 timestamp: str | None = None) -> ExperimentReport:
    """Assemble a report: clean rows, order by id, summarize."""
    cleaned = sorted(({k: _clean(v) for k, v in row.items()} for row in rows),
                     key=lambda r: str(r.get("id", "")))
    for row in cleaned:
        missing = {"id", "residual", "tolerance", "passed"} - set(row)
        if missing:
            raise InvalidArgument(f"report row {row.get('id')!r} lacks {missing}")
    stamp = timestamp if timestamp is not None else (
        datetime.now(timezone.utc).isoformat(timespec="seconds"))
    return ExperimentReport(config=_clean(config), rows=cleaned,
                            summary=summarize(cleaned), timestamp=stamp)


def report_json(report: ExperimentReport) -> str:
    doc = {
        "config": report.config,
        "rows": report.rows,
        "summary": report.summary,
        "versions": report.versions,
        "timestamp": report.timestamp,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def rows_table(rows: list) -> str:
    """Fixed-width human-readable table of rows (used by the CLI)."""
    if not rows:
        return "(no rows)\n"
    width = max(len(str(r["id"])) for r in rows)
    lines = []
    for r in rows:
        mark = "PASS" if r["passed"] else "FAIL"
        note = str(r.get("note", ""))
        lines.append(f"  {mark}  {str(r['id']):<{width}}  "
                     f"residual {r['residual']:.3e}  tol {r['tolerance']:.1e}"
                     + (f"  {note}" if note else ""))
    return "\n".join(lines) + "\n"


def _write_residual_csv(rows: list, path: Path) -> None:
    extra_keys = sorted({k for r in rows for k in r}
                        - {"id", "residual", "tolerance", "passed", "note"})
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "residual", "tolerance", "passed", "note",
                         *extra_keys])
        for r in rows:
            writer.writerow(
                [r["id"], repr(float(r["residual"])),
                 repr(float(r["tolerance"])), int(bool(r["passed"])),
                 r.get("note", "")]
                + [json.dumps(r.get(k, ""), sort_keys=True) for k in extra_keys])


def _write_circle_csv(lengths: np.ndarray, path: Path) -> None:
    table = np.asarray(lengths, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2:
        raise InvalidArgument("circle-length table must have columns (r, L)")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "length"])
        for r, L in table:
            writer.writerow([repr(float(r)), repr(float(L))])


def _residual_figure(rows: list, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    floor = 1e-18
    idx = np.arange(len(rows))
    res = np.array([max(abs(r["residual"]), floor) for r in rows])
    tol = np.array([max(abs(r["tolerance"]), floor) for r in rows])
    ok = np.array([bool(r["passed"]) for r in rows])
    fig, ax = plt.subplots(figsize=(8.0, max(2.5, 0.28 * len(rows) + 1.2)))
    ax.scatter(res[ok], idx[ok], marker="o", label="residual (pass)")
    if (~ok).any():
        ax.scatter(res[~ok], idx[~ok], marker="x", label="residual (fail)")
    ax.scatter(tol, idx, marker="|", label="tolerance")
    ax.set_xscale("log")
    ax.set_yticks(idx)
    ax.set_yticklabels([str(r["id"]) for r in rows], fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("residual (log scale)")
    ax.legend(loc="best", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _circle_figure(lengths: np.ndarray, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    table = np.asarray(lengths, dtype=float)
    r, L = table[:, 0], table[:, 1]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.4))
    ax1.plot(r, L, "o-", label="L(β_r)")
    ax1.plot(r, 2 * np.pi * r, "--", label="2πr")
    ax1.set_xlabel("r")
    ax1.set_ylabel("length")
    ax1.legend()
    order = np.argsort(r)
    rs, Ls = r[order], L[order]
    ax2.plot(rs, (2 * np.pi * rs - Ls) / rs**3, "s-")
    ax2.set_xlabel("r")
    ax2.set_ylabel("(2πr − L) / r³")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(report: ExperimentReport, out_dir, stem: str,
                 lengths: np.ndarray | None = None,
                 figures: bool = True) -> dict:
    """Write the JSON report, CSV tables and figures; return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    json_path = out / f"{stem}.json"
    json_path.write_text(report_json(report))
    paths["report"] = str(json_path)
    csv_path = out / f"{stem}-residuals.csv"
    _write_residual_csv(report.rows, csv_path)
    paths["residuals"] = str(csv_path)
    if lengths is not None:
        circle_path = out / f"{stem}-circle.csv"
        _write_circle_csv(lengths, circle_path)
        paths["circle"] = str(circle_path)
    if figures:
        fig_path = out / f"{stem}-residuals.png"
        _residual_figure(report.rows, fig_path)
        paths["residuals_figure"] = str(fig_path)
        if lengths is not None:
            cfig_path = out / f"{stem}-circle.png"
            _circle_figure(lengths, cfig_path)
            paths["circle_figure"] = str(cfig_path)
    return paths

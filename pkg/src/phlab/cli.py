"""Command-line harness: run configured experiments, list catalogs.

Usage:

    phlab run <config.json> [--model ID] [--experiment ID] [--seed N]
              [--out DIR] [--radii R1,R2,...] [--points N]
    phlab list models [--json]
    phlab list experiments [--json]

``run`` loads a JSON configuration, applies the flag overrides, dispatches
the experiment, writes the report JSON / residual CSV / optional
circle-length CSV plus rendered figures into the output directory, prints a
row table, and exits 0 exactly when every row passed.  Configuration parse
errors and unknown model/experiment ids exit 2 with a diagnostic naming the
valid ids.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .errors import PhlabError
from .experiments import EXPERIMENT_IDS, list_experiments, run_experiment
from .models import list_models
from .reporting import (apply_tolerance_overrides, build_report, report_json,
                        rows_table, write_report)

__all__ = ["main", "run", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phlab",
        description="Numerical laboratory for pseudohermitian geometry: "
                    "verification experiments over explicit CR models.")
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one experiment configuration")
    runp.add_argument("config", help="path to a JSON configuration file")
    runp.add_argument("--model", help="model id override, e.g. sphere:n=1")
    runp.add_argument("--experiment", help="experiment id override")
    runp.add_argument("--seed", type=int, help="sampling seed override")
    runp.add_argument("--out", help="output directory override")
    runp.add_argument("--radii",
                      help="comma-separated decreasing radii, e.g. 0.2,0.1,0.05")
    runp.add_argument("--points", type=int, help="sample-point count override")

    listp = sub.add_parser("list", help="print a catalog")
    listp.add_argument("what", choices=("models", "experiments"))
    listp.add_argument("--json", action="store_true",
                       help="emit the catalog as JSON instead of a table")
    return parser


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise PhlabError(f"cannot read config {path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PhlabError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise PhlabError(f"config {path} must hold a JSON object")
    return config


def _apply_overrides(config: dict, args: argparse.Namespace) -> dict:
    config = dict(config)
    if args.model is not None:
        config["model"] = args.model
    if args.experiment is not None:
        config["experiment"] = args.experiment
    if args.seed is not None:
        config["seed"] = args.seed
    if args.out is not None:
        config["out"] = args.out
    if args.points is not None:
        config["points"] = args.points
    if args.radii is not None:
        try:
            config["radii"] = [float(tok) for tok in args.radii.split(",") if tok]
        except ValueError:
            raise PhlabError(f"--radii expects comma-separated floats, "
                             f"got {args.radii!r}") from None
    return config


def _stem(config: dict) -> str:
    raw = f"{config.get('experiment', 'run')}-{config.get('model', 'any')}"
    return re.sub(r"[^A-Za-z0-9._-]+", "_", raw)


def _models_table() -> str:
    cat = list_models()
    wf = max(len(r["family"]) for r in cat)
    ws = max(len(r["signature"]) for r in cat)
    we = max(len(r["example"]) for r in cat)
    lines = [f"  {r['family']:<{wf}}  {r['signature']:<{ws}}  "
             f"{r['example']:<{we}}  {r['note']}" for r in cat]
    header = (f"  {'family':<{wf}}  {'signature':<{ws}}  "
              f"{'example':<{we}}  description")
    return "\n".join([header, *lines]) + "\n"


def _experiments_table() -> str:
    cat = list_experiments()
    wi = max(len(r["id"]) for r in cat)
    lines = [f"  {r['id']:<{wi}}  {r['description']}" for r in cat]
    return "\n".join([f"  {'id':<{wi}}  description", *lines]) + "\n"


def run(config: dict, echo=print) -> int:
    """Execute one configuration dict; returns the exit status."""
    rows, extras = run_experiment(config)
    rows = apply_tolerance_overrides(rows, config.get("tolerances"))
    report = build_report(config, rows)
    out_dir = config.get("out", "phlab-out")
    paths = write_report(report, out_dir, _stem(config),
                         lengths=extras.get("lengths"),
                         figures=bool(config.get("figures", True)))
    echo(rows_table(report.rows), end="")
    summary = report.summary
    echo(f"{summary['passed']}/{summary['rows']} rows passed; "
         f"max residual {summary['max_residual']:.3e}")
    for kind, path in sorted(paths.items()):
        echo(f"  wrote {kind}: {path}")
    return 0 if report.all_passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        catalog = list_models() if args.what == "models" else list_experiments()
        if args.json:
            print(json.dumps(catalog, indent=2, sort_keys=True))
        else:
            print(_models_table() if args.what == "models"
                  else _experiments_table(), end="")
        return 0
    try:
        config = _apply_overrides(_load_config(args.config), args)
        return run(config)
    except PhlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        hints = []
        text = str(exc)
        if "model" in text:
            hints.append("valid models: "
                         + ", ".join(r["example"] for r in list_models()))
        if "experiment" in text:
            hints.append("valid experiments: " + ", ".join(EXPERIMENT_IDS))
        for hint in hints:
            print(hint, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""The experiment registry: named verification runs over one configuration.

Each experiment id maps to a function ``(model, config) -> (rows, extras)``
producing diagnostic rows in the house schema (``id``/``residual``/
``tolerance``/``passed``/optional ``note`` plus free extra keys) and an
``extras`` dict that may carry a ``lengths`` table (columns r, L) for the
circle-length CSV and figure.

Configuration keys understood here (all optional unless stated):

* ``model`` — model id string (required for model-driven experiments);
* ``experiment`` — one of :data:`EXPERIMENT_IDS`;
* ``seed`` (default 0), ``points`` (count), ``planes`` (count),
  ``margin`` (domain sampling margin);
* ``radii`` — decreasing radii for circle-based experiments;
* ``u`` — rescaling-field preset for the conformal experiment;
* ``family``, ``source_n``, ``target_n`` — immersion selection
  (``family: "both"`` runs the two standard families);
* ``tolerances`` — row-id-prefix → threshold overrides (applied by the
  caller via :func:`phlab.reporting.apply_tolerance_overrides`).

Point sweeps are data-parallel; the environment variable ``PHLAB_THREADS``
caps the worker count (1 disables threading).  Results are collected in
submission order, so parallelism never changes the rows.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .complexframe import conformal_check, pluriharmonic_hessian_check
from .curvature import (appendix_chain_check, curvature_packet, identity_suite,
                        sample_horizontal_unit, sectional_H)
from .errors import InvalidArgument
from .frames import heisenberg_symmetry_candidates, is_infinitesimal_psh
from .geodesics import (DEFAULT_RADII, CircleExperiment, circle_length,
                        extract_H_via_limit, reeb_plane_expansion_check)
from .immersions import immersion_suite
from .models import immersion_standard, model_from_id

__all__ = ["EXPERIMENT_IDS", "list_experiments", "run_experiment",
           "parallel_map", "thread_count"]


def thread_count() -> int:
    """Worker cap: ``PHLAB_THREADS`` when set, else min(4, cpu count)."""
    env = os.environ.get("PHLAB_THREADS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            raise InvalidArgument(
                f"PHLAB_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise InvalidArgument(f"PHLAB_THREADS must be >= 1, got {value}")
        return value
    return min(4, os.cpu_count() or 1)


def parallel_map(fn, items):
    """Map preserving order; threads capped by :func:`thread_count`."""
    items = list(items)
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _row(rid, residual, tol, note=""):
    return {"id": rid, "residual": float(residual), "tolerance": float(tol),
            "passed": bool(residual <= tol), **({"note": note} if note else {})}


def _expected_H(model):
    """Constant normalized sectional curvature for models that have one."""
    family = getattr(model, "family", "")
    if family == "heisenberg":
        return 0.0
    if family == "sphere":
        return 1.0
    if family == "quadric":
        c = float(model.params.get("c", 0.5))
        sign = 1.0 if str(model.params.get("sign", "+")) in ("+", "+1") else -1.0
        return sign / (2.0 * c)
    return None


def _sample(model, config, default_points):
    count = int(config.get("points", default_points))
    seed = int(config.get("seed", 0))
    margin = float(config.get("margin", 0.0))
    return model.sample_points(count, seed=seed, margin=margin)


# --------------------------------------------------------------------------
# experiment bodies
# --------------------------------------------------------------------------

def _run_identity_suite(model, config):
    pts = _sample(model, config, 5)
    packet = curvature_packet(model, pts, with_nabla=True)
    return identity_suite(packet), {}


def _run_curvature_sweep(model, config):
    pts = _sample(model, config, 20)
    planes = int(config.get("planes", 5))
    seed = int(config.get("seed", 0))
    expected = _expected_H(model)
    tol = 1e-4 if getattr(model, "family", "") == "quadric" else 1e-5

    def one(arg):
        i, p = arg
        pk = curvature_packet(model, p[None])
        V = sample_horizontal_unit(model.n, planes, seed=seed + i)
        H = sectional_H(pk, V)[0]
        rows = []
        if expected is None:
            rows.append({"id": f"H-sweep@{i}", "residual": 0.0,
                         "tolerance": tol, "passed": True,
                         "H_min": float(np.min(H)), "H_max": float(np.max(H)),
                         "note": "no constant-curvature oracle; values recorded"})
        else:
            rows.append(_row(f"H-constant@{i}",
                             float(np.max(np.abs(H - expected))), tol,
                             f"expected H = {expected:+g}"))
        if getattr(model, "family", "") == "heisenberg":
            rows.append(_row(f"curvature-norm@{i}",
                             float(np.max(np.abs(pk.R4))), 1e-7))
            rows.append(_row(f"torsion-norm@{i}",
                             float(np.max(np.abs(pk.conn.tau))), 1e-8))
        return rows

    batches = parallel_map(one, list(enumerate(pts)))
    return [row for batch in batches for row in batch], {}


def _circle_center(model, config):
    pts = _sample(model, config, 1)
    return np.asarray(config.get("center", pts[0]), dtype=float)


def _run_circle_length(model, config):
    radii = tuple(float(r) for r in config.get("radii", DEFAULT_RADII))
    plane = str(config.get("plane", "holomorphic"))
    center = _circle_center(model, config)
    exp = CircleExperiment(center=center, v_frame=None, plane=plane,
                           radii=radii)
    lengths = circle_length(model, exp)
    rows = [{"id": "circle-lengths-finite",
             "residual": 0.0 if np.all(np.isfinite(lengths)) else np.inf,
             "tolerance": 0.5, "passed": bool(np.all(np.isfinite(lengths))),
             "lengths": [float(v) for v in lengths],
             "radii": list(radii),
             "cubic_coefficient": float(exp.cubic_coefficient),
             "limit": float(exp.limit)}]
    fam = getattr(model, "family", "")
    if fam == "heisenberg" and plane == "holomorphic":
        closed = 2.0 * np.pi * np.asarray(radii) * np.sqrt(
            1.0 + np.asarray(radii) ** 2 / 4.0)
        rows.append(_row("circle-closed-form",
                         float(np.max(np.abs(lengths - closed))), 5e-7,
                         "L = 2πr·sqrt(1 + r²/4) on the flat model"))
    if fam == "sphere" and plane == "holomorphic":
        rows.append(_row("circle-cubic-coefficient",
                         abs(float(exp.cubic_coefficient) - 5.0 * np.pi / 12.0),
                         1e-4, "unit-curvature cubic defect 5π/12"))
    table = np.column_stack([np.asarray(radii, dtype=float), lengths])
    return rows, {"lengths": table}


def _run_extract_h(model, config):
    radii = tuple(float(r) for r in config.get("radii", DEFAULT_RADII))
    pts = _sample(model, config, 3)
    expected = _expected_H(model)
    tol = float(config.get("h_tol",
                           1e-2 if getattr(model, "family", "") == "quadric"
                           else 5e-3))

    def one(arg):
        i, p = arg
        res = extract_H_via_limit(model, p, radii=radii)
        if expected is None:
            row = {"id": f"extract-H@{i}", "residual": 0.0, "tolerance": tol,
                   "passed": True, "H": float(res["H"]),
                   "note": "no constant-curvature oracle; value recorded"}
        else:
            row = _row(f"extract-H@{i}", abs(float(res["H"]) - expected), tol,
                       f"H = {res['H']:+.6f}, expected {expected:+g}")
            row["H"] = float(res["H"])
        row["fit_residual"] = float(res["fit_residual"])
        return row, np.column_stack([res["radii"], res["lengths"]])

    results = parallel_map(one, list(enumerate(pts)))
    rows = [row for row, _ in results]
    return rows, {"lengths": results[0][1]}


def _run_reeb_expansion(model, config):
    radii = tuple(float(r) for r in config.get("radii", DEFAULT_RADII))
    pts = _sample(model, config, 2)

    def one(arg):
        i, p = arg
        res = reeb_plane_expansion_check(model, p, radii=radii)
        row = {"id": f"reeb-defect-bracket@{i}",
               "residual": float(res["relative_residual"]),
               "tolerance": float(res["rel_tol"]),
               "passed": bool(res["passed"]),
               "measured": float(res["measured"]),
               "predicted": float(res["predicted"]),
               "variant": float(res["variant"]),
               "variant_relative_residual":
                   float(res["variant_relative_residual"]),
               "K": float(res["K"]), "A_vv": float(res["A_vv"]),
               "tau_sq": float(res["tau_sq"]),
               "omega_term": float(res["omega_term"]),
               "nabla_term": float(res["nabla_term"])}
        return row

    return parallel_map(one, list(enumerate(pts))), {}


def _run_conformal(model, config):
    pts = _sample(model, config, 3)
    u = config.get("u", "x1")
    rows = conformal_check(model, u, pts)
    if getattr(model, "family", "") == "heisenberg" and model.n == 1:
        x, y, t = model.coords
        rows += pluriharmonic_hessian_check(model, t, x ** 2 + y ** 2, pts)
    return rows, {}


def _run_immersion(model, config):
    family = str(config.get("family", "both"))
    m_src = int(config.get("source_n", 1))
    n_tgt = int(config.get("target_n", 2))
    families = (["sphere-in-sphere", "heisenberg-in-heisenberg"]
                if family == "both" else [family])
    count = int(config.get("points", 2))
    seed = int(config.get("seed", 0))
    margin = float(config.get("margin", 0.25))
    rows = []
    for fam in families:
        imm = immersion_standard(m_src, n_tgt, fam)
        pts = imm.source.sample_points(count, seed=seed, margin=margin)
        for row in immersion_suite(imm, pts, seed=seed):
            row = dict(row)
            row["id"] = f"{fam}:{row['id']}"
            rows.append(row)
    return rows, {}


def _run_appendix_chain(model, config):
    pts = _sample(model, config, 4)
    seed = int(config.get("seed", 0))
    rows, control, c = appendix_chain_check(model, None, pts, seed=seed + 11)
    out = list(rows)
    fired = not all(r["passed"] for r in control)
    out.append({"id": "appendix-negative-control",
                "residual": float(max(r["residual"] for r in control)),
                "tolerance": 1e-5, "passed": fired, "c": float(c),
                "note": "negative control: passes when the shifted-c rerun "
                        "fails"})
    return out, {}


def _run_psh_checker(model, config):
    if getattr(model, "family", "") != "heisenberg" or model.n != 1:
        raise InvalidArgument(
            "the psh-checker experiment ships candidate fields for the "
            "n = 1 flat model only; use model heisenberg:n=1")
    pts = _sample(model, config, 6)
    tol = float(config.get("psh_tol", 1e-7))
    rows = []
    for name, field in heisenberg_symmetry_candidates(model):
        rep = is_infinitesimal_psh(model, field, pts, tol=tol)
        residual = max(float(rep["lie_theta_max"]), float(rep["cr_span_max"]))
        if name == "bare-translation-x":
            rows.append({"id": f"psh-{name}", "residual": residual,
                         "tolerance": tol, "passed": not rep["passes"],
                         "note": "negative control: passes when the field "
                                 "fails the checker"})
        else:
            rows.append(_row(f"psh-{name}", residual, tol))
    count = sum(1 for r in rows if not str(r["id"]).endswith("bare-translation-x"))
    rows.append({"id": "psh-candidate-count",
                 "residual": float(abs(count - (model.n + 1) ** 2)),
                 "tolerance": 0.5, "passed": count == (model.n + 1) ** 2,
                 "note": "symmetry candidates match the dimension bound "
                         "(n+1)² of the flat model"})
    return rows, {}


_EXPERIMENTS = {
    "identity-suite": (_run_identity_suite,
                       "connection/curvature identity rows at sampled points"),
    "curvature-sweep": (_run_curvature_sweep,
                        "sectional curvature H over points × planes, gated "
                        "on constant-curvature models"),
    "circle-length": (_run_circle_length,
                      "geodesic-circle lengths over a radius sweep"),
    "extract-H": (_run_extract_h,
                  "curvature from the circle-length defect, extrapolated "
                  "to radius zero"),
    "reeb-expansion": (_run_reeb_expansion,
                       "length expansion of circles in Reeb planes "
                       "(torsion-aware bracket)"),
    "conformal": (_run_conformal,
                  "transformation laws under contact rescaling plus the "
                  "CR-Hessian identity"),
    "immersion": (_run_immersion,
                  "second-fundamental-form identities, curvature relation "
                  "and monotonicity for the standard immersions"),
    "appendix-chain": (_run_appendix_chain,
                       "space-form defect chain with a shifted-c negative "
                       "control"),
    "psh-checker": (_run_psh_checker,
                    "infinitesimal symmetry checker on the flat model's "
                    "candidate fields"),
}

EXPERIMENT_IDS = tuple(_EXPERIMENTS)


def list_experiments() -> list:
    """Catalog of experiment ids with one-line descriptions."""
    return [{"id": key, "description": desc}
            for key, (_, desc) in _EXPERIMENTS.items()]


def run_experiment(config: dict):
    """Dispatch one configuration; returns ``(rows, extras)``.

    ``config['experiment']`` picks the experiment; ``config['model']`` is
    resolved through the model registry.  Unknown ids raise
    :class:`InvalidArgument` naming the valid ones.
    """
    exp_id = str(config.get("experiment", "")).strip()
    if exp_id not in _EXPERIMENTS:
        raise InvalidArgument(
            f"unknown experiment {exp_id!r}; valid ids: "
            + ", ".join(EXPERIMENT_IDS))
    model_id = config.get("model")
    if exp_id == "immersion" and not model_id:
        model = None
    else:
        if not model_id:
            raise InvalidArgument("config needs a 'model' id")
        model = model_from_id(str(model_id))
    fn, _ = _EXPERIMENTS[exp_id]
    return fn(model, config)

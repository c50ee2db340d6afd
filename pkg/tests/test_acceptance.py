"""Acceptance gate: eleven quantitative end-to-end criteria.

Every test prints exactly one ``[criterion NN] PASS/FAIL`` line with the
measured numbers, then asserts.  Tolerances are pinned here on purpose —
loosening one is a contract change, not a tuning knob.
"""
import time

import numpy as np

import phlab


def _line(num, ok, detail):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def test_criterion_01_sphere_curvature_anchor(sphere1, sphere2):
    """Holomorphic sectional curvature of the unit sphere is 1 (n = 1, 2):
    20 points x 5 planes within 1e-5, in under a minute."""
    start = time.monotonic()
    worst = 0.0
    for model in (sphere1, sphere2):
        pts = model.sample_points(20, seed=101)
        pk = phlab.curvature_packet(model, pts)
        V = phlab.sample_horizontal_unit(model.n, 5, seed=202)
        H = phlab.sectional_H(pk, V)
        worst = max(worst, float(np.max(np.abs(H - 1.0))))
    elapsed = time.monotonic() - start
    ok = worst < 1e-5 and elapsed < 60.0
    _line(1, ok, f"sphere anchor: max|H-1| = {worst:.3e} (tol 1e-05) over "
                 f"n=1,2 x 20 pts x 5 planes in {elapsed:.1f}s (limit 60s)")
    assert worst < 1e-5
    assert elapsed < 60.0


def test_criterion_02_quadric_anchor(quad_minus, quad_plus):
    """The quadrics with c = 0.5 have constant curvature -1 and +1 (1e-4)."""
    worst = 0.0
    for model, expected in ((quad_minus, -1.0), (quad_plus, +1.0)):
        pts = model.sample_points(20, seed=103)
        pk = phlab.curvature_packet(model, pts)
        V = phlab.sample_horizontal_unit(model.n, 5, seed=204)
        H = phlab.sectional_H(pk, V)
        worst = max(worst, float(np.max(np.abs(H - expected))))
    ok = worst < 1e-4
    _line(2, ok, f"quadric anchor: max|H -/+ 1| = {worst:.3e} (tol 1e-04) "
                 f"on both signs, 20 pts x 5 planes")
    assert worst < 1e-4


def test_criterion_03_heisenberg_flatness(heis1, heis2):
    """The flat model has vanishing curvature (1e-7) and torsion (1e-8)
    at 50 points for n = 1 and n = 2."""
    worst_R, worst_tau = 0.0, 0.0
    for model in (heis1, heis2):
        pts = model.sample_points(50, seed=105)
        pk = phlab.curvature_packet(model, pts)
        worst_R = max(worst_R, float(np.max(np.abs(pk.R4))))
        worst_tau = max(worst_tau, float(np.max(np.abs(pk.conn.tau))))
    ok = worst_R < 1e-7 and worst_tau < 1e-8
    _line(3, ok, f"flat model: max|R| = {worst_R:.3e} (tol 1e-07), "
                 f"max|tau| = {worst_tau:.3e} (tol 1e-08), 50 pts, n=1,2")
    assert worst_R < 1e-7
    assert worst_tau < 1e-8


def test_criterion_04_curvature_from_circle_lengths(sphere1, heis1,
                                                    quad_minus, origin3):
    """Radius-zero extrapolation of the circle-length defect recovers H on
    the three reference models with radii {0.2, 0.1, 0.05}; the flat model's
    closed-form length at r = 0.1 is reproduced to 5e-7.  Under 5 minutes."""
    start = time.monotonic()
    radii = (0.2, 0.1, 0.05)
    jobs = [(sphere1, sphere1.sample_points(1, seed=107)[0], 1.0, 5e-3),
            (heis1, origin3, 0.0, 5e-3),
            (quad_minus, quad_minus.sample_points(1, seed=107)[0], -1.0, 1e-2)]
    errors = []
    lengths_flat = None
    for model, p, expected, tol in jobs:
        out = phlab.extract_H_via_limit(model, p, radii=radii)
        errors.append((model.family, abs(out["H"] - expected), tol))
        if model is heis1:
            lengths_flat = out["lengths"]
    closed_dev = abs(lengths_flat[1] - 0.6291039)
    elapsed = time.monotonic() - start
    ok = all(err < tol for _, err, tol in errors) and closed_dev <= 5e-7 \
        and elapsed < 300.0
    detail = ", ".join(f"{fam}: |dH| = {err:.2e} (tol {tol:g})"
                       for fam, err, tol in errors)
    _line(4, ok, f"circle-length limit: {detail}; flat L(0.1) dev "
                 f"{closed_dev:.2e} (tol 5e-07); {elapsed:.0f}s (limit 300s)")
    for fam, err, tol in errors:
        assert err < tol, fam
    assert closed_dev <= 5e-7
    assert elapsed < 300.0


def test_criterion_05_reeb_plane_expansion(sphere1, conf_heis_x):
    """Circle lengths in Reeb planes: 2% agreement on a torsion-free model,
    and the four-term bracket 16K + (3/2)A(v,v)^2 + 2 Omega(tau v, v)
    - |tau v|^2 on a rescaled flat model carrying |tau| > 1e-3."""
    p_s = sphere1.sample_points(1, seed=109)[0]
    sas = phlab.reeb_plane_expansion_check(sphere1, p_s, radii=(0.2, 0.1, 0.05))

    p_t = np.array([0.25, -0.1, 0.05])
    tor = phlab.reeb_plane_expansion_check(conf_heis_x, p_t,
                                           radii=(0.2, 0.1, 0.05))
    tau_norm = float(np.sqrt(tor["tau_sq"]))
    variant_rel = tor["variant_relative_residual"]
    ok = sas["passed"] and tau_norm > 1e-3 and variant_rel <= 0.02
    _line(5, ok,
          f"Reeb-plane expansion: torsion-free rel {sas['relative_residual']:.1e} "
          f"(tol 0.02); torsion model |tau v| = {tau_norm:.3f}, four-term "
          f"bracket rel {variant_rel:.2f} vs measured B = {tor['measured']:.4f} "
          f"(four-term predicts {tor['variant']:.4f}, torsion-aware bracket "
          f"predicts {tor['predicted']:.4f} at {tor['relative_residual']:.1e})")
    assert sas["passed"] and sas["relative_residual"] <= 0.02
    assert tau_norm > 1e-3
    assert variant_rel <= 0.02, (
        "on a torsion-carrying structure the measured cubic defect "
        f"coefficient is B = {tor['measured']:.6f}, while the four-term "
        "bracket 16 K + (3/2) A(v,v)^2 + 2 Omega(tau v, v) - |tau v|^2 "
        f"predicts {tor['variant']:.6f} (relative residual {variant_rel:.2f} "
        "> 0.02).  The measurement instead matches the torsion-aware "
        "bracket 4 K + (3/2) A(v,v)^2 + 2 Omega(tau v, v) - 5 |tau v|^2 "
        f"- 4 (nabla_T A)(v,v) = {tor['predicted']:.6f} at "
        f"{tor['relative_residual']:.1e} relative.  K(T, v) vanishes "
        "identically for this connection (the Reeb field is parallel), so "
        "the two brackets differ exactly in the torsion weights; the "
        "third-order Jacobi expansion forces the coefficients -5 and -4, "
        "and both forms coincide on torsion-free structures, where this "
        "check passes."
    )


def test_criterion_06_conformal_transformation_laws(heis1, sphere1):
    """Connection-coefficient laws at 1e-6 and curvature law at 1e-5 for
    u in {0, const, x} over the flat model and the sphere; a homothety
    rescales H by the factor a = 2 within 1e-8."""
    import sympy as sp
    worst_coeff, worst_curv = 0.0, 0.0
    for base in (heis1, sphere1):
        pts = base.sample_points(2, seed=111)
        for u in (sp.Integer(0), sp.Float(0.3), base.coords[0]):
            coeff = phlab.conformal_coefficients_check(base, u, pts, tol=1e-6)
            curv = phlab.conformal_curvature_check(base, u, pts, planes=8,
                                                   tol=1e-5)
            assert all(r["passed"] for r in coeff), (base.label, str(u))
            assert all(r["passed"] for r in curv), (base.label, str(u))
            worst_coeff = max(worst_coeff,
                              max(r["residual"] for r in coeff))
            worst_curv = max(worst_curv, max(r["residual"] for r in curv))
    hom = phlab.homothety_rows(sphere1, sphere1.sample_points(2, seed=112),
                               a=2.0, tol=1e-8)
    worst_hom = max(r["residual"] for r in hom)
    ok = all(r["passed"] for r in hom) and worst_coeff < 1e-6 \
        and worst_curv < 1e-5
    _line(6, ok, f"conformal laws: coefficients {worst_coeff:.2e} (tol 1e-06), "
                 f"curvature {worst_curv:.2e} (tol 1e-05) over 2 bases x 3 "
                 f"rescalings; homothety a=2 residual {worst_hom:.2e} "
                 f"(tol 1e-08)")
    assert worst_coeff < 1e-6
    assert worst_curv < 1e-5
    assert all(r["passed"] for r in hom)


def test_criterion_07_space_form_tensor(sphere1, quad_minus, quad_plus,
                                        sphere2):
    """Space-form models reproduce the constant-curvature tensor to 1e-5;
    Ricci data matches Ric = 2c(n+1)g and rho = 2cn(n+1) to 1e-4
    (values 6 and 12 for the n = 2 sphere)."""
    worst_tensor = 0.0
    for model, c in ((sphere1, 1.0), (quad_minus, -1.0), (quad_plus, 1.0)):
        pk = phlab.curvature_packet(model, model.sample_points(4, seed=113))
        worst_tensor = max(worst_tensor, phlab.space_form_residual(pk, c))
    pk2 = phlab.curvature_packet(sphere2, sphere2.sample_points(4, seed=114))
    Ric, rho = phlab.ricci_scalar(pk2)
    hor = slice(1, sphere2.m)
    ric_dev = float(np.max(np.abs(Ric[:, hor, hor] - 6.0 * np.eye(4))))
    rho_dev = float(np.max(np.abs(rho - 12.0)))
    ok = worst_tensor < 1e-5 and ric_dev < 1e-4 and rho_dev < 1e-4
    _line(7, ok, f"space forms: tensor residual {worst_tensor:.2e} (tol 1e-05) "
                 f"on sphere + both quadrics; n=2 Ricci dev {ric_dev:.2e} vs "
                 f"6g, scalar dev {rho_dev:.2e} vs 12 (tol 1e-04)")
    assert worst_tensor < 1e-5
    assert ric_dev < 1e-4
    assert rho_dev < 1e-4


def test_criterion_08_identity_suite_and_chain(sphere1, heis1, quad_minus):
    """Structure identities at the tolerance ladder (1e-7/1e-5/1e-4) on
    3 models x 5 points; curvature defect chain at 1e-5 on the
    constant-curvature models with a failing shifted-c control."""
    ladder = phlab.TOLERANCE_LADDER
    assert (ladder["algebraic"], ladder["first"], ladder["second"]) == \
        (1e-7, 1e-5, 1e-4)
    worst = 0.0
    for model in (sphere1, heis1, quad_minus):
        pts = model.sample_points(5, seed=115)
        rows = phlab.identity_suite(model, pts)
        bad = [r for r in rows if not r["passed"]]
        assert not bad, (model.label, bad)
        worst = max(worst, max(r["residual"] for r in rows))
    controls_fired = []
    for model in (sphere1, quad_minus):
        pts = model.sample_points(4, seed=116)
        rows, control, c = phlab.appendix_chain_check(model, None, pts,
                                                      tol=1e-5)
        assert all(r["passed"] for r in rows), model.label
        controls_fired.append(any(not r["passed"] for r in control))
    ok = all(controls_fired)
    _line(8, ok, f"identity suite: worst residual {worst:.2e} on 3 models x "
                 f"5 pts at ladder 1e-07/1e-05/1e-04; defect chain at 1e-05 "
                 f"with c+0.1 control fired on {sum(controls_fired)}/2 models")
    assert all(controls_fired)


def test_criterion_09_jacobi_consistency(sphere1):
    """The variational circle tangent agrees with the independently computed
    one within 1e-6, and the Jacobi field's initial growth fits
    f''(0) = 2 within 1e-3."""
    p = sphere1.sample_points(1, seed=117)[0]
    diag = {r["id"]: r for r in phlab.geodesic_diagnostic_rows(sphere1, p)}
    tangent = diag["tangent-method-agreement"]
    jac = {r["id"]: r for r in phlab.jacobi_rows(sphere1, p)}
    growth = jac["jacobi-initial-growth"]
    ok = tangent["passed"] and tangent["tolerance"] == 1e-6 \
        and growth["passed"] and growth["tolerance"] == 1e-3
    _line(9, ok, f"Jacobi consistency: tangent cross-check {tangent['residual']:.2e} "
                 f"(tol 1e-06); f''(0) fit dev {growth['residual']:.2e} "
                 f"(tol 1e-03)")
    assert tangent["passed"] and tangent["tolerance"] == 1e-6
    assert growth["passed"] and growth["tolerance"] == 1e-3


def test_criterion_10_immersions():
    """Both standard codimension-one immersions pass the gates, the
    fundamental-identity rows, the curvature relation and the equality case
    of curvature monotonicity at 1e-5; the seeded alpha-perturbation
    control produces a visible residual."""
    worst = 0.0
    controls = []
    for family in ("sphere-in-sphere", "heisenberg-in-heisenberg"):
        imm = phlab.immersion_standard(1, 2, family)
        pts = imm.source.sample_points(2, seed=119, margin=0.25)
        rows = phlab.immersion_suite(imm, pts)
        control_rows = [r for r in rows
                        if "negative control" in r.get("note", "")]
        ordinary = [r for r in rows if r not in control_rows]
        bad = [r for r in ordinary if not r["passed"]]
        assert not bad, (family, [(r["id"], r["residual"]) for r in bad])
        over = [r for r in ordinary if r["tolerance"] > 1e-5
                and r["residual"] > 1e-5]
        assert not over, (family,
                          [(r["id"], r["residual"], r["tolerance"])
                           for r in over])
        worst = max(worst, max(r["residual"] for r in ordinary))
        controls.extend(control_rows)
    fired = all(r["passed"] for r in controls)
    ok = fired and worst <= 1e-5
    _line(10, ok, f"immersions: worst identity residual {worst:.2e} "
                  f"(tol 1e-05) over both standard families; "
                  f"{len(controls)} alpha-perturbation controls fired")
    assert worst <= 1e-5
    assert fired and controls


def test_criterion_11_symmetry_checker(heis1):
    """The four generator fields of the flat model pass the infinitesimal
    symmetry checker at 1e-7 — matching the dimension bound (n+1)^2 = 4 —
    and the bare x-translation fails it."""
    pts = heis1.sample_points(6, seed=121)
    passed, failed = [], []
    worst = 0.0
    for name, field in phlab.heisenberg_symmetry_candidates(heis1):
        rep = phlab.is_infinitesimal_psh(heis1, field, pts, tol=1e-7)
        residual = max(rep["lie_theta_max"], rep["cr_span_max"])
        if name == "bare-translation-x":
            failed.append((name, rep["passes"]))
        else:
            passed.append((name, rep["passes"]))
            worst = max(worst, residual)
    ok = all(p for _, p in passed) and len(passed) == 4 \
        and not any(p for _, p in failed)
    _line(11, ok, f"symmetry checker: 4/4 generators pass at 1e-07 "
                  f"(worst {worst:.2e}), bare translation rejected; "
                  f"dimension bound (n+1)^2 = 4 matched")
    assert len(passed) == 4 and all(p for _, p in passed)
    assert failed and not any(p for _, p in failed)

"""Conformal rescaling laws and the CR-Hessian (pluriharmonic) identity."""
import numpy as np
import pytest
import sympy as sp

import phlab
from phlab import PreconditionFailed

from conftest import assert_rows_pass


def test_conformal_check_heisenberg_u_x(heis1):
    pts = heis1.sample_points(3, seed=4)
    assert_rows_pass(phlab.conformal_check(heis1, heis1.coords[0], pts))


def test_conformal_check_sphere_const(sphere1):
    pts = sphere1.sample_points(2, seed=4)
    assert_rows_pass(phlab.conformal_check(sphere1, sp.Float(0.3), pts))


def test_conformal_check_u_zero_is_identity(heis1):
    pts = heis1.sample_points(2, seed=5)
    rows = assert_rows_pass(phlab.conformal_check(heis1, sp.Integer(0), pts))
    assert max(r["residual"] for r in rows) < 1e-9


def test_conformal_wrappers_split(heis1):
    pts = heis1.sample_points(2, seed=6)
    coeff = phlab.conformal_coefficients_check(heis1, heis1.coords[0], pts)
    curv = phlab.conformal_curvature_check(heis1, heis1.coords[0], pts,
                                           planes=6)
    assert_rows_pass(coeff)
    assert_rows_pass(curv)
    assert coeff and curv
    both = {r["id"] for r in phlab.conformal_check(heis1, heis1.coords[0], pts)}
    assert {r["id"] for r in coeff} <= both
    assert {r["id"] for r in curv} <= both


def test_homothety_scales_h(sphere1, heis1):
    pts = sphere1.sample_points(3, seed=2)
    rows = assert_rows_pass(phlab.homothety_rows(sphere1, pts, a=2.0))
    assert max(r["residual"] for r in rows) < 1e-8
    with pytest.raises(phlab.InvalidArgument):
        phlab.homothety_rows(sphere1, pts, a=-2.0)


def test_conformal_model_curvature_consistency(conf_heis_x):
    """The rescaled model is a first-class model: its own identity rows pass
    even though it carries torsion."""
    pts = conf_heis_x.sample_points(3, seed=3)
    rows = phlab.identity_suite(conf_heis_x, pts)
    assert_rows_pass(rows)
    conn = phlab.solve_connection(conf_heis_x, pts)
    assert np.max(np.abs(conn.tau)) > 1e-3     # genuinely non-Sasakian


CR_PAIRS = [
    # f = t + i|z|^2 has nonzero u_0: the decisive coefficient check
    ("t+i|z|2", lambda x, y, t: (t, x ** 2 + y ** 2)),
    # f = z = x + iy
    ("z", lambda x, y, t: (x, y)),
    # f = z^2
    ("z2", lambda x, y, t: (x ** 2 - y ** 2, 2 * x * y)),
    # constants are trivially CR
    ("const", lambda x, y, t: (sp.Integer(3), sp.Integer(-1))),
]


@pytest.mark.parametrize("name,pair", CR_PAIRS, ids=[p[0] for p in CR_PAIRS])
def test_pluriharmonic_hessian_identity(heis1, name, pair):
    x, y, t = heis1.coords
    u, v = pair(x, y, t)
    pts = heis1.sample_points(4, seed=8)
    rows = assert_rows_pass(phlab.pluriharmonic_hessian_check(heis1, u, v, pts))
    ids = {r["id"] for r in rows}
    assert {"pluriharmonic-hessian", "hessian-commutation-u",
            "hessian-commutation-v"} <= ids


def test_pluriharmonic_rejects_non_cr(heis1):
    x, y, t = heis1.coords
    with pytest.raises(PreconditionFailed):
        phlab.pluriharmonic_hessian_check(heis1, x, sp.Integer(0),
                                          heis1.sample_points(2, seed=1))


def test_pluriharmonic_higher_dimension(heis2):
    x1, y1, x2, y2, t = heis2.coords
    u, v = t, x1 ** 2 + y1 ** 2 + x2 ** 2 + y2 ** 2
    pts = heis2.sample_points(2, seed=9)
    assert_rows_pass(phlab.pluriharmonic_hessian_check(heis2, u, v, pts))


def test_scalar_complex_jets_cr_condition(heis1):
    """T_bar(z) = 0 for z = x + iy on the flat model: the antiholomorphic
    derivative of a CR function vanishes in the packet's complex frame."""
    x, y, _t = heis1.coords
    pts = heis1.sample_points(3, seed=10)
    conn = phlab.solve_connection(heis1, pts)
    n = heis1.n
    _, uc, _, _ = phlab.scalar_complex_jets(heis1, conn, x, pts)
    _, vc, _, _ = phlab.scalar_complex_jets(heis1, conn, y, pts)
    anti = slice(1 + n, 1 + 2 * n)
    assert np.max(np.abs(uc[:, anti] + 1j * vc[:, anti])) < 1e-9

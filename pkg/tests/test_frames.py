"""Adapted frames: contact data, Webster metric, J, Levi form, Lie calculus."""
import numpy as np
import pytest

import phlab


ALL_MODEL_FIXTURES = ["heis1", "heis2", "sphere1", "sphere2", "quad_minus",
                      "quad_plus", "weighted", "conf_heis_x"]


@pytest.fixture(params=ALL_MODEL_FIXTURES, scope="session")
def any_model(request):
    return request.getfixturevalue(request.param)


def test_frame_packet_contact_relations(any_model):
    model = any_model
    pts = model.sample_points(4, seed=7)
    fp = phlab.frame_packet(model, pts)
    m = model.m

    # theta(T) = 1 and dtheta(T, .) = 0 characterize the Reeb field
    assert np.max(np.abs(np.einsum("bi,bi->b", fp.theta, fp.T) - 1.0)) < 1e-10
    assert np.max(np.abs(np.einsum("bi,bij->bj", fp.T, fp.K))) < 1e-9

    # the adapted frame is Webster-orthonormal: e^T g e = identity
    gram = np.einsum("bia,bij,bjc->bac", fp.e, fp.g, fp.e)
    assert np.max(np.abs(gram - np.eye(m))) < 1e-9

    # J^2 = -identity on the horizontal bundle, J T = 0
    JJ = np.einsum("bij,bjk->bik", fp.J, fp.J)
    proj_h = np.eye(m) - np.einsum("bi,bj->bij", fp.T, fp.theta)
    assert np.max(np.abs(JJ + proj_h)) < 1e-9
    assert np.max(np.abs(np.einsum("bij,bj->bi", fp.J, fp.T))) < 1e-10

    # compatibility g(JX, JY) = g(X, Y) - theta(X) theta(Y)
    gJ = np.einsum("bki,bkl,blj->bij", fp.J, fp.g, fp.J)
    tt = np.einsum("bi,bj->bij", fp.theta, fp.theta)
    assert np.max(np.abs(gJ - (fp.g - tt))) < 1e-9

    # Omega = -dtheta and Omega(X, Y) = g(X, JY)
    assert np.array_equal(fp.Omega, -fp.K)
    gJright = np.einsum("bik,bkj->bij", fp.g, fp.J)
    assert np.max(np.abs(fp.Omega - gJright)) < 1e-9


def test_levi_matrix_positive_definite(any_model):
    model = any_model
    pts = model.sample_points(4, seed=8)
    L = phlab.levi_matrix(model, pts)
    assert L.shape == (4, model.n, model.n)
    assert np.max(np.abs(L - np.conj(np.swapaxes(L, -2, -1)))) < 1e-10
    eig = np.linalg.eigvalsh(L)
    assert np.min(eig) > 1e-6


def test_reeb_field_matches_packet(sphere1):
    pts = sphere1.sample_points(3, seed=1)
    T = phlab.reeb_field(sphere1, pts)
    fp = phlab.frame_packet(sphere1, pts)
    assert np.max(np.abs(T - fp.T)) < 1e-12


def test_gram_schmidt_frame_is_levi_orthonormal(sphere2):
    """The complex frame rows satisfy L(T_a, conj(T_b)) = delta/2."""
    pts = sphere2.sample_points(3, seed=3)
    fp = phlab.frame_packet(sphere2, pts)
    # Levi pairing through dtheta: L(Z, W̄) = -i dθ(Z, W̄)
    Z = fp.Tc
    pair = -1j * np.einsum("bai,bij,bcj->bac", Z, fp.K, np.conj(Z))
    assert np.max(np.abs(pair - 0.5 * np.eye(sphere2.n))) < 1e-9


def test_heisenberg_reeb_is_dt(heis1):
    pts = heis1.sample_points(4, seed=0)
    fp = phlab.frame_packet(heis1, pts)
    expected = np.zeros((4, 3))
    expected[:, 2] = 1.0
    assert np.max(np.abs(fp.T - expected)) < 1e-12


def test_lie_bracket_heisenberg_frame(heis1):
    """[E1, E2] = -T for E1 = (dx + 2y dt)/2, E2 = (dy - 2x dt)/2."""
    def E1(pts):
        out = np.zeros_like(pts)
        out[:, 0] = 0.5
        out[:, 2] = pts[:, 1]
        return out

    def E2(pts):
        out = np.zeros_like(pts)
        out[:, 1] = 0.5
        out[:, 2] = -pts[:, 0]
        return out

    pts = heis1.sample_points(4, seed=2)
    br = phlab.lie_bracket(E1, E2, pts)
    expected = np.zeros((4, 3))
    expected[:, 2] = -1.0
    assert np.max(np.abs(br - expected)) < 1e-8


def test_lie_derivative_reeb_preserves_theta(sphere1, heis1):
    """L_T theta = iota_T dtheta + d(theta(T)) = 0 for every Reeb field."""
    for model in (sphere1, heis1):
        pts = model.sample_points(3, seed=5)

        def T_field(q, _model=model):
            return phlab.reeb_field(_model, q)

        def theta_form(q, _model=model):
            return _model.theta(q)

        lie = phlab.lie_derivative_form(T_field, theta_form, pts, m=model.m,
                                        scale=model.fd_scale)
        assert np.max(np.abs(lie)) < 1e-7


def test_frame_rotation_covariance(sphere1):
    """A constant unitary rotation of the CR frame leaves g, J, Omega fixed."""
    pts = sphere1.sample_points(3, seed=9)
    base = phlab.frame_packet(sphere1, pts)
    phase = np.exp(1j * 0.37).reshape(1, 1)
    rot = phlab.frame_packet(sphere1, pts, rotate=phase)
    for name in ("g", "J", "Omega", "T"):
        assert np.max(np.abs(getattr(base, name) - getattr(rot, name))) < 1e-9
    # the frame itself moves
    assert np.max(np.abs(base.e - rot.e)) > 1e-3


def test_degenerate_contact_rejected():
    """A form with theta wedge dtheta^n = 0 must be refused."""
    import sympy as sp
    x, y, t = sp.symbols("x y t", real=True)
    flat = phlab.ChartModel(
        label="degenerate", family="test", n=1, coords=(x, y, t),
        theta_sym=(sp.Integer(0), sp.Integer(0), sp.Integer(1)),  # theta = dt
        domain=phlab.model_heisenberg(1).domain,
        frame_table=phlab.model_heisenberg(1)._frame_table)
    with pytest.raises(phlab.PhlabError):
        phlab.frame_packet(flat, np.zeros((1, 3)))

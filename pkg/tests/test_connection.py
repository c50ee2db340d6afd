"""Connection solve: axioms, torsion structure, frame/coordinate conversion."""
import numpy as np
import pytest

import phlab


def test_axiom_residuals_tiny(sphere1, heis1, quad_minus):
    for model in (sphere1, heis1, quad_minus):
        pts = model.sample_points(4, seed=6)
        conn = phlab.solve_connection(model, pts)
        assert np.max(conn.residual) < 1e-9, model.label


def test_torsion_shape_and_reeb_annihilation(sphere2):
    pts = sphere2.sample_points(3, seed=1)
    conn = phlab.solve_connection(sphere2, pts)
    m = sphere2.m
    assert conn.tau.shape == (3, m, m)
    # tau T = 0 and the torsion of a pair of horizontal fields is vertical
    assert np.max(np.abs(conn.tau[:, :, 0])) < 1e-9
    assert np.max(np.abs(conn.A - np.swapaxes(conn.A, -2, -1))) < 1e-9


def test_sasakian_models_have_zero_torsion(sphere1, heis1, quad_minus):
    for model in (sphere1, heis1, quad_minus):
        pts = model.sample_points(3, seed=2)
        conn = phlab.solve_connection(model, pts)
        assert np.max(np.abs(conn.tau)) < 1e-8, model.label


def test_conformal_heisenberg_torsion_closed_form(conf_heis_x):
    """theta-hat = exp(2x) theta over the flat model: the torsion operator's
    horizontal frame block is (1/2) exp(-2x) [[0, 1], [1, 0]]."""
    pts = np.array([[0.3, -0.2, 0.1], [0.0, 0.0, 0.0], [-0.4, 0.5, -0.3]])
    conn = phlab.solve_connection(conf_heis_x, pts)
    for b, p in enumerate(pts):
        expected = 0.5 * np.exp(-2.0 * p[0]) * np.array([[0.0, 1.0],
                                                         [1.0, 0.0]])
        assert np.max(np.abs(conn.A[b][1:, 1:] - expected)) < 1e-9
    # A anti-commutes with J: A(JX, JY) = -A(X, Y)
    Jf = np.zeros((3, 3))
    Jf[2, 1], Jf[1, 2] = 1.0, -1.0
    AJ = np.einsum("ki,bkl,lj->bij", Jf, conn.A, Jf)
    assert np.max(np.abs(AJ + conn.A)) < 1e-9


def test_frame_coordinate_round_trip(sphere1):
    pts = sphere1.sample_points(3, seed=4)
    conn = phlab.solve_connection(sphere1, pts)
    fp = phlab.frame_packet(sphere1, pts)
    back = phlab.coordinate_to_frame(conn.Gamma_coord, fp.e, fp.f, conn.de)
    assert np.max(np.abs(back - conn.Gamma_frame)) < 1e-8
    forth = phlab.frame_to_coordinate(back, fp.e, fp.f, conn.de)
    assert np.max(np.abs(forth - conn.Gamma_coord)) < 1e-8
    assert np.array_equal(phlab.coordinate_connection(conn), conn.Gamma_coord)


def test_metric_parallel_coordinate_form(heis1):
    """nabla g = 0 checked directly from the coordinate Christoffels:
    partial_i g_jk = Gamma^l_{ij} g_lk + Gamma^l_{ik} g_jl."""
    pts = heis1.sample_points(3, seed=3)
    conn = phlab.solve_connection(heis1, pts)

    def metric(q):
        return phlab.frame_packet(heis1, q).g

    dG = phlab.fd_first(metric, pts, 1e-5)       # (B, i, j, k)
    G = metric(pts)
    recon = (np.einsum("blij,blk->bijk", conn.Gamma_coord, G)
             + np.einsum("blik,bjl->bijk", conn.Gamma_coord, G))
    # dG[b, i, j, k] = partial_i g_{jk}
    assert np.max(np.abs(dG - recon)) < 1e-6


def test_reeb_parallel_coordinate_form(sphere1):
    """nabla T = 0: partial_i T^k + Gamma^k_{i l} T^l = 0."""
    pts = sphere1.sample_points(3, seed=8)
    conn = phlab.solve_connection(sphere1, pts)

    def reeb(q):
        return phlab.reeb_field(sphere1, q)

    dT = phlab.fd_first(reeb, pts, 1e-5)         # (B, i, k)
    T = reeb(pts)
    cov = dT + np.einsum("bkil,bl->bik", conn.Gamma_coord, T)
    assert np.max(np.abs(cov)) < 1e-6


def test_structure_functions_reproduce_brackets(heis1):
    """c^k_{ab} e_k = [e_a, e_b] for the builtin flat frame."""
    pts = heis1.sample_points(2, seed=5)
    conn = phlab.solve_connection(heis1, pts)
    fp = phlab.frame_packet(heis1, pts)
    # bracket of frame columns a=1, b=2 computed from the stored jets:
    # [e_a, e_b]^mu = e_a^nu d_nu e_b^mu - e_b^nu d_nu e_a^mu
    br = (np.einsum("bna,bnmc->bmac", fp.e, conn.de)
          - np.einsum("bnc,bnma->bmac", fp.e, conn.de))
    recon = np.einsum("bkac,bmk->bmac", conn.c, fp.e)
    assert np.max(np.abs(br - recon)) < 1e-7

"""Pseudohermitian immersions: gates, second fundamental form, curvature."""
import numpy as np
import pytest

import phlab
from phlab import InvalidArgument, PreconditionFailed

from conftest import assert_rows_pass


@pytest.fixture(scope="module", params=["sphere-in-sphere",
                                        "heisenberg-in-heisenberg"])
def standard(request):
    return phlab.immersion_standard(1, 2, request.param)


@pytest.fixture(scope="module")
def std_point(standard):
    return standard.source.sample_points(1, seed=3, margin=0.25)[0]


def test_packet_structure(standard, std_point):
    pk = phlab.second_fundamental_form(standard, std_point)
    m_s, m_t = standard.source.m, standard.target.m
    assert pk.k == (m_t - m_s) // 2 == 1
    assert pk.alpha.shape == (m_s, m_s, m_t)
    assert pk.alpha_normal.shape == (m_s, m_s, 2 * pk.k)
    assert pk.tangential_residual < 1e-6
    assert pk.split_residual < 1e-10
    # both standard embeddings are totally geodesic: alpha vanishes
    assert np.max(np.abs(pk.alpha)) < 1e-10
    assert np.max(np.abs(pk.Q)) < 1e-10


def test_packet_rows_pass(standard, std_point):
    pk = phlab.second_fundamental_form(standard, std_point)
    rows = assert_rows_pass(phlab.packet_rows(pk))
    ids = {r["id"] for r in rows}
    assert {"tangential-part-vanishes", "pullback-metric",
            "torsion-transfer", "weingarten-duality"} <= ids


def test_lemma_rows_pass(standard, std_point):
    pk = phlab.second_fundamental_form(standard, std_point)
    assert_rows_pass(phlab.lemma1_check(pk))


def test_gauss_equation_and_control(standard, std_point):
    rows = phlab.gauss_equation_check(standard, std_point)
    by_id = {r["id"]: r for r in rows}
    assert by_id["gauss-equation"]["passed"]
    assert by_id["gauss-random-tuples"]["passed"]
    control = by_id["gauss-alpha-perturbation-control"]
    assert control["passed"], \
        "a seeded perturbation of alpha must produce a visible residual"
    assert "negative control" in control.get("note", "")
    assert control["residual"] > 1e-3


def test_monotonicity_equality_case(standard, std_point):
    rows = assert_rows_pass(phlab.monotonicity_check(standard, std_point))
    # totally geodesic: the source and target curvatures agree exactly,
    # so every correction row reports a (near-)zero gap
    for r in rows:
        if r["id"].startswith("sectional-monotonicity"):
            assert "H" in r.get("note", "")


def test_immersion_suite_all_rows(standard):
    pts = standard.source.sample_points(2, seed=0, margin=0.25)
    rows = assert_rows_pass(phlab.immersion_suite(standard, pts))
    assert len(rows) >= 40
    assert any(r["id"].endswith("@1") for r in rows)


def test_identity_map_rejected(heis1):
    ident = phlab.ImmersionMap(source=heis1, target=heis1,
                               matrix=np.eye(heis1.m), label="identity")
    with pytest.raises(InvalidArgument):
        phlab.second_fundamental_form(ident, np.zeros(heis1.m))


def test_scaled_chart_map_rejected(heis1, heis2):
    """Doubling the chart does not pull theta' back to theta: the
    isopseudohermitian gate must fire."""
    P = np.zeros((heis2.m, heis1.m))
    P[0, 0] = P[1, 1] = P[4, 2] = 2.0
    bad = phlab.ImmersionMap(source=heis1, target=heis2, matrix=P,
                             label="scaled")
    with pytest.raises(PreconditionFailed) as err:
        phlab.second_fundamental_form(bad, np.zeros(3))
    assert "pullback-theta" in str(err.value)


def test_monotonicity_rejects_vertical_plane(standard, std_point):
    v = np.zeros(standard.source.m)
    v[0] = 1.0
    with pytest.raises(InvalidArgument):
        phlab.monotonicity_check(standard, std_point, planes=[v])

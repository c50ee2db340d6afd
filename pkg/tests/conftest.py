"""Shared fixtures.

Models are session-scoped because building one compiles symbolic jet tables;
curvature packets at a few points are likewise shared across test modules.
All sampling is seeded, so every run sees identical points.
"""
import numpy as np
import pytest

import phlab


def failing(rows):
    return [r for r in rows if not r["passed"]]


def assert_rows_pass(rows):
    bad = failing(rows)
    detail = [(r["id"], r["residual"], r["tolerance"], r.get("note", ""))
              for r in bad]
    assert not bad, f"failing rows: {detail}"
    return rows


@pytest.fixture(scope="session")
def rows_ok():
    return assert_rows_pass


@pytest.fixture(scope="session")
def heis1():
    return phlab.model_from_id("heisenberg:n=1")


@pytest.fixture(scope="session")
def heis2():
    return phlab.model_from_id("heisenberg:n=2")


@pytest.fixture(scope="session")
def sphere1():
    return phlab.model_from_id("sphere:n=1")


@pytest.fixture(scope="session")
def sphere2():
    return phlab.model_from_id("sphere:n=2")


@pytest.fixture(scope="session")
def quad_minus():
    return phlab.model_from_id("quadric:-,c=0.5")


@pytest.fixture(scope="session")
def quad_plus():
    return phlab.model_from_id("quadric:+,c=0.5")


@pytest.fixture(scope="session")
def weighted():
    return phlab.model_from_id("weighted-sphere:a=1|2")


@pytest.fixture(scope="session")
def conf_heis_x():
    """Heisenberg n=1 rescaled by u = x: carries nonzero torsion."""
    return phlab.model_from_id("conformal:heisenberg,n=1,u=x1")


@pytest.fixture(scope="session")
def sphere1_packet(sphere1):
    pts = sphere1.sample_points(5, seed=2)
    return phlab.curvature_packet(sphere1, pts, with_nabla=True)


@pytest.fixture(scope="session")
def heis1_packet(heis1):
    pts = heis1.sample_points(5, seed=2)
    return phlab.curvature_packet(heis1, pts, with_nabla=True)


@pytest.fixture(scope="session")
def quad_minus_packet(quad_minus):
    pts = quad_minus.sample_points(5, seed=2)
    return phlab.curvature_packet(quad_minus, pts, with_nabla=True)


def unit_horizontal(n, count, seed):
    return phlab.sample_horizontal_unit(n, count, seed=seed)


@pytest.fixture(scope="session")
def origin3():
    return np.zeros(3)

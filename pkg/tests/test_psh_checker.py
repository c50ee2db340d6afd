"""Infinitesimal symmetry checker on the flat model's candidate fields."""
import numpy as np
import pytest

import phlab
from phlab import InvalidArgument


@pytest.fixture(scope="module")
def candidates(heis1):
    return phlab.heisenberg_symmetry_candidates(heis1)


def test_candidate_list_shape(candidates):
    names = [name for name, _ in candidates]
    assert "bare-translation-x" in names
    # (n+1)^2 = 4 genuine generators plus the designated failing field
    assert len(names) == 5
    assert len(set(names)) == 5


def test_genuine_fields_pass(heis1, candidates):
    pts = heis1.sample_points(6, seed=2)
    passing = []
    for name, field in candidates:
        if name == "bare-translation-x":
            continue
        report = phlab.is_infinitesimal_psh(heis1, field, pts)
        assert report["passes"], (name, report)
        assert report["lie_theta_max"] < 1e-7
        assert report["cr_span_max"] < 1e-7
        passing.append(name)
    assert len(passing) == 4


def test_bare_translation_fails(heis1, candidates):
    """d/dx alone does not preserve the contact form (it needs the 2y dt
    correction), so the checker must reject it."""
    field = dict(candidates)["bare-translation-x"]
    pts = heis1.sample_points(6, seed=2)
    report = phlab.is_infinitesimal_psh(heis1, field, pts)
    assert not report["passes"]
    assert max(report["lie_theta_max"], report["cr_span_max"]) > 1e-3


def test_checker_on_rotation_field(sphere1):
    """The phase rotation z -> exp(i s) z generates symmetries of the
    sphere chart as well."""
    pts = sphere1.sample_points(4, seed=5)

    def rotation(q):
        out = np.zeros_like(q)
        out[:, 0] = -q[:, 1]
        out[:, 1] = q[:, 0]
        return out

    report = phlab.is_infinitesimal_psh(sphere1, rotation, pts)
    assert report["passes"], report


def test_candidates_require_flat_n1(sphere1, heis2):
    for model in (sphere1, heis2):
        with pytest.raises(InvalidArgument):
            phlab.heisenberg_symmetry_candidates(model)

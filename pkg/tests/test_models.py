"""Model registry, chart domains, scalar-field presets, immersion builders."""
import numpy as np
import pytest
import sympy as sp

import phlab
from phlab import InvalidArgument


def test_list_models_catalog():
    cat = phlab.list_models()
    families = [row["family"] for row in cat]
    assert families == ["heisenberg", "sphere", "quadric", "weighted-sphere",
                        "conformal"]
    for row in cat:
        assert set(row) == {"family", "signature", "example", "note"}
        # every example id must build
        model = phlab.model_from_id(row["example"])
        assert model.n >= 1 and model.m == 2 * model.n + 1


@pytest.mark.parametrize("mid,family,n", [
    ("heisenberg:n=1", "heisenberg", 1),
    ("heisenberg:n=2", "heisenberg", 2),
    ("sphere:n=1", "sphere", 1),
    ("quadric:-,c=0.5", "quadric", 1),
    ("quadric:+,c=0.5,n=1", "quadric", 1),
    ("weighted-sphere:a=1|2", "weighted-sphere", 1),
    ("conformal:heisenberg,n=1,u=x1", "conformal", 1),
])
def test_model_from_id(mid, family, n):
    model = phlab.model_from_id(mid)
    assert model.family == family
    assert model.n == n


def test_model_from_id_rejects_garbage():
    for bad in ("nosuch:n=1", "sphere:n=0", "quadric:&,c=0.5", "sphere:n=x"):
        with pytest.raises(InvalidArgument):
            phlab.model_from_id(bad)


def test_quadric_needs_positive_c():
    with pytest.raises(InvalidArgument):
        phlab.model_from_id("quadric:-,c=0")


def test_sample_points_deterministic(sphere1):
    a = sphere1.sample_points(6, seed=4)
    b = sphere1.sample_points(6, seed=4)
    c = sphere1.sample_points(6, seed=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.shape == (6, sphere1.m)
    assert np.all(sphere1.domain.contains(a))


def test_margin_shrinks_box(heis1):
    wide = heis1.sample_points(16, seed=0, margin=0.0)
    slim = heis1.sample_points(16, seed=0, margin=0.5)
    box = heis1.domain.box
    half = (box[:, 1] - box[:, 0]) / 2.0
    center = box.mean(axis=1)
    assert np.max(np.abs(slim - center) / half) <= 0.5 + 1e-12
    assert wide.shape == slim.shape
    with pytest.raises(InvalidArgument):
        heis1.sample_points(4, margin=1.0)


def test_contact_volume_positive(sphere1, heis1, weighted):
    for model in (sphere1, heis1, weighted):
        pts = model.sample_points(8, seed=1)
        vol = model.contact_volume(pts)
        assert np.all(vol > 1e-8)


def test_decode_scalar_field_presets(heis1):
    coords = heis1.coords
    assert phlab.decode_scalar_field("0", coords) == 0
    assert phlab.decode_scalar_field("x1", coords) == coords[0]
    assert float(phlab.decode_scalar_field("const:0.7", coords)) == 0.7
    assert float(phlab.decode_scalar_field("0.25", coords)) == 0.25
    hom = phlab.decode_scalar_field("homothety:2", coords)
    assert abs(float(hom) + np.log(2.0) / 2.0) < 1e-15
    with pytest.raises(InvalidArgument):
        phlab.decode_scalar_field("homothety:-1", coords)
    with pytest.raises(InvalidArgument):
        phlab.decode_scalar_field("spline", coords)


def test_conformal_rescale_scales_theta(heis1):
    x = heis1.coords[0]
    hat = phlab.conformal_rescale(heis1, x)
    pts = heis1.sample_points(5, seed=3)
    scale = np.exp(2.0 * pts[:, 0])[:, None]
    assert np.max(np.abs(hat.theta(pts) - scale * heis1.theta(pts))) < 1e-12
    assert hat.base is heis1
    assert hat.family == "conformal"


def test_immersion_standard_families():
    for family in ("sphere-in-sphere", "heisenberg-in-heisenberg"):
        imm = phlab.immersion_standard(1, 2, family)
        assert imm.source.n == 1 and imm.target.n == 2
        pts = imm.source.sample_points(3, seed=0)
        img = imm.phi(pts)
        assert img.shape == (3, imm.target.m)
        assert np.all(imm.target.domain.contains(img))
        # constant differential
        d = imm.dphi(pts)
        assert d.shape[-2:] == (imm.target.m, imm.source.m)


def test_immersion_standard_rejects_bad_dims():
    with pytest.raises(InvalidArgument):
        phlab.immersion_standard(2, 2, "sphere-in-sphere")
    with pytest.raises(InvalidArgument):
        phlab.immersion_standard(0, 2, "sphere-in-sphere")
    with pytest.raises(InvalidArgument):
        phlab.immersion_standard(1, 2, "torus-in-torus")


def test_chart_model_guards():
    x, y, t = sp.symbols("x y t", real=True)
    with pytest.raises(InvalidArgument):
        phlab.ChartModel(label="bad", family="test", n=0, coords=(x, y, t),
                         theta_sym=(sp.Integer(0),) * 3,
                         domain=phlab.model_heisenberg(1).domain)

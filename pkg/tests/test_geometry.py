import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cornervoid import geometry as g
from cornervoid.surface_energy import wulff_corner_angle

HALF_PI = 0.5 * math.pi


def test_circle_geometry():
    c = g.preset_circle(2.0)
    r, rd, rdd = g.eval_shape(c, 0.3)
    assert (r, rd, rdd) == (2.0, 0.0, 0.0)
    assert g.curvature(r, rd, rdd) == pytest.approx(0.5)
    assert g.orientation(r, rd, 0.3) == pytest.approx(0.3 + math.pi)
    assert g.area_first_quadrant(c) == pytest.approx(math.pi, rel=1e-14)
    assert g.arc_length(c) == pytest.approx(math.pi, rel=1e-14)


@given(st.floats(math.pi + 1e-3, 2 * math.pi - 1e-3))
def test_orientation_at_corner_slope(alpha):
    # rdot/r = cot(alpha/2) at theta = 0 gives the corner orientation
    r = 1.3
    rd = r / math.tan(alpha / 2)
    assert g.orientation(r, rd, 0.0) == pytest.approx(math.pi + (alpha - math.pi) / 2)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-0.1, 0.1), min_size=3, max_size=6))
def test_area_matches_adaptive_quadrature(tail):
    spec = g.ShapeSpec(cheb=np.array([1.0] + tail))
    ref, _ = quad(lambda t: 0.5 * spec.radius(t, 0)[0] ** 2, 0.0, HALF_PI,
                  epsabs=1e-14, epsrel=1e-14)
    assert g.area_first_quadrant(spec) == pytest.approx(ref, rel=1e-12)
    assert g.area_first_quadrant(g.normalize_area(spec)) == pytest.approx(math.pi / 4,
                                                                          rel=1e-13)


def test_area_with_corner_terms():
    spec = g.ShapeSpec.with_angles(3.8, 4.2, [1.0, 0.05], corner=(0.02, -0.03, 0.01, 0.04))
    ref, _ = quad(lambda t: 0.5 * spec.radius(t, 0)[0] ** 2, 0.0, HALF_PI,
                  epsabs=1e-14, epsrel=1e-14, limit=200)
    assert g.area_first_quadrant(spec) == pytest.approx(ref, rel=1e-11)


def test_singular_second_derivative_at_corner():
    spec = g.ShapeSpec.with_angles(3.8, 3.8, [1.0], corner=(0.01, 0.0, 0.0, 0.0))
    with pytest.raises(g.SingularPointError):
        spec.radius(0.0, 2)
    assert np.isfinite(spec.radius(1e-3, 2)[2])


def test_corner_derivative_matches_finite_difference():
    spec = g.ShapeSpec.with_angles(3.8, 4.2, [1.0, 0.05, -0.02],
                                   corner=(0.02, -0.03, 0.01, 0.04))
    t, h = 0.7, 1e-6
    r_p, r_m = spec.radius(t + h, 0)[0], spec.radius(t - h, 0)[0]
    assert spec.radius(t, 1)[1] == pytest.approx((r_p - r_m) / (2 * h), rel=1e-8)


def test_resized_keeps_shape():
    spec = g.ShapeSpec(cheb=np.array([1.0, 0.1, 0.01]))
    big = spec.resized(12)
    assert big.N == 12
    t = np.linspace(0, HALF_PI, 9)
    assert big.radius(t, 0)[0] == pytest.approx(spec.radius(t, 0)[0], abs=1e-15)
    with pytest.raises(ValueError):
        spec.resized(4)


def test_positive_check():
    with pytest.raises(g.InvalidShapeError):
        g.check_positive(g.ShapeSpec(cheb=np.array([0.1, 0.5])))
    g.check_positive(g.preset_circle())


def test_overlapping_circles():
    s = g.preset_overlapping_circles(2 * math.pi / 3)
    assert s.radius(0.0, 0)[0] == pytest.approx(0.5)
    assert s.radius(HALF_PI, 0)[0] == pytest.approx(math.sqrt(3) / 2)
    assert s.alpha2 == pytest.approx(4 * math.pi / 3)
    circle = g.preset_overlapping_circles(HALF_PI)
    t = np.linspace(0, HALF_PI, 7)
    assert circle.radius(t, 0)[0] == pytest.approx(np.ones(7))
    with pytest.raises(ValueError):
        g.preset_overlapping_circles(math.pi)


@settings(max_examples=20, deadline=None)
@given(st.floats(HALF_PI + 0.05, math.pi - 0.05), st.floats(0.05, HALF_PI - 0.05))
def test_overlapping_circles_lie_on_a_unit_circle(a0, t):
    s = g.preset_overlapping_circles(a0)
    r, rd, rdd = s.radius(t)
    z = r * np.exp(1j * t)
    assert abs(z - math.cos(a0)) == pytest.approx(1.0, abs=1e-13)
    assert g.curvature(r, rd, rdd) == pytest.approx(1.0, abs=1e-12)


def test_wulff_shape():
    w = g.WulffShape(0.08)
    assert w.alpha0 == pytest.approx(wulff_corner_angle(0.08))
    assert 4 * g.area_first_quadrant(w) == pytest.approx(math.pi, rel=1e-10)
    fit, resid = g.wulff_fit(0.08, 32)
    assert resid < 1e-6
    assert fit.alpha1 == fit.alpha2 == w.alpha0


def test_orientation_profile_of_circle():
    prof = g.orientation_profile(g.preset_circle(), m=60)
    assert np.all(np.diff(prof.s) >= -1e-14)
    assert prof.quadrant_length == pytest.approx(HALF_PI, rel=1e-13)
    assert prof.jumps == pytest.approx(np.zeros(4), abs=1e-12)
    assert prof.omega - prof.theta == pytest.approx(np.full(len(prof.s), math.pi), abs=1e-12)


def test_orientation_profile_jump_of_wulff_shape():
    w = g.WulffShape(0.08)
    prof = g.orientation_profile(w, m=60)
    assert np.abs(prof.jumps) == pytest.approx(np.full(4, w.alpha0 - math.pi), abs=1e-8)


def test_corner_window_slope_circle():
    assert g.corner_window_slope(g.preset_circle(), 0, cells=10) == pytest.approx(1.0,
                                                                                 rel=1e-6)


def test_shape_csv(tmp_path):
    path = tmp_path / "shape.csv"
    g.write_shape_csv(path, g.preset_circle(), m=20)
    lines = path.read_text().splitlines()
    assert lines[0] == "theta,r,x,y,kappa,omega,s"
    assert len(lines) > 20

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornervoid import elasticity as el
from cornervoid.geometry import preset_circle, preset_overlapping_circles

HALF_PI = 0.5 * math.pi


def test_kirsch_values():
    assert el.kirsch_trace(HALF_PI, 0.0) == pytest.approx(3.0)
    assert el.kirsch_trace(0.0, 0.0) == pytest.approx(-1.0)
    assert el.kirsch_trace(0.4, 1.0) == pytest.approx(2.0)


@settings(max_examples=10, deadline=None)
@given(st.floats(-1.0, 1.0))
def test_circle_matches_kirsch(chi):
    sol = el.solve(preset_circle(), chi, 16)
    err = el.l2_error(sol.trace, lambda t: el.kirsch_trace(t, chi))
    assert err < 1e-8


def test_circle_potential_is_single_pole():
    # phi = (1 - chi)/(2 z) for the unit circle
    chi = 0.3
    sol = el.solve(preset_circle(), chi, 16)
    c, _ = el.laurent_coefficients(sol, kmax=6)
    assert c[0] == pytest.approx(0.5 * (1 - chi), abs=1e-10)
    assert np.abs(c[1:]) == pytest.approx(np.zeros(5), abs=1e-10)


def test_trace_sigma_scalar():
    sol = el.solve(preset_circle(), 0.0, 16)
    val, at_corner = el.trace_sigma(sol, HALF_PI)
    assert val == pytest.approx(3.0, abs=1e-9) and not at_corner
    val, _ = el.trace_sigma(sol, 0.0)
    assert val == pytest.approx(-1.0, abs=1e-9)


def test_cusp_corner_reports_infinite_trace():
    sol = el.solve(preset_overlapping_circles(2 * math.pi / 3), 0.0, 32)
    val, at_corner = el.trace_sigma(sol, HALF_PI)
    assert at_corner and math.isinf(val)
    assert math.isfinite(sol.trace(np.array([HALF_PI - 1e-6]))[0])


def test_principal_value_identity():
    # g = 1/z^k is analytic outside the void and vanishes at infinity
    shape = preset_overlapping_circles(2 * math.pi / 3)
    contour = el.build_contour(shape, el.SolverConfig(), 32)
    t = np.linspace(0.1, 1.4, 7)
    r = shape.radius(t, 0)[0]
    z0 = r * np.exp(1j * t)
    for k in (1, 2, 3):
        res = el.analyticity_residual(contour.Z ** -k, contour, z0, z0 ** -k)
        assert np.max(np.abs(res)) < 1e-10
    # an interior-analytic function (z) is not admissible
    res = el.analyticity_residual(contour.Z, contour, z0, z0)
    assert np.max(np.abs(res)) > 0.1


def test_l2_error_examples():
    assert el.l2_error(np.ones_like, np.zeros_like) == pytest.approx(1.0, rel=1e-14)
    assert el.l2_error(np.cos, np.cos) == 0.0
    # mean of cos^2(2t) over the quadrant is 1/2
    assert el.l2_error(lambda t: np.cos(2 * t), np.zeros_like) == \
        pytest.approx(math.sqrt(0.5), rel=1e-13)


def test_traction_residual_small():
    sol = el.solve(preset_circle(), 0.0, 16)
    assert el.traction_residual(sol) < 1e-10
    # h recovered from phi on the circle: far-field-free part
    sol = el.solve(preset_overlapping_circles(2 * math.pi / 3), 0.0, 48)
    assert el.traction_residual(sol) < 1e-3


def test_overlapping_circles_self_convergence():
    shape = preset_overlapping_circles(2 * math.pi / 3)
    a, b = el.solve(shape, 0.0, 48), el.solve(shape, 0.0, 96)
    assert el.l2_error(a.trace, b.trace) < 1e-4


def test_residual_and_diagnostics():
    sol = el.solve(preset_circle(), 0.5, 16)
    assert sol.residual_norm < 1e-8
    assert sol.diagnostics()["N"] == 16


def test_config_validation():
    with pytest.raises(ValueError):
        el.SolverConfig(corner_basis="bogus")
    with pytest.raises(ValueError):
        el.SolverConfig(corner_terms=0)
    with pytest.raises(ValueError):
        el.solve(preset_circle(), 0.0, 4)


def test_polar_and_conformal_bases_agree_on_smooth_shape():
    for basis in ("polar", "conformal"):
        sol = el.solve(preset_circle(), 0.0, 16, el.SolverConfig(corner_basis=basis))
        assert el.l2_error(sol.trace, lambda t: el.kirsch_trace(t, 0.0)) < 1e-8


def test_csv_outputs(tmp_path):
    sol = el.solve(preset_circle(), 0.0, 16)
    el.write_trace_csv(tmp_path / "t.csv", sol)
    el.write_diagnostics(tmp_path / "d.json", sol)
    assert (tmp_path / "t.csv").read_text().startswith("theta,re_phi,im_phi,sigma_trace")
    assert '"cond_estimate"' in (tmp_path / "d.json").read_text()

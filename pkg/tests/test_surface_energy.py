import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornervoid.geometry import ShapeSpec, WulffShape, preset_circle, preset_wulff
from cornervoid.surface_energy import (AnisotropyParams, corner_bc_residual, gamma,
                                       has_corners, stiffness, wulff_corner_angle)

# mpmath findroot at 30 digits on the corner-angle equation, frozen
ALPHA0_008 = 3.6573406263865336593


def test_gamma_values():
    assert gamma(0.0, 0.08) == pytest.approx(1.08)
    assert gamma(math.pi / 4, 0.08) == pytest.approx(0.92)
    assert gamma(math.pi / 8, 0.08, 1) == pytest.approx(-0.32)


def test_stiffness_values():
    assert stiffness(0.0, 0.08) == pytest.approx(-0.2)
    assert stiffness(math.pi / 4, 0.08) == pytest.approx(2.2)
    assert stiffness(1.234, 0.0) == 1.0


@given(st.floats(-10, 10), st.floats(-0.9, 0.9))
def test_stiffness_is_gamma_plus_second_derivative(w, eps):
    assert stiffness(w, eps) == pytest.approx(gamma(w, eps) + gamma(w, eps, 2), abs=1e-13)


@given(st.floats(-10, 10), st.floats(-0.9, 0.9))
def test_quarter_period(w, eps):
    assert gamma(w + math.pi / 2, eps) == pytest.approx(gamma(w, eps), abs=1e-12)


def test_anisotropy_validation():
    with pytest.raises(ValueError):
        AnisotropyParams(1.0)


def test_wulff_corner_angle():
    a0 = wulff_corner_angle(0.08)
    assert a0 == pytest.approx(ALPHA0_008, abs=1e-12)
    assert abs(a0 - 3.66) < 0.01
    assert wulff_corner_angle(0.0) == math.pi
    assert wulff_corner_angle(0.05) == math.pi
    assert not has_corners(0.05) and has_corners(0.08)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.07, 0.3))
def test_corner_angle_solves_balance(eps):
    a = wulff_corner_angle(eps)
    x = 0.5 * (a - math.pi)
    assert math.pi < a < 2 * math.pi
    assert math.tan(x) == pytest.approx(-gamma(x, eps, 1) / gamma(x, eps), abs=1e-10)


def test_corner_bc_residual():
    assert corner_bc_residual(preset_circle(), 0.0, 0.0) == 0.0
    assert corner_bc_residual(preset_circle(), 0.0, 0.08) == pytest.approx(0.0, abs=1e-15)
    assert corner_bc_residual(preset_circle(), math.pi / 2, 0.08) == \
        pytest.approx(0.0, abs=1e-15)
    # r = 1 + 0.1 theta: rdot/r = 0.1 at theta = 0; isotropic gamma' = 0
    tilted = ShapeSpec(cheb=np.array([1 + 0.1 * math.pi / 4, 0.1 * math.pi / 4]))
    assert corner_bc_residual(tilted, 0.0, 0.0) == pytest.approx(-0.1)
    exact = WulffShape(0.08)
    fit = preset_wulff(0.08, 32)
    for end in (0.0, math.pi / 2):
        assert abs(corner_bc_residual(exact, end, 0.08)) < 1e-10
        # derivative of a 28-term fit near the corner
        assert abs(corner_bc_residual(fit, end, 0.08)) < 1e-4

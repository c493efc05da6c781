import json
import math

import numpy as np
import pytest

from cornervoid.elasticity import solve as solve_elastic
from cornervoid.equilibrium import (ConvergenceError, EquilibriumProblem,
                                    angle_bc_residual, continuation_in_lambda,
                                    corner_targets, el_residual, solve_equilibrium,
                                    write_solution_json)
from cornervoid.geometry import ShapeSpec, WulffShape, preset_circle
from cornervoid.params import PhysicalParams

from conftest import stressed_solution

HALF_PI = 0.5 * math.pi


def test_el_residual_circle():
    t = np.linspace(0.1, 1.4, 5)
    c = preset_circle()
    assert el_residual(c, None, 1.0, t, PhysicalParams()) == pytest.approx(np.zeros(5))
    assert el_residual(c, None, 0.0, t, PhysicalParams()) == pytest.approx(np.ones(5))
    with pytest.raises(ValueError):
        el_residual(c, None, 1.0, t, PhysicalParams(Lambda=0.1))


def test_el_residual_with_kirsch_trace():
    p = PhysicalParams(Lambda=0.2)
    sol = solve_elastic(preset_circle(), 0.0, 16)
    # trace 3 at theta = pi/2: 1 - 0.05 * 9
    assert el_residual(preset_circle(), sol, 0.0, HALF_PI, p) == pytest.approx(0.55, abs=1e-8)


def test_angle_bc_residual():
    a = 1.5 * math.pi
    # r = 1 - theta near 0 has r'/r = -1 = -tan(pi/4)
    spec = ShapeSpec(cheb=np.array([1 - math.pi / 4, -math.pi / 4]))
    assert angle_bc_residual(spec, (a, math.pi))[0] == pytest.approx(0.0, abs=1e-15)
    assert angle_bc_residual(preset_circle(), (math.pi, math.pi)) == \
        pytest.approx([0.0, 0.0])


def test_problem_validation():
    with pytest.raises(ValueError):
        EquilibriumProblem(PhysicalParams(), (3.0, math.pi))
    with pytest.raises(ValueError):
        EquilibriumProblem(PhysicalParams(), (math.pi, math.pi), N=6)


def test_circle_is_isotropic_equilibrium():
    sol = solve_equilibrium(EquilibriumProblem(PhysicalParams(), (math.pi, math.pi), 12))
    assert sol.converged and sol.status == "converged"
    assert sol.mu == pytest.approx(1.0, abs=1e-9)
    t = np.linspace(0, HALF_PI, 9)
    assert sol.shape.radius(t, 0)[0] == pytest.approx(np.ones(9), abs=1e-9)
    assert corner_targets(sol.shape, None, PhysicalParams()) == pytest.approx(np.zeros(4))


def test_stress_free_solution_is_wulff(alpha0):
    sol = continuation_in_lambda(
        EquilibriumProblem(PhysicalParams(epsilon=0.08), (alpha0, alpha0), 32), 0.0)
    exact = WulffShape(0.08)
    t = np.linspace(0.01, HALF_PI - 0.01, 50)
    assert np.max(np.abs(sol.shape.radius(t, 0)[0] - exact.radius(t, 0)[0])) < 1e-5
    assert np.max(np.abs(sol.shape.coeffs[:4])) < 1e-12


def test_stressed_solution_residuals(sol_015_32):
    sol = sol_015_32
    assert sol.converged and sol.residual_norm < 1e-6
    groups = sol.residual_groups()
    assert len(groups["corner"]) == 4 and len(groups["area"]) == 1
    assert len(groups["angle"]) == 2
    assert sum(len(v) for v in groups.values()) == sol.problem.N + 1
    targets = corner_targets(sol.shape, sol.elastic, sol.problem.params)
    assert np.array(sol.shape.corner) == pytest.approx(targets, abs=1e-6)


def test_continuation_path_independent():
    a = stressed_solution(0.15, 32, 3)
    b = stressed_solution(0.15, 32, 6)
    t = np.linspace(0, HALF_PI, 41)
    assert np.max(np.abs(a.shape.radius(t, 0)[0] - b.shape.radius(t, 0)[0])) < 1e-6
    assert a.mu == pytest.approx(b.mu, abs=1e-6)


def test_uniaxial_load_elongates_along_load_normal(sol_03_32):
    r = sol_03_32.shape.radius(np.array([0.0, HALF_PI]), 0)[0]
    assert r[1] > r[0]


def test_continuation_arguments():
    p = EquilibriumProblem(PhysicalParams(), (math.pi, math.pi), 12)
    with pytest.raises(ValueError):
        continuation_in_lambda(p, 0.1, steps=0)
    with pytest.raises(ValueError):
        continuation_in_lambda(p, -0.1)


def test_convergence_error_carries_best():
    err = ConvergenceError("x", best=1, last_lambda=0.2)
    assert err.best == 1 and err.last_lambda == 0.2


def test_solution_json(tmp_path, sol_015_32):
    write_solution_json(tmp_path / "s.json", sol_015_32)

    d = json.loads((tmp_path / "s.json").read_text())
    assert d["N"] == 32 and len(d["shape_coeffs"]) == 32
    assert d["params"]["Lambda"] == 0.15

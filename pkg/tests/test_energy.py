import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornervoid.elasticity import solve as solve_elastic
from cornervoid.energy import (UnconvergedInputError, betti_consistency,
                               minimize_corner_angles, solution_energy, total_energy,
                               write_landscape_csv, write_search_json)
from cornervoid.geometry import preset_circle, preset_overlapping_circles
from cornervoid.params import PhysicalParams


@given(st.floats(-0.2, 0.2))
def test_circle_surface_energy(eps):
    # the four-fold modulation integrates to zero around a circle
    rep = total_energy(preset_circle(), None, PhysicalParams(epsilon=eps))
    assert rep.surface == pytest.approx(2 * math.pi, rel=1e-13)
    assert rep.elastic == 0.0 and rep.total == rep.surface


@settings(max_examples=8, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(0.01, 0.5))
def test_circle_elastic_energy(chi, Lam):
    # phi = (1 - chi)/(2z) integrates to -pi (1 - chi)^2 / 2
    sol = solve_elastic(preset_circle(), chi, 16)
    rep = total_energy(preset_circle(), sol, PhysicalParams(chi=chi, Lambda=Lam))
    assert rep.elastic == pytest.approx(-Lam * math.pi * (1 - chi) ** 2 / 2, abs=1e-10)


def test_energy_requires_elastic_solution():
    with pytest.raises(UnconvergedInputError):
        total_energy(preset_circle(), None, PhysicalParams(Lambda=0.1))


@settings(max_examples=6, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(0.0, 0.45))
def test_betti_identity_circle(chi, nu):
    sol = solve_elastic(preset_circle(), chi, 16)
    assert betti_consistency(sol, PhysicalParams(chi=chi, nu=nu)) < 1e-12


def test_betti_identity_cornered_shape():
    sol = solve_elastic(preset_overlapping_circles(2 * math.pi / 3), 0.0, 48)
    assert betti_consistency(sol, PhysicalParams()) < 1e-4


def test_betti_identity_equilibrium(sol_015_32):
    assert betti_consistency(sol_015_32.elastic, sol_015_32.problem.params) < 1e-7


def test_solution_energy_report(sol_015_32):
    rep = solution_energy(sol_015_32)
    d = rep.to_dict()
    assert d["total"] == pytest.approx(rep.surface + rep.elastic)
    assert rep.elastic < 0.0 and d["N"] == 32


def test_small_angle_search(tmp_path, alpha0):
    res = minimize_corner_angles(PhysicalParams(epsilon=0.08), N=16, search_box=0.05,
                                 grid=3, refine=False)
    assert res.grid_shape == (3, 3) and len(res.landscape) == 9
    assert res.best_angles == pytest.approx((alpha0, alpha0))
    write_landscape_csv(tmp_path / "l.csv", res)
    write_search_json(tmp_path / "s.json", res)
    assert (tmp_path / "l.csv").read_text().startswith("alpha1,alpha2,energy,converged")
    assert json.loads((tmp_path / "s.json").read_text())["N"] == 16
    with pytest.raises(ValueError):
        minimize_corner_angles(PhysicalParams(epsilon=0.08), grid=0)

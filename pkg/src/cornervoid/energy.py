"""Total potential energy of an equilibrium void and its minimization over
the two corner angles.

The reported energy is

    Pi = int gamma(omega) ds + Lambda int n . sigma_inf . phi ds

over the full boundary, n pointing out of the solid, with (phi_1, phi_2) the
real and imaginary parts of the perturbation potential. The far-field part
(1+chi) z/4 of the potential contributes Lambda (1+chi)/4 times a multiple
of the void area; the area is fixed, so that term is a shape-independent
constant and is left out together with the other constants.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import elasticity as el
from . import spectral
from .equilibrium import (ConvergenceError, EquilibriumProblem,
                          EquilibriumSolution, NewtonOptions,
                          continuation_in_lambda, solve_equilibrium)
from .geometry import HALF_PI, InvalidShapeError, area_first_quadrant, orientation
from .params import PhysicalParams
from .surface_energy import gamma, wulff_corner_angle


class UnconvergedInputError(ValueError):
    """Energy requested for an elastic solution that failed its checks."""


@dataclass(frozen=True)
class EnergyReport:
    surface: float
    elastic: float
    angles: tuple
    N: int

    @property
    def total(self) -> float:
        return self.surface + self.elastic

    def to_dict(self) -> dict:
        return {"surface": self.surface, "elastic": self.elastic,
                "total": self.total, "angles": list(self.angles), "N": self.N}


def _boundary_rule(panels: int = 16):
    return spectral.graded_rule(0.0, HALF_PI, order=16, n_mid=panels,
                                ratio=0.25, h_min=1e-13)


def total_energy(shape, elastic: el.ElasticitySolution | None,
                 params: PhysicalParams, N: int | None = None,
                 residual_limit: float = 1e-6) -> EnergyReport:
    """Surface plus elastic energy of a two-fold symmetric void.

    ``elastic`` may be None only when Lambda = 0. A solution whose
    least-squares residual exceeds ``residual_limit`` is rejected.
    """
    t, w = _boundary_rule()
    r, rd = shape.radius(t, 1)
    dz = (rd + 1j * r) * np.exp(1j * t)
    omega = orientation(r, rd, t)
    surface = 4.0 * float(np.dot(w, gamma(omega, params.epsilon) * np.abs(dz)))
    elastic_part = 0.0
    if params.Lambda != 0.0:
        if elastic is None:
            raise UnconvergedInputError("an elasticity solution is required")
        if not np.isfinite(elastic.residual_norm) or \
                elastic.residual_norm > residual_limit:
            raise UnconvergedInputError(
                f"elastic residual {elastic.residual_norm:.3e} too large")
        phi = elastic.phi(t)
        # n ds = (-y', x') dtheta for the counter-clockwise parametrization
        integrand = -dz.imag * phi.real + params.chi * dz.real * phi.imag
        elastic_part = 4.0 * params.Lambda * float(np.dot(w, integrand))
    n = N if N is not None else (elastic.N if elastic is not None
                                 else getattr(shape, "N", 0))
    return EnergyReport(surface, elastic_part,
                        (float(getattr(shape, "alpha1", math.pi)),
                         float(getattr(shape, "alpha2", math.pi))), n)


def solution_energy(sol: EquilibriumSolution) -> EnergyReport:
    return total_energy(sol.shape, sol.elastic, sol.problem.params, sol.problem.N)


# reciprocal-work check ----------------------------------------------------

def _uniform_fields(z, chi: float, kappa: float):
    """Displacement (complex u1 + i u2) of the remote uniform field."""
    return kappa * (1 + chi) * z / 4 - (1 + chi) * z / 4 \
        - (chi - 1) * np.conj(z) / 2


def _dot_sigma_n(sxx, syy, sxy, n):
    """sigma . n as a complex number for complex unit normal n."""
    return (sxx * n.real + sxy * n.imag) + 1j * (sxy * n.real + syy * n.imag)


def _cdot(a, b):
    return a.real * b.real + a.imag * b.imag


def betti_consistency(sol: el.ElasticitySolution, params: PhysicalParams,
                      R_probe: float = 50.0, kmax: int = 40,
                      m_probe: int = 512) -> float:
    """Relative mismatch of the reciprocal-work identity.

    With u_p, sigma_p the perturbation fields and u_inf, sigma_inf the remote
    uniform ones, Betti's theorem on the solid between the void boundary and
    a probe circle gives

        int_void n.sigma_inf.u_p = A sigma_inf:eps_inf
            + int_probe (sigma_p n).u_inf - int_probe (sigma_inf n).u_p.

    The left side uses the boundary potential (on a free surface the full
    displacement is (kappa + 1) Phi); the right side uses the Laurent
    expansions of phi and h at radius ``R_probe``. Units have 2G = 1 and
    plane strain, kappa = 3 - 4 nu.
    """
    chi, nu = sol.chi, params.nu
    kappa = 3.0 - 4.0 * nu
    # boundary side
    t, w = _boundary_rule()
    r, rd = sol.shape.radius(t, 1)
    z = r * np.exp(1j * t)
    dz = (rd + 1j * r) * np.exp(1j * t)
    Phi = (1 + chi) * z / 4 + sol.phi(t)
    up = (kappa + 1) * Phi - _uniform_fields(z, chi, kappa)
    nds = -dz.imag + 1j * dz.real     # out of the solid, times |dz|
    lhs = 4.0 * float(np.dot(w, nds.real * up.real + chi * nds.imag * up.imag))
    # probe side
    c, d = el.laurent_coefficients(sol, kmax)
    k = np.arange(1, kmax + 1)
    th = 2 * math.pi * np.arange(m_probe) / m_probe
    zp = R_probe * np.exp(1j * th)
    zk = zp[:, None] ** (-k[None, :])
    phi = zk @ c
    dphi = (zk / zp[:, None] * (-k)) @ c
    d2phi = (zk / zp[:, None] ** 2 * (k * (k + 1))) @ c
    dh = (zk / zp[:, None] * (-k)) @ d
    h = zk @ d
    u_p = kappa * phi - zp * np.conj(dphi) - np.conj(h)
    s_sum = 4 * dphi.real
    s_dif = 2 * (np.conj(zp) * d2phi + dh)      # syy - sxx + 2i sxy
    sxx = 0.5 * (s_sum - s_dif.real)
    syy = 0.5 * (s_sum + s_dif.real)
    sxy = 0.5 * s_dif.imag
    n = np.exp(1j * th)
    ds = R_probe * 2 * math.pi / m_probe
    u_inf = _uniform_fields(zp, chi, kappa)
    t_p = _dot_sigma_n(sxx, syy, sxy, n)
    t_inf = n.real + 1j * chi * n.imag
    probe = float(np.sum(_cdot(t_p, u_inf) - _cdot(t_inf, u_p)) * ds)
    area = 4.0 * area_first_quadrant(sol.shape)
    eps_inf = (1 + chi * chi) - nu * (1 + chi) ** 2
    rhs = area * eps_inf + probe
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


# corner-angle minimization -----------------------------------------------

@dataclass
class AngleSearchResult:
    best_angles: tuple
    best_energy: float
    landscape: list = field(default_factory=list)   # (a1, a2, energy, converged)
    grid_shape: tuple = (0, 0)
    failures: list = field(default_factory=list)
    N: int = 0
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {"best_angles": list(self.best_angles),
                "best_energy": self.best_energy,
                "grid_shape": list(self.grid_shape),
                "failures": [list(f) for f in self.failures],
                "N": self.N, "evaluations": self.evaluations}


class _EnergySampler:
    """Equilibrium energy at given corner angles, warm-started from the
    nearest angle pair already solved."""

    def __init__(self, params: PhysicalParams, N: int, opts: NewtonOptions | None,
                 steps: int, solver: el.SolverConfig | None):
        self.params = params
        self.N = N
        self.opts = opts
        self.steps = steps
        self.solver = solver or el.SolverConfig()
        self.solved: dict = {}
        self.failures: list = []

    def _nearest(self, angles):
        if not self.solved:
            return None
        key = min(self.solved, key=lambda a: math.hypot(a[0] - angles[0],
                                                        a[1] - angles[1]))
        return self.solved[key]

    def solve(self, angles) -> EquilibriumSolution | None:
        angles = (float(angles[0]), float(angles[1]))
        if angles in self.solved:
            return self.solved[angles]
        problem = EquilibriumProblem(self.params, angles, self.N,
                                     solver=self.solver)
        seed = self._nearest(angles)
        sol = None
        try:
            if seed is not None:
                sol = solve_equilibrium(replace(problem, init=seed.shape,
                                                mu0=seed.mu), self.opts)
            if sol is None or not sol.converged:
                sol = continuation_in_lambda(problem, self.params.Lambda,
                                             self.steps, self.opts)
        except (ConvergenceError, InvalidShapeError, ValueError,
                np.linalg.LinAlgError):
            sol = None
        if sol is None or not sol.converged:
            self.failures.append(angles)
            return None
        self.solved[angles] = sol
        return sol

    def energy(self, angles) -> float:
        if not all(math.pi <= a < 2 * math.pi for a in angles):
            return math.inf
        sol = self.solve(angles)
        if sol is None:
            return math.inf
        try:
            return solution_energy(sol).total
        except UnconvergedInputError:
            self.failures.append((float(angles[0]), float(angles[1])))
            return math.inf


def minimize_corner_angles(params: PhysicalParams, N: int = 32,
                           search_box: float = 0.15, grid: int = 5,
                           center=None, xatol: float = 1e-4,
                           max_evals: int = 200, refine: bool = True,
                           opts: NewtonOptions | None = None, steps: int = 3,
                           solver: el.SolverConfig | None = None
                           ) -> AngleSearchResult:
    """Grid scan of Pi(alpha1, alpha2) followed by Nelder-Mead refinement.

    The box is centred on ``center`` (default: the stress-free corner angle
    of the anisotropy, or pi + search_box when that has no corner).
    """
    if grid < 1:
        raise ValueError("grid must be positive")
    if center is None:
        a0 = wulff_corner_angle(params.epsilon)
        a0 = a0 if a0 > math.pi else math.pi + search_box
        center = (a0, a0)
    sampler = _EnergySampler(params, N, opts, steps, solver)
    sampler.solve(center)
    if grid == 1:
        axes = [np.array([center[0]]), np.array([center[1]])]
    else:
        axes = [np.linspace(c - search_box, c + search_box, grid) for c in center]
    # serpentine order keeps warm starts close
    landscape = []
    for i, a1 in enumerate(axes[0]):
        col = axes[1] if i % 2 == 0 else axes[1][::-1]
        for a2 in col:
            e = sampler.energy((a1, a2))
            landscape.append((float(a1), float(a2), float(e), bool(np.isfinite(e))))
    good = [row for row in landscape if row[3]]
    if not good:
        raise ConvergenceError("every grid sample failed")
    best = min(good, key=lambda row: row[2])
    best_angles, best_energy = (best[0], best[1]), best[2]
    evals = len(landscape)
    if refine:
        step = search_box / max(grid - 1, 1)
        simplex = np.array([best_angles,
                            (best_angles[0] + 0.5 * step, best_angles[1]),
                            (best_angles[0], best_angles[1] + 0.5 * step)])
        res = minimize(sampler.energy, np.array(best_angles), method="Nelder-Mead",
                       options={"xatol": xatol, "fatol": 1e-12,
                                "maxfev": max_evals, "initial_simplex": simplex})
        evals += int(res.nfev)
        if np.isfinite(res.fun) and res.fun <= best_energy:
            best_angles, best_energy = (float(res.x[0]), float(res.x[1])), float(res.fun)
    return AngleSearchResult(best_angles, best_energy, landscape,
                             (len(axes[0]), len(axes[1])),
                             list(sampler.failures), N, evals)


def write_landscape_csv(path, result: AngleSearchResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["alpha1", "alpha2", "energy", "converged"])
        for a1, a2, e, ok in result.landscape:
            wr.writerow([repr(a1), repr(a2), repr(e), str(ok).lower()])


def write_search_json(path, result: AngleSearchResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh, indent=2)

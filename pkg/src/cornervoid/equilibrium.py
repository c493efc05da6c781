"""Equilibrium void shape at fixed corner angles.

Unknowns are the shape coefficients c_1..c_N and the chemical potential mu.
The square system stacks

* 4 corner-consistency equations tying c_1..c_4 to the singular elastic
  field of the current shape,
* the surface balance stiffness*kappa - (Lambda/4) trace^2 - mu = 0 at the
  N-6 interior Legendre nodes,
* the two corner-angle conditions,
* the area constraint (first-quadrant area pi/4),

and is solved by damped Newton with a forward-difference Jacobian.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import elasticity as el
from . import spectral
from .corner_asymptotics import shape_corner_coefficients
from .geometry import (HALF_PI, InvalidShapeError, ShapeSpec, area_first_quadrant,
                       check_positive, curvature, normalize_area, orientation,
                       preset_circle, preset_wulff)
from .params import PhysicalParams
from .surface_energy import stiffness, wulff_corner_angle

QUARTER_PI = 0.25 * math.pi


class ConvergenceError(RuntimeError):
    """Newton or continuation failed; ``best`` holds the last good state."""

    def __init__(self, msg, best=None, last_lambda=None):
        super().__init__(msg)
        self.best = best
        self.last_lambda = last_lambda


@dataclass(frozen=True)
class NewtonOptions:
    """``tol`` bounds max|F| and ``step_tol`` the last coefficient update.

    Roundoff in the elastic solve leaves a floor near 1e-8 in the corner
    equations; a run whose line search can no longer reduce a residual
    below ``stall_tol`` is accepted as converged at that floor.
    """

    max_iter: int = 60
    tol: float = 1e-8
    step_tol: float = 1e-6
    stall_tol: float = 1e-6
    fd_coeff: float = 1e-6
    fd_mu: float = 1e-6
    max_halvings: int = 20


@dataclass(frozen=True, eq=False)
class EquilibriumProblem:
    params: PhysicalParams
    angles: tuple
    N: int = 32
    init: ShapeSpec | None = None
    mu0: float | None = None
    solver: el.SolverConfig = field(default_factory=el.SolverConfig)

    def __post_init__(self):
        a1, a2 = self.angles
        for a in (a1, a2):
            if not math.pi <= a < 2.0 * math.pi:
                raise ValueError("corner angles must lie in [pi, 2pi)")
        if self.N < 8:
            raise ValueError("N must be at least 8")


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    problem: EquilibriumProblem
    shape: ShapeSpec
    mu: float
    residuals: np.ndarray
    iterations: int
    converged: bool
    elastic: el.ElasticitySolution | None = None
    history: tuple = ()
    status: str = "converged"

    @property
    def goursat(self) -> el.GoursatCoeffs | None:
        return None if self.elastic is None else self.elastic.coeffs

    @property
    def residual_norm(self) -> float:
        return float(np.max(np.abs(self.residuals)))

    def residual_groups(self) -> dict:
        n = self.problem.N
        r = self.residuals
        return {"corner": r[:4], "nodal": r[4:n - 2], "angle": r[n - 2:n],
                "area": r[n:]}

    def to_dict(self) -> dict:
        p = self.problem
        return {
            "params": p.params.to_dict(),
            "angles": list(p.angles),
            "N": p.N,
            "mu": self.mu,
            "shape_coeffs": self.shape.coeffs.tolist(),
            "lambda": [self.shape.lambda1, self.shape.lambda2],
            "goursat_coeffs": None if self.goursat is None else self.goursat.to_dict(),
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "status": self.status,
        }


def el_residual(shape, elastic, mu: float, theta, params: PhysicalParams):
    """stiffness(omega) kappa - (Lambda/4) (1 + chi + 4 Re phi')^2 - mu."""
    theta = np.asarray(theta, dtype=float)
    r, rd, rdd = shape.radius(theta, 2)
    if np.any(r <= 0.0):
        raise InvalidShapeError("r(theta) must stay positive")
    kappa = curvature(r, rd, rdd)
    omega = orientation(r, rd, theta)
    out = stiffness(omega, params.epsilon) * kappa - mu
    if params.Lambda != 0.0:
        if elastic is None:
            raise ValueError("an elasticity solution is required when Lambda > 0")
        out = out - 0.25 * params.Lambda * elastic.trace(theta) ** 2
    return out


def angle_bc_residual(shape, angles) -> np.ndarray:
    """r'/r at both ends minus the values fixed by the solid corner angles."""
    a1, a2 = angles
    r, rd = shape.radius(np.array([0.0, HALF_PI]), 1)
    return np.array([rd[0] / r[0] + math.tan(0.5 * (a1 - math.pi)),
                     rd[1] / r[1] - math.tan(0.5 * (a2 - math.pi))])


def corner_targets(shape: ShapeSpec, elastic, params: PhysicalParams) -> np.ndarray:
    """Corner coefficients (c1, c2, c3, c4) demanded by the elastic field."""
    if params.Lambda == 0.0 or elastic is None:
        return np.zeros(4)
    g = elastic.coeffs
    r_end = shape.radius(np.array([0.0, HALF_PI]), 0)[0]
    out = []
    for end, alpha, lam in ((0, shape.alpha1, shape.lambda1),
                            (1, shape.alpha2, shape.lambda2)):
        ab = complex(g.complex[end])
        AB = g.regular_derivative(end)
        cc = shape_corner_coefficients(ab.real, ab.imag, AB.real, AB.imag, alpha,
                                       lam, float(r_end[end]), params.epsilon,
                                       params.Lambda, params.chi,
                                       end=0.0 if end == 0 else HALF_PI)
        out += [cc.c_lead, cc.c_sub]
    return np.array(out)


def initial_shape(params: PhysicalParams, angles, N: int) -> ShapeSpec:
    """Stress-free equilibrium shape resampled at resolution N, with the
    requested corner angles attached and zero corner coefficients."""
    if params.epsilon == 0.0 or wulff_corner_angle(params.epsilon) == math.pi:
        cheb = np.zeros(N - 4)
        cheb[0] = preset_circle().cheb[0]
    else:
        cheb = preset_wulff(params.epsilon, N).cheb
    return ShapeSpec.with_angles(angles[0], angles[1], cheb)


class _Residual:
    """Stacked equations as a function of u = (c_1..c_N, mu)."""

    def __init__(self, problem: EquilibriumProblem, template: ShapeSpec):
        self.p = problem
        self.template = template
        self.nodes = spectral.legendre_nodes(problem.N - 6)

    def shape(self, u) -> ShapeSpec:
        return self.template.with_coeffs(u[:-1])

    def __call__(self, u):
        p = self.p
        shape = self.shape(u)
        check_positive(shape)
        elastic = None
        if p.params.Lambda != 0.0:
            elastic = el.solve(shape, p.params.chi, p.N, p.solver)
        F = np.empty(p.N + 1)
        F[:4] = u[:4] - corner_targets(shape, elastic, p.params)
        F[4:p.N - 2] = el_residual(shape, elastic, u[-1], self.nodes, p.params)
        F[p.N - 2:p.N] = angle_bc_residual(shape, p.angles)
        F[p.N] = area_first_quadrant(shape) - QUARTER_PI
        return F, shape, elastic


def _rescaled(res: _Residual, u):
    spec = normalize_area(res.shape(u))
    return np.concatenate([spec.coeffs, u[-1:]])


def _safe_eval(res: _Residual, u):
    try:
        F, shape, elastic = res(u)
    except (InvalidShapeError, FloatingPointError, ValueError,
            np.linalg.LinAlgError):
        return None
    if not np.all(np.isfinite(F)):
        return None
    return F, shape, elastic


def _jacobian(res: _Residual, u, F0, opts: NewtonOptions):
    n = len(u)
    J = np.empty((n, n))
    for j in range(n):
        h = opts.fd_mu if j == n - 1 else opts.fd_coeff
        up = u.copy()
        up[j] += h
        out = _safe_eval(res, up)
        if out is None:
            up[j] -= 2 * h
            out = _safe_eval(res, up)
            if out is None:
                raise ConvergenceError("Jacobian evaluation left the valid shape set")
            h = -h
        J[:, j] = (out[0] - F0) / h
    return J


def solve_equilibrium(problem: EquilibriumProblem,
                      opts: NewtonOptions | None = None,
                      raise_on_failure: bool = False) -> EquilibriumSolution:
    """Damped Newton solve at fixed corner angles.

    The finite-difference Jacobian is refreshed whenever a step needed
    damping or reduced the residual by less than half; otherwise it is
    carried forward with a Broyden rank-one update.
    """
    opts = opts or NewtonOptions()
    init = problem.init or initial_shape(problem.params, problem.angles, problem.N)
    if init.N != problem.N:
        init = init.resized(problem.N)
    template = ShapeSpec.with_angles(problem.angles[0], problem.angles[1],
                                     init.cheb, init.corner)
    res = _Residual(problem, template)
    u = _rescaled(res, np.concatenate([init.coeffs, [0.0]]))
    if problem.mu0 is not None:
        u[-1] = problem.mu0
    else:
        shape = res.shape(u)
        r, rd, rdd = shape.radius(res.nodes, 2)
        w = orientation(r, rd, res.nodes)
        u[-1] = float(np.mean(stiffness(w, problem.params.epsilon)
                              * curvature(r, rd, rdd)))
    out = _safe_eval(res, u)
    if out is None:
        raise InvalidShapeError("initial shape is not admissible")
    F, shape, elastic = out
    history = [float(np.max(np.abs(F)))]
    status = "max_iter"
    step = 0.0
    J = None
    fresh = False
    it = 0
    while True:
        if history[-1] < opts.tol and step < opts.step_tol:
            status = "converged"
            break
        if it >= opts.max_iter:
            break
        it += 1
        if J is None:
            J = _jacobian(res, u, F, opts)
            fresh = True
        du = _newton_step(J, F)
        t = 1.0
        norm0 = np.linalg.norm(F)
        cand = None
        for _ in range(opts.max_halvings + 1):
            trial = _rescaled(res, u + t * du)
            cand = _safe_eval(res, trial)
            if cand is not None and np.linalg.norm(cand[0]) < norm0:
                break
            cand = None
            t *= 0.5
        if cand is None:
            if not fresh:
                J = None
                continue
            status = "stalled"
            break
        step = float(np.max(np.abs(trial - u)))
        dF = cand[0] - F
        dx = trial - u
        if t < 1.0 or np.linalg.norm(cand[0]) > 0.5 * norm0:
            J = None
        else:
            J = J + np.outer(dF - J @ dx, dx) / np.dot(dx, dx)
            fresh = False
        u = trial
        F, shape, elastic = cand
        history.append(float(np.max(np.abs(F))))
    converged = status == "converged" or (status == "stalled"
                                          and history[-1] < opts.stall_tol)
    sol = EquilibriumSolution(problem, shape, float(u[-1]), F, it, converged,
                              elastic, tuple(history), status)
    if raise_on_failure and not converged:
        raise ConvergenceError(f"Newton did not converge (max residual "
                               f"{history[-1]:.3e}, {status})", best=sol)
    return sol


def _newton_step(J, F):
    try:
        return np.linalg.solve(J, -F)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(J, -F, rcond=None)[0]


def continuation_in_lambda(problem: EquilibriumProblem, Lambda_target: float,
                           steps: int = 3, opts: NewtonOptions | None = None,
                           start: EquilibriumSolution | None = None
                           ) -> EquilibriumSolution:
    """Solve at Lambda_target*k/steps, k = 0..steps, warm-starting each stage."""
    if steps < 1:
        raise ValueError("steps must be positive")
    if Lambda_target < 0.0:
        raise ValueError("Lambda must be non-negative")
    sol = start
    k0 = 0
    if sol is None:
        base = replace(problem, params=problem.params.with_lambda(0.0))
        sol = solve_equilibrium(base, opts)
        if not sol.converged:
            raise ConvergenceError("stress-free solve failed", best=sol,
                                   last_lambda=None)
        k0 = 1
    if Lambda_target == 0.0:
        return sol
    for k in range(k0, steps + 1):
        lam = Lambda_target * k / steps
        stage = replace(problem, params=problem.params.with_lambda(lam),
                        init=sol.shape, mu0=sol.mu)
        nxt = solve_equilibrium(stage, opts)
        if not nxt.converged:
            raise ConvergenceError(f"continuation failed at Lambda={lam:g}",
                                   best=sol,
                                   last_lambda=sol.problem.params.Lambda)
        sol = nxt
    return sol


def write_solution_json(path, sol: EquilibriumSolution) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sol.to_dict(), fh, indent=2)

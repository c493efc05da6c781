"""Wedge singularity exponents and the matching shape corner coefficients.

Near a corner the boundary potential behaves like |theta_c - theta|**(lam-1),
so Re phi'(z) carries a term of order lam - 2. The Euler-Lagrange balance
can only hold if r(theta) carries terms of order 2lam-2 and lam whose
curvature cancels the squared trace at orders 2lam-4 and lam-2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .surface_energy import stiffness

HALF_PI = 0.5 * math.pi


class DegenerateCornerError(ValueError):
    """Corner coefficients are undefined (lambda -> 3/2 or zero stiffness)."""


def _williams(m: float, beta: float) -> float:
    return math.sin(m * beta) + m * math.sin(beta)


def williams_lambda(beta: float, xtol: float = 1e-15) -> float:
    """Singularity exponent lambda for a traction-free wedge of solid angle beta.

    lambda - 1 is the smallest real root above 1/2 of
    sin((lambda-1) beta) = -(lambda-1) sin(beta).
    """
    if not 0.0 < beta <= 2.0 * math.pi + 1e-12:
        raise ValueError("beta must lie in (0, 2pi]")
    if abs(beta - math.pi) < 1e-14:
        return 2.0
    if beta >= 2.0 * math.pi - 1e-14:
        return 1.5
    if beta > math.pi:
        # f(1/2) = sin(b/2)(1 + cos(b/2)) > 0 and f(1) = 2 sin(b) < 0 on (pi, 2pi)
        lo, hi = 0.5, 1.0
        m = brentq(_williams, lo, hi, args=(beta,), xtol=xtol,
                   rtol=4 * np.finfo(float).eps)
        return 1.0 + m
    # convex wedge: no singularity; first real root above m = 1, or the real
    # part of the leading complex pair when no real root exists
    grid = np.linspace(1.0 + 1e-9, 4.0, 3001)
    vals = np.array([_williams(m, beta) for m in grid])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size:
        i = idx[0]
        return 1.0 + brentq(_williams, grid[i], grid[i + 1], args=(beta,), xtol=xtol)
    roots = [m for m in (_complex_root(beta, m0) for m0 in
                         (1.2 + 0.3j, 1.5 + 0.5j, 2.0 + 0.5j, 2.5 + 1.0j, 3.0 + 1.0j))
             if m is not None and m.real > 1.0 + 1e-9]
    if not roots:
        raise ValueError(f"no exponent found for beta={beta}")
    return 1.0 + min(m.real for m in roots)


def _complex_root(beta: float, m: complex, iters: int = 60):
    sb = math.sin(beta)
    for _ in range(iters):
        f = cmath.sin(m * beta) + m * sb
        step = f / (beta * cmath.cos(m * beta) + sb)
        m -= step
        if abs(step) < 1e-15 * max(1.0, abs(m)):
            return m
    return None


@dataclass(frozen=True)
class CornerSingularity:
    beta: float
    lam: float

    @classmethod
    def from_angle(cls, beta: float) -> "CornerSingularity":
        return cls(beta, williams_lambda(beta))

    @property
    def stress_exponent(self) -> float:
        return self.lam - 2.0

    @property
    def singular(self) -> bool:
        return self.lam < 2.0


@dataclass(frozen=True)
class CornerCoefficients:
    c_lead: float   # multiplies |theta_c - theta|**(2 lam - 2)
    c_sub: float    # multiplies |theta_c - theta|**lam
    a: float
    b: float
    A: float
    B: float
    r0: float
    alpha: float
    lam: float
    singular_amp: float    # S: coefficient of the lam-2 term in Re phi'(z)
    regular_part: float    # R: O(1) part of Re phi'(z) at the corner


def corner_tangent(r0: float, alpha: float, end: float) -> complex:
    """dz/dtheta at a corner with the given solid angle (one-sided limit)."""
    q = 1.0 / math.tan(0.5 * alpha)    # cot(alpha/2)
    if end == 0.0:
        # rdot/r = cot(alpha/2) at theta = 0+
        return complex(r0 * q, r0)
    # rdot/r = -cot(alpha/2) at theta = pi/2-, times e^{i pi/2}
    return 1j * complex(-r0 * q, r0)


def trace_expansion(a: float, b: float, A: float, B: float, r0: float,
                    alpha: float, lam: float, end: float) -> tuple[float, float]:
    """(S, R) with Re phi'(z) ~ S |theta_c - theta|**(lam-2) + R at the corner.

    ``A + iB`` is the regular part of d(phi)/d(theta) at the corner.
    """
    zc = corner_tangent(r0, alpha, end)
    sign = 1.0 if end == 0.0 else -1.0     # d|theta_c - theta|/dtheta
    S = (sign * (lam - 1.0) * complex(a, b) / zc).real
    R = (complex(A, B) / zc).real
    return S, R


def shape_corner_coefficients(a: float, b: float, A: float, B: float,
                              alpha: float, lam: float, r0: float, eps: float,
                              Lambda: float, chi: float,
                              end: float = 0.0) -> CornerCoefficients:
    """Shape corner coefficients that cancel the singular elastic trace.

    With kappa ~ -r0 r''/|z'|^3 at the corner and
    r'' ~ c_lead (2lam-2)(2lam-3) t^(2lam-4) + c_sub lam (lam-1) t^(lam-2),
    matching the t^(2lam-4) and t^(lam-2) terms of
    stiffness*kappa = (Lambda/4) (1 + chi + 4 Re phi')^2 + mu
    gives the two coefficients. At theta = 0 the leading coefficient is
    -4 Lambda (lam-1)(a cot(alpha/2) + b)^2
    / [2 sqrt(cot^2(alpha/2)+1) (1 - 15 eps cos 2alpha)(2lam-3)].
    """
    if end not in (0.0, HALF_PI):
        raise ValueError("end must be 0 or pi/2")
    if Lambda == 0.0 or lam >= 2.0 - 1e-14:
        return CornerCoefficients(0.0, 0.0, a, b, A, B, r0, alpha, lam, 0.0, 0.0)
    if abs(2.0 * lam - 3.0) < 1e-12:
        raise DegenerateCornerError("lambda = 3/2: leading corner coefficient diverges")
    # cos 4w at the corner equals cos 2alpha at either end
    stiff = stiffness(0.5 * alpha, eps)
    if abs(stiff) < 1e-14:
        raise DegenerateCornerError("zero surface stiffness at the corner")
    S, R = trace_expansion(a, b, A, B, r0, alpha, lam, end)
    zc = corner_tangent(r0, alpha, end)
    geo = abs(zc) ** 3 / r0
    c_lead = -4.0 * Lambda * S**2 * geo / (stiff * (2 * lam - 2) * (2 * lam - 3))
    c_sub = -2.0 * Lambda * S * (1.0 + chi + 4.0 * R) * geo / (stiff * lam * (lam - 1))
    return CornerCoefficients(c_lead, c_sub, a, b, A, B, r0, alpha, lam, S, R)

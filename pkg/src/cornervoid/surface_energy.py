"""Four-fold anisotropic surface energy gamma(w) = 1 + eps*cos(4w)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


@dataclass(frozen=True)
class AnisotropyParams:
    epsilon: float = 0.0

    def __post_init__(self):
        if not abs(self.epsilon) < 1.0:
            raise ValueError("gamma stays positive only for |epsilon| < 1")


def gamma(omega, eps: float, deriv: int = 0):
    """Surface energy or its first/second derivative in the orientation."""
    omega = np.asarray(omega, dtype=float)
    if deriv == 0:
        out = 1.0 + eps * np.cos(4.0 * omega)
    elif deriv == 1:
        out = -4.0 * eps * np.sin(4.0 * omega)
    elif deriv == 2:
        out = -16.0 * eps * np.cos(4.0 * omega)
    else:
        raise ValueError("deriv must be 0, 1 or 2")
    return out if out.ndim else float(out)


def stiffness(omega, eps: float):
    """gamma + gamma'' = 1 - 15 eps cos(4w)."""
    out = 1.0 - 15.0 * eps * np.cos(4.0 * np.asarray(omega, dtype=float))
    return out if out.ndim else float(out)


def has_corners(eps: float) -> bool:
    """True when some orientations have negative stiffness."""
    return abs(eps) > 1.0 / 15.0


def _wulff_equation(alpha: float, eps: float) -> float:
    x = 0.5 * (alpha - math.pi)
    return math.tan(x) + gamma(x, eps, 1) / gamma(x, eps)


def wulff_corner_angle(eps: float, step: float = 0.01, xtol: float = 1e-13) -> float:
    """Solid corner angle of the stress-free equilibrium shape.

    Solves tan((a - pi)/2) = -gamma'((a - pi)/2) / gamma((a - pi)/2) for the
    root in (pi, 2pi) closest to pi. Returns ``pi`` in the corner-free regime
    (only the trivial root exists).
    """
    if not has_corners(eps):
        return math.pi
    grid = np.arange(math.pi + step, 2.0 * math.pi - step, step)
    vals = [_wulff_equation(a, eps) for a in grid]
    for a0, a1, f0, f1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if f0 == 0.0:
            return float(a0)
        if f0 * f1 < 0.0:
            return float(brentq(_wulff_equation, a0, a1, args=(eps,),
                                xtol=xtol, rtol=4 * np.finfo(float).eps))
    return math.pi


def corner_bc_residual(spec, end: float, eps: float) -> float:
    """gamma'(w)/gamma(w) - rdot/r at ``end`` (0 or pi/2); zero at equilibrium."""
    from .geometry import eval_shape, orientation

    r, rd = eval_shape(spec, end, derivs=1)
    if r == 0.0:
        raise ValueError("shape radius vanishes at the endpoint")
    w = orientation(r, rd, end)
    return gamma(w, eps, 1) / gamma(w, eps) - rd / r

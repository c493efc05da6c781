"""Chebyshev basis on [0, pi/2], Gauss-Legendre nodes and graded quadrature.

All angles are radians stored as float64. The standard interval [-1, 1]
is mapped affinely onto the quarter period ``[0, pi/2]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import legendre as L
from scipy.special import roots_jacobi

HALF_PI = 0.5 * np.pi
QUARTER_PI = 0.25 * np.pi

# d(theta)/dx of the affine map; every theta-derivative picks up 1/JAC.
JAC = QUARTER_PI


def map_interval(x):
    """Map x in [-1, 1] to theta in [0, pi/2]."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -1.0 - 1e-14) or np.any(x > 1.0 + 1e-14):
        raise ValueError("x must lie in [-1, 1]")
    return QUARTER_PI + QUARTER_PI * x


def unmap_interval(theta):
    """Inverse of :func:`map_interval`."""
    theta = np.asarray(theta, dtype=float)
    return (theta - QUARTER_PI) / QUARTER_PI


@lru_cache(maxsize=64)
def _derivative_matrix(n: int, order: int) -> np.ndarray:
    # column k holds the Chebyshev coefficients of d^order T_k / dx^order
    eye = np.eye(n)
    if order == 0:
        return eye
    d = C.chebder(eye, m=order, axis=0)
    out = np.zeros((n, n))
    out[: d.shape[0]] = d
    return out


def chebyshev_vander(n: int, theta, deriv: int = 0) -> np.ndarray:
    """Values of T_0..T_{n-1} (or their theta-derivatives) at ``theta``.

    Returns an array of shape ``theta.shape + (n,)``.
    """
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    theta = np.asarray(theta, dtype=float)
    if n == 0:
        return np.zeros(theta.shape + (0,))
    x = unmap_interval(theta)
    v = C.chebvander(x.ravel(), n - 1).reshape(x.shape + (n,))
    if deriv:
        v = v @ _derivative_matrix(n, deriv) / JAC**deriv
    return v


def chebyshev_eval(k: int, theta, deriv: int = 0):
    """T_k on [0, pi/2] or its first/second theta-derivative."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    out = chebyshev_vander(k + 1, theta, deriv)[..., k]
    return out if np.ndim(out) else float(out)


def chebyshev_fit(theta, values, n: int) -> np.ndarray:
    """Least-squares coefficients of T_0..T_{n-1} matching ``values``."""
    v = chebyshev_vander(n, theta)
    coef, *_ = np.linalg.lstsq(v, np.asarray(values, dtype=float), rcond=None)
    return coef


def chebyshev_points(m: int) -> np.ndarray:
    """m Chebyshev (first kind) points mapped into (0, pi/2), increasing."""
    k = np.arange(m)
    x = -np.cos((2 * k + 1) * np.pi / (2 * m))
    return map_interval(x)


@lru_cache(maxsize=128)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    if order < 1:
        raise ValueError("order must be >= 1")
    x, w = L.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def legendre_nodes(m: int) -> np.ndarray:
    """Roots of P_m mapped to (0, pi/2), increasing and symmetric about pi/4."""
    x, _ = gauss_legendre(m)
    return QUARTER_PI + QUARTER_PI * x


@dataclass(frozen=True, eq=False)
class BasisGrid:
    """Collocation angles plus a quadrature rule on [0, pi/2]."""

    n_colloc: int
    theta_nodes: np.ndarray
    quad_nodes: np.ndarray
    quad_weights: np.ndarray

    @classmethod
    def plain(cls, n_colloc: int, order: int = 32) -> "BasisGrid":
        x, w = gauss_legendre(order)
        return cls(n_colloc, legendre_nodes(n_colloc),
                   QUARTER_PI + QUARTER_PI * x, QUARTER_PI * w)

    @classmethod
    def graded(cls, n_colloc: int, **kw) -> "BasisGrid":
        nodes, weights = graded_rule(0.0, HALF_PI, **kw)
        return cls(n_colloc, legendre_nodes(n_colloc), nodes, weights)


def panel_rule(breaks, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule over consecutive panels given by ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def graded_breaks(a: float, b: float, n_mid: int = 4, ratio: float = 0.5,
                  h_min: float = 1e-13, left: bool = True,
                  right: bool = True, cosine: bool = False) -> np.ndarray:
    """Panel breakpoints: ``n_mid`` panels (uniform, or cosine-spaced when
    ``cosine``), with the end panels subdivided geometrically (factor
    ``ratio``) toward graded endpoints until the innermost panel is shorter
    than ``h_min``."""
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    n_mid = max(int(n_mid), 1)
    if cosine:
        u = 0.5 * (1.0 - np.cos(np.pi * np.arange(n_mid + 1) / n_mid))
        base = a + (b - a) * u
    else:
        base = np.linspace(a, b, n_mid + 1)
    h_left, h_right = base[1] - a, b - base[-2]
    pieces = []
    if left:
        levels = max(int(np.ceil(np.log(h_min / h_left) / np.log(ratio))), 0)
        pieces.append(a + h_left * ratio ** np.arange(levels, 0, -1))
    pieces.append(base)
    if right:
        levels = max(int(np.ceil(np.log(h_min / h_right) / np.log(ratio))), 0)
        pieces.append(b - h_right * ratio ** np.arange(1, levels + 1))
    out = np.unique(np.concatenate(pieces))
    return out


def graded_rule(a: float = 0.0, b: float = HALF_PI, order: int = 16,
                **kw) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule graded toward the requested endpoints."""
    return panel_rule(graded_breaks(a, b, **kw), order)


def quad_smooth(f: Callable, a: float = 0.0, b: float = HALF_PI,
                order: int = 32) -> float:
    """Plain Gauss-Legendre quadrature of a smooth integrand."""
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    t = a + half * (x + 1.0)
    return float(half * np.dot(w, f(t)))


def quad_endpoint_singular(f: Callable, a: float = 0.0, b: float = HALF_PI,
                           p: float | None = None, side: str = "left",
                           order: int = 16, h_min: float | None = None,
                           ratio: float = 0.5, n_mid: int = 2) -> float:
    """Integrate ``f`` with algebraic endpoint behaviour ``|t - end|**p``.

    Panels shrink dyadically toward the singular endpoint(s) ``side`` in
    {"left", "right", "both"}. When ``p`` is known the innermost panel uses
    a Gauss-Jacobi rule for the weight ``|t - end|**p``; otherwise the
    grading has to go deep (``h_min`` relative to ``b - a``). With ``p``
    given the Jacobi panel stays wide: near an endpoint b != 0 the factor
    (b - t)**p loses about eps/(b - t) relative accuracy, so a panel of
    width h leaves a rounding floor near eps * h**p.
    """
    if p is not None and p <= -1.0:
        raise ValueError("integral diverges for p <= -1")
    if side not in ("left", "right", "both"):
        raise ValueError("side must be 'left', 'right' or 'both'")
    if h_min is None:
        h_min = 1e-15 if p is None else 1e-4
    # rounding floor for an endpoint away from zero
    h_min = max(h_min, 64 * np.finfo(float).eps * max(abs(a), abs(b)) / (b - a))
    left, right = side in ("left", "both"), side in ("right", "both")
    breaks = graded_breaks(a, b, n_mid=n_mid, ratio=ratio,
                           h_min=h_min * (b - a), left=left, right=right)
    if p is None:
        t, w = panel_rule(breaks, order)
        return float(np.dot(w, f(t)))
    # innermost panels: Gauss-Jacobi with the known endpoint weight
    inner = slice(1 if left else 0, -1 if right else None)
    t, w = panel_rule(breaks[inner] if len(breaks[inner]) > 1 else breaks[:0],
                      order)
    total = float(np.dot(w, f(t))) if t.size else 0.0
    xj, wj = roots_jacobi(order, 0.0, p)
    if left:
        h = breaks[1] - a
        s = a + 0.5 * h * (xj + 1.0)
        total += (0.5 * h) ** (1.0 + p) * np.dot(wj, f(s) / (s - a) ** p)
    if right:
        h = b - breaks[-2]
        s = b - 0.5 * h * (xj + 1.0)
        total += (0.5 * h) ** (1.0 + p) * np.dot(wj, f(s) / (b - s) ** p)
    return float(total)

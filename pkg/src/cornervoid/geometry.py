"""Polar void shapes r(theta) on the first quadrant and their boundary geometry.

Only the quadrant 0 <= theta <= pi/2 is stored; the other three follow by
reflection across the axes. Orientation ``omega`` is the angle of the unit
normal pointing out of the solid (into the void), so a circle has
omega = theta + pi and curvature +1/R.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import spectral
from .corner_asymptotics import williams_lambda
from .surface_energy import gamma, stiffness, wulff_corner_angle

HALF_PI = 0.5 * math.pi


class SingularPointError(ValueError):
    """r'' requested exactly at a corner carrying a singular shape term."""


class InvalidShapeError(ValueError):
    """Shape radius is non-positive somewhere on the quadrant."""


class Shape:
    """Anything with a first-quadrant radius function and two corner angles."""

    alpha1: float = math.pi
    alpha2: float = math.pi

    def radius(self, theta, derivs: int = 2):
        raise NotImplementedError

    @property
    def lambda1(self) -> float:
        return williams_lambda(self.alpha1)

    @property
    def lambda2(self) -> float:
        return williams_lambda(self.alpha2)


def _power_terms(t, p, deriv):
    # d^k/dt^k t**p for t >= 0
    if deriv == 0:
        return t**p
    if deriv == 1:
        return p * t ** (p - 1)
    return p * (p - 1) * t ** (p - 2)


@dataclass(frozen=True, eq=False)
class ShapeSpec(Shape):
    """r = c1 t^(2l1-2) + c2 t^l1 + c3 u^(2l2-2) + c4 u^l2 + sum c_k T_{k-5},
    with t = theta and u = pi/2 - theta."""

    lambda1: float = 2.0
    lambda2: float = 2.0
    corner: tuple = (0.0, 0.0, 0.0, 0.0)
    cheb: np.ndarray = field(default_factory=lambda: np.array([1.0]))
    alpha1: float = math.pi
    alpha2: float = math.pi

    @classmethod
    def with_angles(cls, alpha1: float, alpha2: float, cheb, corner=(0.0,) * 4):
        return cls(williams_lambda(alpha1), williams_lambda(alpha2),
                   tuple(float(c) for c in corner), np.asarray(cheb, dtype=float),
                   float(alpha1), float(alpha2))

    @property
    def N(self) -> int:
        return 4 + len(self.cheb)

    @property
    def coeffs(self) -> np.ndarray:
        """c1..cN as one vector."""
        return np.concatenate([np.asarray(self.corner, dtype=float), self.cheb])

    def with_coeffs(self, coeffs) -> "ShapeSpec":
        coeffs = np.asarray(coeffs, dtype=float)
        return replace(self, corner=tuple(coeffs[:4]), cheb=coeffs[4:].copy())

    def scaled(self, factor: float) -> "ShapeSpec":
        return self.with_coeffs(factor * self.coeffs)

    def resized(self, N: int) -> "ShapeSpec":
        """Same shape with the Chebyshev tail padded or truncated to N - 4."""
        if N < 5:
            raise ValueError("N must be at least 5")
        cheb = np.zeros(N - 4)
        m = min(len(cheb), len(self.cheb))
        cheb[:m] = self.cheb[:m]
        return replace(self, cheb=cheb)

    def exponents(self) -> tuple:
        l1, l2 = self.lambda1, self.lambda2
        return (2 * l1 - 2, l1, 2 * l2 - 2, l2)

    def radius(self, theta, derivs: int = 2):
        theta = np.asarray(theta, dtype=float)
        t = np.clip(theta, 0.0, HALF_PI)
        u = HALF_PI - t
        out = []
        n = len(self.cheb)
        for k in range(derivs + 1):
            val = spectral.chebyshev_vander(n, t, k) @ self.cheb
            for j, (c, p) in enumerate(zip(self.corner, self.exponents())):
                if c == 0.0:
                    continue
                s = t if j < 2 else u
                if k and np.any((s == 0.0) & (p - k < 0)):
                    raise SingularPointError(
                        "shape derivative is singular at the corner")
                term = _power_terms(s, p, k)
                val = val + c * (term if (j < 2 or k % 2 == 0) else -term)
            out.append(val)
        return tuple(out)


@dataclass(frozen=True)
class BoundarySample:
    theta: np.ndarray
    r: np.ndarray
    r_dot: np.ndarray
    r_ddot: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    kappa: np.ndarray
    omega: np.ndarray
    s: np.ndarray


def eval_shape(shape: Shape, theta, derivs: int = 2):
    """(r, r', r'') at ``theta`` (scalars for scalar input)."""
    vals = shape.radius(theta, derivs)
    if np.ndim(theta) == 0:
        vals = tuple(float(v) for v in vals)
    return vals


def curvature(r, rd, rdd):
    """kappa = (2 r'^2 - r r'' + r^2) / (r'^2 + r^2)^(3/2); +1/R on a circle."""
    r, rd, rdd = (np.asarray(a, dtype=float) for a in (r, rd, rdd))
    out = (2 * rd**2 - r * rdd + r**2) / (rd**2 + r**2) ** 1.5
    return out if out.ndim else float(out)


def orientation(r, rd, theta):
    """Angle of the solid-exterior normal, continuous branch with
    omega = theta + pi on a circle."""
    out = (np.asarray(theta, dtype=float) + HALF_PI
           + np.arctan2(np.asarray(r, dtype=float), np.asarray(rd, dtype=float)))
    return out if out.ndim else float(out)


def boundary_point(shape: Shape, theta):
    """z(theta) and dz/dtheta."""
    r, rd = shape.radius(theta, 1)
    e = np.exp(1j * np.asarray(theta, dtype=float))
    return r * e, (rd + 1j * r) * e


def quadrant_rule(order: int = 16, n_mid: int = 4, h_min: float = 1e-13):
    return spectral.graded_rule(0.0, HALF_PI, order=order, n_mid=n_mid,
                                h_min=h_min)


def area_first_quadrant(shape: Shape) -> float:
    t, w = quadrant_rule()
    r = shape.radius(t, 0)[0]
    return float(np.dot(w, 0.5 * r**2))


def normalize_area(spec: ShapeSpec, target: float = 0.25 * math.pi) -> ShapeSpec:
    """Rescale all coefficients so the first-quadrant area equals ``target``."""
    a = area_first_quadrant(spec)
    if a <= 0.0:
        raise InvalidShapeError("shape has zero area")
    return spec.scaled(math.sqrt(target / a))


def arc_length(shape: Shape, theta0: float = 0.0, theta1: float = HALF_PI) -> float:
    t, w = spectral.graded_rule(theta0, theta1, order=16, n_mid=4, h_min=1e-13)
    r, rd = shape.radius(t, 1)
    return float(np.dot(w, np.hypot(r, rd)))


def check_positive(shape: Shape, m: int = 257) -> None:
    t = np.linspace(0.0, HALF_PI, m)
    r = shape.radius(t, 0)[0]
    if not np.all(np.isfinite(r)) or np.min(r) <= 0.0:
        raise InvalidShapeError("r(theta) must stay positive")


def preset_circle(radius: float = 1.0) -> ShapeSpec:
    return ShapeSpec(cheb=np.array([float(radius)]))


class OverlappingCircles(Shape):
    """Two unit circles centred at (+-cos a0, 0), kept where x has the far sign.

    r = cos(a0) cos(t) + sqrt(1 - sin^2(t) cos^2(a0)); a corner of solid angle
    2*a0 sits on the y axis, the x-axis end is smooth.
    """

    def __init__(self, alpha0: float):
        if not HALF_PI <= alpha0 < math.pi:
            raise ValueError("alpha0 must lie in [pi/2, pi)")
        self.alpha0 = float(alpha0)
        self.alpha1 = math.pi
        self.alpha2 = 2.0 * alpha0 if alpha0 > HALF_PI else math.pi

    def radius(self, theta, derivs: int = 2):
        t = np.asarray(theta, dtype=float)
        c = math.cos(self.alpha0)
        sn, cs = np.sin(t), np.cos(t)
        g = 1.0 - c**2 * sn**2
        sg = np.sqrt(g)
        out = [c * cs + sg]
        if derivs >= 1:
            out.append(-c * sn - c**2 * sn * cs / sg)
        if derivs >= 2:
            out.append(-c * cs - c**2 * np.cos(2 * t) / sg
                       - c**4 * sn**2 * cs**2 / g**1.5)
        return tuple(out)


def preset_overlapping_circles(alpha0: float) -> OverlappingCircles:
    return OverlappingCircles(alpha0)


class WulffShape(Shape):
    """Exact stress-free equilibrium shape, scaled to total area pi.

    The boundary is the gamma-plot envelope
    p(nu) = gamma(nu) e^{i nu} + gamma'(nu) i e^{i nu}
    over outward void normals nu in [nu_c, pi/2 - nu_c], where nu_c is
    (alpha0 - pi)/2 for a cornered shape and 0 otherwise.
    """

    def __init__(self, eps: float):
        self.eps = float(eps)
        self.alpha0 = wulff_corner_angle(eps)
        self.alpha1 = self.alpha2 = self.alpha0
        self.nu_c = 0.5 * (self.alpha0 - math.pi)
        x, w = spectral.gauss_legendre(64)
        a, b = self.nu_c, HALF_PI - self.nu_c
        nu = 0.5 * (a + b) + 0.5 * (b - a) * x
        area = 0.25 * (b - a) * np.dot(w, stiffness(nu, eps) * gamma(nu, eps))
        self.scale = math.sqrt(0.25 * math.pi / area)

    def envelope(self, nu):
        nu = np.asarray(nu, dtype=float)
        g, gp = gamma(nu, self.eps), gamma(nu, self.eps, 1)
        return self.scale * (g + 1j * gp) * np.exp(1j * nu)

    def normal_angle(self, theta, iters: int = 64):
        """Outward void-normal angle nu at polar angle theta (bisection)."""
        theta = np.asarray(theta, dtype=float)
        lo = np.full(theta.shape, self.nu_c)
        hi = np.full(theta.shape, HALF_PI - self.nu_c)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            below = np.angle(self.envelope(mid)) < theta
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def radius(self, theta, derivs: int = 2):
        theta = np.asarray(theta, dtype=float)
        nu = self.normal_angle(theta)
        r = np.abs(self.envelope(nu))
        out = [r]
        if derivs >= 1:
            rd = r * np.tan(theta - nu)
            out.append(rd)
        if derivs >= 2:
            kappa = 1.0 / (self.scale * stiffness(nu, self.eps))
            out.append((2 * rd**2 + r**2 - kappa * (rd**2 + r**2) ** 1.5) / r)
        return tuple(out)


def wulff_fit(eps: float, N: int) -> tuple[ShapeSpec, float]:
    """Chebyshev least-squares fit (T_0..T_{N-5}) of the Wulff shape at 4N
    Chebyshev points; returns the spec and the max fit residual."""
    exact = WulffShape(eps)
    t = spectral.chebyshev_points(4 * N)
    r = exact.radius(t, 0)[0]
    cheb = spectral.chebyshev_fit(t, r, N - 4)
    spec = ShapeSpec.with_angles(exact.alpha0, exact.alpha0, cheb)
    resid = float(np.max(np.abs(spec.radius(t, 0)[0] - r)))
    return spec, resid


def preset_wulff(eps: float, N: int = 32) -> ShapeSpec:
    """Stress-free equilibrium shape resampled as a corner-term-free ShapeSpec."""
    return wulff_fit(eps, N)[0]


def sample_boundary(shape: Shape, theta) -> BoundarySample:
    theta = np.asarray(theta, dtype=float)
    r, rd, rdd = shape.radius(theta, 2)
    e = np.exp(1j * theta)
    s = cumulative_arc_length(shape, theta)
    return BoundarySample(theta, r, rd, rdd, r * e, (rd + 1j * r) * e,
                          curvature(r, rd, rdd), orientation(r, rd, theta), s)


def cumulative_arc_length(shape: Shape, theta) -> np.ndarray:
    """Arc length from theta = 0 to each (sorted or unsorted) theta."""
    theta = np.asarray(theta, dtype=float)
    order = np.argsort(theta.ravel())
    ts = theta.ravel()[order]
    edges = np.concatenate([[0.0], ts])
    x, w = spectral.gauss_legendre(12)
    seg = np.zeros(len(ts))
    for i in range(len(ts)):
        a, b = edges[i], edges[i + 1]
        if b <= a:
            continue
        if a == 0.0 and i == 0:
            seg[i] = arc_length(shape, 0.0, b) if b > 0 else 0.0
            continue
        tt = 0.5 * (a + b) + 0.5 * (b - a) * x
        r, rd = shape.radius(tt, 1)
        seg[i] = 0.5 * (b - a) * np.dot(w, np.hypot(r, rd))
    cum = np.cumsum(seg)
    out = np.empty_like(cum)
    out[order] = cum
    return out.reshape(theta.shape)


def profile_angles(m: int = 400, cluster: int = 12) -> np.ndarray:
    """Quadrant sample angles, Chebyshev-spaced plus geometric clustering
    toward both corners."""
    t = spectral.chebyshev_points(m)
    g = 0.5 * t[0] * np.logspace(-cluster, 0, 4 * cluster + 1)[:-1]
    return np.unique(np.concatenate([[0.0], g, t, HALF_PI - g, [HALF_PI]]))


@dataclass
class OrientationProfile:
    s: np.ndarray
    omega: np.ndarray
    theta: np.ndarray          # polar angle of each sample in [0, 2pi]
    corner_s: np.ndarray       # arc-length position of the four axis points
    jumps: np.ndarray          # omega jump across each axis point
    quadrant_length: float


def orientation_profile(shape: Shape, m: int = 400) -> OrientationProfile:
    """Orientation vs arc length around the full boundary, counterclockwise
    from the point of maximum x (theta = 0)."""
    t = profile_angles(m)
    r, rd = shape.radius(t, 1)
    w1 = orientation(r, rd, t)
    s1 = cumulative_arc_length(shape, t)
    L = arc_length(shape)
    s1 = s1 * (L / s1[-1])
    rev = slice(None, None, -1)
    s = np.concatenate([s1, 2 * L - s1[rev], 2 * L + s1, 4 * L - s1[rev]])
    om = np.concatenate([w1, math.pi - w1[rev], w1 + math.pi, -w1[rev]])
    th = np.concatenate([t, math.pi - t[rev], math.pi + t, 2 * math.pi - t[rev]])
    om = np.unwrap(om)
    om = om - 2 * math.pi * np.floor((om[0] - 0.0) / (2 * math.pi))
    n = len(t)
    # one-sided limits at the axis points sit at block boundaries
    idx = [(4 * n - 1, 0), (n - 1, n), (2 * n - 1, 2 * n), (3 * n - 1, 3 * n)]
    jumps = []
    for a, b in idx:
        d = om[b] - om[a]
        jumps.append((d + math.pi) % (2 * math.pi) - math.pi)
    return OrientationProfile(s, om, th, np.array([0.0, L, 2 * L, 3 * L]),
                              np.array(jumps), L)


def write_shape_csv(path, shape: Shape, m: int = 400) -> None:
    """theta,r,x,y,kappa,omega,s on first-quadrant sample points."""
    t = profile_angles(m)
    t = t[(t > 0.0) & (t < HALF_PI)]
    b = sample_boundary(shape, t)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["theta", "r", "x", "y", "kappa", "omega", "s"])
        for row in zip(b.theta, b.r, b.z.real, b.z.imag, b.kappa, b.omega, b.s):
            wr.writerow([repr(float(v)) for v in row])


def write_profile_csv(path, prof: OrientationProfile) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["s", "omega", "theta"])
        for row in zip(prof.s, prof.omega, prof.theta):
            wr.writerow([repr(float(v)) for v in row])


def corner_window_slope(shape: Shape, end: int, window: float = 0.05,
                        cells: int = 50) -> float:
    """Largest cell-averaged |d omega/ds| within ``window`` arc length of a
    corner (end 0: theta = 0, end 1: theta = pi/2), on the solid side of
    the first quadrant.

    The curvature itself may be unbounded at a corner, so the slope is
    averaged over ``cells`` equal arc-length cells rather than sampled.
    """
    L = arc_length(shape)
    if window >= L:
        raise ValueError("window longer than the quadrant arc")
    s_targets = np.linspace(0.0, window, cells + 1)
    if end == 1:
        s_targets = L - s_targets
    t = _theta_at_arclength(shape, s_targets, L)
    r, rd = shape.radius(t, 1)
    om = np.unwrap(orientation(r, rd, t))
    return float(np.max(np.abs(np.diff(om))) / (window / cells))


def _theta_at_arclength(shape: Shape, s, L: float) -> np.ndarray:
    """Invert the arc length by bisection (s is monotone in theta)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    lo = np.zeros_like(s)
    hi = np.full_like(s, HALF_PI)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        val = np.array([arc_length(shape, 0.0, m) if m > 0 else 0.0 for m in mid])
        below = val < s
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)

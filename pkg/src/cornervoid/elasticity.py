"""Boundary-integral solver for the perturbation Goursat potential on a void.

The solid occupies the exterior of a two-fold symmetric void under remote
biaxial stress (1, chi). The far-field part (1+chi) z/4 is split off and
the remaining potential phi (vanishing at infinity) is expanded on the
first quadrant as

    phi(theta) = sum_k (a_k + i b_k) B_k(theta),
    B_1 = theta^(l1-1), B_2 = (pi/2 - theta)^(l2-1), B_k = T_{k-3}.

Because phi has real odd Laurent coefficients its values on the other
three quadrants follow by reflection:

    quadrant   point Z      phi(Z)
    Q1         z(t)         f(t)
    Q2         -conj z(t)   -conj f(t)
    Q3         -z(t)        -f(t)
    Q4         conj z(t)    conj f(t)

Each row of the linear system is a Cauchy integral over the whole contour
with the principal-value singularity removed by subtracting the value at
the collocation point.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import lstsq

from . import spectral
from .geometry import HALF_PI, Shape, check_positive

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class SolverConfig:
    """Quadrature layout over one quadrant and the form of the corner columns.

    ``corner_basis="polar"`` uses |theta_c - theta|^p literally;
    ``"conformal"`` uses q^p with q = (z - z_c)/(+-dz_c), which agrees with
    the polar form to leading order and follows the analytic corner field
    (z - z_c)^p along the curved boundary. ``corner_terms`` powers
    p = lam-1, lam, ... are used at each singular corner; the extra ones
    replace the highest Chebyshev columns so the unknown count stays 2N.
    """

    order: int = 16
    mid_panels: int | None = None   # default max(8, N // 2)
    ratio: float = 0.25
    h_min: float = 1e-13
    corner_basis: str = "conformal"
    corner_terms: int = 3

    def __post_init__(self):
        if self.corner_basis not in ("polar", "conformal"):
            raise ValueError("corner_basis must be 'polar' or 'conformal'")
        if self.corner_terms < 1:
            raise ValueError("corner_terms must be at least 1")

    def panels(self, N: int) -> int:
        return self.mid_panels if self.mid_panels else max(8, N // 2)


@lru_cache(maxsize=32)
def _quadrant_rule(order: int, n_mid: int, ratio: float, h_min: float):
    # keep the node nearest pi/2 several ulps away from it
    x, _ = spectral.gauss_legendre(order)
    h_min = max(h_min, 8 * np.spacing(HALF_PI) / (0.5 * (1.0 + x[0])))
    t, w = spectral.graded_rule(0.0, HALF_PI, order=order, n_mid=n_mid,
                                ratio=ratio, h_min=h_min, cosine=True)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def corner_column(theta, power: float, end: int, deriv: int = 0):
    """theta^power (end 0) or (pi/2-theta)^power (end 1), or d/dtheta."""
    theta = np.asarray(theta, dtype=float)
    s = theta if end == 0 else HALF_PI - theta
    s = np.maximum(s, 0.0)
    if deriv == 0:
        return s**power
    with np.errstate(divide="ignore", invalid="ignore"):
        d = power * s ** (power - 1.0)
    return d if end == 0 else -d


@dataclass(frozen=True, eq=False)
class CornerFrame:
    """Shape data needed by the conformal corner columns."""

    shape: Shape
    z_end: tuple        # z at theta = 0 and pi/2
    dz_end: tuple       # dz/dtheta there, pointing away from the corner

    @classmethod
    def of(cls, shape: Shape) -> "CornerFrame":
        ends = np.array([0.0, HALF_PI])
        r, rd = shape.radius(ends, 1)
        e = np.exp(1j * ends)
        z, dz = r * e, (rd + 1j * r) * e
        return cls(shape, (complex(z[0]), complex(z[1])),
                   (complex(dz[0]), complex(-dz[1])))

    def column(self, theta, power: float, end: int, deriv: int = 0, zz=None):
        """q^power or its theta-derivative; q ~ |theta - theta_c| at the
        corner. ``zz`` optionally supplies (z, dz) at ``theta``."""
        theta = np.asarray(theta, dtype=float)
        if zz is None:
            r, rd = self.shape.radius(theta, 1)
            e = np.exp(1j * theta)
            zz = (r * e, (rd + 1j * r) * e)
        z, dz = zz
        q = (z - self.z_end[end]) / self.dz_end[end]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(q == 0.0, 0.0, q**power)
            if deriv == 0:
                return w
            lim = np.inf if power < 1.0 else (1.0 if power == 1.0 else 0.0)
            return np.where(q == 0.0, lim,
                            power * w / q * dz / self.dz_end[end])


@dataclass(frozen=True)
class BasisLayout:
    """Column order: the two leading corner terms (slots 0 and 1, unused at
    a smooth end), the extra powers of each singular corner, then Chebyshev
    T_0.. on the remaining columns."""

    N: int
    lambda1: float
    lambda2: float
    corner_terms: int = 1

    def __post_init__(self):
        if self.n_cheb < 2:
            raise ValueError("N too small for the requested corner terms")

    def singular(self, end: int) -> bool:
        lam = self.lambda1 if end == 0 else self.lambda2
        return lam < 2.0 - 1e-14

    def corner_columns(self):
        """(column index, end, power) for every corner column."""
        lams = (self.lambda1, self.lambda2)
        out = [(0, 0, lams[0] - 1.0), (1, 1, lams[1] - 1.0)]
        col = 2
        for end in (0, 1):
            if not self.singular(end):
                continue
            for j in range(1, self.corner_terms):
                out.append((col, end, lams[end] - 1.0 + j))
                col += 1
        return out

    @property
    def n_cheb(self) -> int:
        return self.N - len(self.corner_columns())

    def active(self) -> np.ndarray:
        mask = np.ones(self.N, dtype=bool)
        for col, end, _ in self.corner_columns():
            if not self.singular(end):
                mask[col] = False
        return mask


def goursat_basis(layout: BasisLayout, theta, deriv: int = 0,
                  frame: CornerFrame | None = None, zz=None):
    """Columns of the potential expansion at ``theta`` (complex when the
    conformal corner columns are used)."""
    theta = np.asarray(theta, dtype=float)
    dtype = float if frame is None else complex
    out = np.zeros(theta.shape + (layout.N,), dtype=dtype)
    for col, end, power in layout.corner_columns():
        if not layout.singular(end):
            continue
        if frame is None:
            out[..., col] = corner_column(theta, power, end, deriv)
        else:
            out[..., col] = frame.column(theta, power, end, deriv, zz)
    k0 = layout.N - layout.n_cheb
    out[..., k0:] = spectral.chebyshev_vander(layout.n_cheb, theta, deriv)
    return out


@dataclass(frozen=True, eq=False)
class GoursatCoeffs:
    """Real (a) and imaginary (b) expansion coefficients of phi on Q1.

    a[0], b[0] and a[1], b[1] multiply the leading corner terms at theta = 0
    and pi/2.
    """

    a: np.ndarray
    b: np.ndarray
    lambda1: float
    lambda2: float
    frame: CornerFrame | None = None
    corner_terms: int = 1

    @property
    def N(self) -> int:
        return len(self.a)

    @property
    def layout(self) -> BasisLayout:
        return BasisLayout(self.N, self.lambda1, self.lambda2, self.corner_terms)

    @property
    def complex(self) -> np.ndarray:
        return self.a + 1j * self.b

    def value(self, theta, deriv: int = 0):
        """phi (or d phi/d theta) on the first quadrant."""
        B = goursat_basis(self.layout, theta, deriv, self.frame)
        active = self.complex != 0.0
        return B[..., active] @ self.complex[active]

    def regular_derivative(self, end: int) -> complex:
        """d phi/d theta at a corner with that corner's own terms removed;
        the other corner's terms and the Chebyshev tail are kept."""
        t = 0.0 if end == 0 else HALF_PI
        c = self.complex.copy()
        for col, e, _ in self.layout.corner_columns():
            if e == end:
                c[col] = 0.0
        B = goursat_basis(self.layout, np.array([t]), 1, self.frame)[0]
        keep = c != 0.0
        return complex(B[keep] @ c[keep])

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist(),
                "lambda1": self.lambda1, "lambda2": self.lambda2,
                "corner_terms": self.corner_terms,
                "corner_basis": "polar" if self.frame is None else "conformal"}


@dataclass(frozen=True, eq=False)
class Contour:
    """Full-contour quadrature data generated from the first quadrant."""

    t: np.ndarray          # Q1 parameter of each node, tiled four times
    Z: np.ndarray          # node positions on the full contour
    wdZ: np.ndarray        # weight times oriented dZ/dt
    dz1: np.ndarray        # dz/dt on Q1 nodes (length M/4)
    weights: np.ndarray    # Q1 weights

    @property
    def m(self) -> int:
        return len(self.weights)


def build_contour(shape: Shape, qc: SolverConfig, N: int) -> Contour:
    t, w = _quadrant_rule(qc.order, qc.panels(N), qc.ratio, qc.h_min)
    r, rd = shape.radius(t, 1)
    e = np.exp(1j * t)
    z, dz = r * e, (rd + 1j * r) * e
    Z = np.concatenate([z, -z.conj(), -z, z.conj()])
    dZ = np.concatenate([dz, dz.conj(), -dz, -dz.conj()])
    return Contour(np.tile(t, 4), Z, np.tile(w, 4) * dZ, dz, w)


def _reflect(v1, kind: str):
    """Tile Q1 values of a potential-like (phi) or derivative-like (phi')
    quantity onto the four quadrants."""
    if kind == "value":
        return np.concatenate([v1, -v1.conj(), -v1, v1.conj()])
    return np.concatenate([v1, v1.conj(), v1, v1.conj()])


@dataclass(frozen=True, eq=False)
class LinearSystem:
    matrix: np.ndarray     # real (4N-2) x (number of active unknowns)
    rhs: np.ndarray
    active: np.ndarray     # indices into the 2N unknowns (a..., b...)
    N: int
    lambda1: float
    lambda2: float
    frame: CornerFrame | None = None
    corner_terms: int = 1


def _cauchy_kernel(contour: Contour, z0: np.ndarray):
    K = contour.wdZ[None, :] / ((contour.Z[None, :] - z0[:, None]) * TWO_PI_I)
    return K, K.sum(axis=1)


def assemble_system(shape: Shape, chi: float, N: int,
                    qc: SolverConfig | None = None,
                    analyticity: bool = True) -> LinearSystem:
    """Collocated traction and analyticity equations plus the two symmetry
    conditions, as a real least-squares system in (a, b)."""
    if N < 8:
        raise ValueError("N must be at least 8")
    qc = qc or SolverConfig()
    check_positive(shape)
    lam1, lam2 = shape.lambda1, shape.lambda2
    frame = CornerFrame.of(shape) if qc.corner_basis == "conformal" else None
    contour = build_contour(shape, qc, N)
    theta_c = spectral.legendre_nodes(N - 1)
    r0, rd0 = shape.radius(theta_c, 1)
    e0 = np.exp(1j * theta_c)
    z0, dz0 = r0 * e0, (rd0 + 1j * r0) * e0
    K, rowsum = _cauchy_kernel(contour, z0)
    one_minus = 1.0 - rowsum

    # per-unknown fields on Q1 nodes and at collocation points
    tq = contour.t[: contour.m]
    zq = (contour.Z[: contour.m], contour.dz1)
    layout = BasisLayout(N, lam1, lam2, qc.corner_terms)
    B, dB = (goursat_basis(layout, tq, d, frame, zq) for d in (0, 1))
    Bc, dBc = (goursat_basis(layout, theta_c, d, frame, (z0, dz0))
               for d in (0, 1))
    unit = np.concatenate([np.ones(N), np.full(N, 1j)])
    P1 = np.concatenate([B, B], axis=1) * unit
    D1 = np.concatenate([dB, dB], axis=1) * unit / contour.dz1[:, None]
    P0 = np.concatenate([Bc, Bc], axis=1) * unit
    D0 = np.concatenate([dBc, dBc], axis=1) * unit / dz0[:, None]

    P = _reflect(P1, "value")
    D = _reflect(D1, "deriv")
    Zc = contour.Z.conj()[:, None]

    traction = (one_minus[:, None] * (P0.conj() + z0.conj()[:, None] * D0)
                + K @ (P.conj() + Zc * D))
    known = (0.5 * (1 + chi) * (z0.conj() * one_minus + K @ contour.Z.conj())
             + 0.5 * (chi - 1) * z0)
    blocks = [traction.real, traction.imag]
    rhs = [-known.real, -known.imag]
    if analyticity:
        anal = K @ P + one_minus[:, None] * P0
        blocks += [anal.real, anal.imag]
        rhs += [np.zeros(len(theta_c))] * 2
    # Re phi(pi/2) = 0 and Im phi(0) = 0
    Bend = goursat_basis(layout, np.array([0.0, HALF_PI]), 0, frame)
    Pend = np.concatenate([Bend, Bend], axis=1) * unit
    blocks.append(np.vstack([Pend[1].real, Pend[0].imag]))
    rhs.append(np.zeros(2))
    A = np.vstack(blocks)
    y = np.concatenate(rhs)

    idx = np.nonzero(np.tile(layout.active(), 2))[0]
    return LinearSystem(A[:, idx], y, idx, N, lam1, lam2, frame,
                        qc.corner_terms)


@dataclass(frozen=True, eq=False)
class ElasticitySolution:
    coeffs: GoursatCoeffs
    shape: Shape
    chi: float
    residual_norm: float
    system: LinearSystem = field(repr=False)

    @property
    def N(self) -> int:
        return self.coeffs.N

    def phi(self, theta):
        return self.coeffs.value(theta)

    def dphi_dz(self, theta):
        """phi'(z) on the first quadrant, (d phi/d theta)/(dz/d theta)."""
        theta = np.asarray(theta, dtype=float)
        r, rd = self.shape.radius(theta, 1)
        dz = (rd + 1j * r) * np.exp(1j * theta)
        return self.coeffs.value(theta, 1) / dz

    def trace(self, theta):
        """sigma_xx + sigma_yy on the boundary."""
        return 1.0 + self.chi + 4.0 * np.real(self.dphi_dz(theta))

    def cond_estimate(self) -> float:
        A = self.system.matrix
        A = A / np.linalg.norm(A, axis=0)
        return float(np.linalg.cond(A))

    def diagnostics(self) -> dict:
        return {"N": self.N, "residual_norm": self.residual_norm,
                "lambda1": self.coeffs.lambda1, "lambda2": self.coeffs.lambda2,
                "cond_estimate": self.cond_estimate()}


def solve_system(system: LinearSystem) -> tuple[np.ndarray, float]:
    A = system.matrix
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0.0] = 1.0
    x, *_ = lstsq(A / scale, system.rhs, lapack_driver="gelsy",
                  check_finite=False)
    x = x / scale
    res = float(np.linalg.norm(A @ x - system.rhs))
    full = np.zeros(2 * system.N)
    full[system.active] = x
    return full, res


def solve(shape: Shape, chi: float, N: int, qc: SolverConfig | None = None,
          analyticity: bool = True) -> ElasticitySolution:
    """Least-squares solution of the assembled (4N-2) x 2N system."""
    system = assemble_system(shape, chi, N, qc, analyticity)
    x, res = solve_system(system)
    coeffs = GoursatCoeffs(x[:N], x[N:], system.lambda1, system.lambda2,
                           system.frame, system.corner_terms)
    return ElasticitySolution(coeffs, shape, chi, res, system)


def trace_sigma(sol: ElasticitySolution, theta) -> tuple[float, bool]:
    """Boundary trace at a single angle and whether it sits on a singular
    corner (where the value is the signed infinity of the leading term)."""
    theta = float(theta)
    c = sol.coeffs.complex
    for end, t_end, lam in ((0, 0.0, sol.coeffs.lambda1),
                            (1, HALF_PI, sol.coeffs.lambda2)):
        if theta == t_end and lam < 2.0 and c[end] != 0.0:
            # sign of Re(d phi/d theta / dz) for the diverging corner term
            r, rd = sol.shape.radius(t_end, 1)
            dz = (rd + 1j * r) * np.exp(1j * t_end)
            sgn = 1.0 if end == 0 else -1.0
            lead = (sgn * c[end] / dz).real
            return (math.copysign(math.inf, lead) if lead else
                    float(sol.trace(np.nextafter(t_end, math.pi / 4)))), True
    return float(sol.trace(theta)), False


def _full_fields(sol: ElasticitySolution, contour: Contour):
    t = contour.t[: contour.m]
    f = sol.coeffs.value(t)
    df = sol.coeffs.value(t, 1) / contour.dz1
    return _reflect(f, "value"), _reflect(df, "deriv")


def h_from_phi(Z, phi, dphi, chi: float):
    """Boundary value of the second perturbation potential h."""
    return -np.conj(phi) - 0.5 * (1 + chi) * Z.conj() - Z.conj() * dphi \
        - 0.5 * (chi - 1) * Z


def recover_h(sol: ElasticitySolution, theta):
    theta = np.asarray(theta, dtype=float)
    r = sol.shape.radius(theta, 0)[0]
    z = r * np.exp(1j * theta)
    return h_from_phi(z, sol.phi(theta), sol.dphi_dz(theta), sol.chi)


def analyticity_residual(values, contour: Contour, z0, values0) -> np.ndarray:
    """(1/2 pi i) PV int g/(z - z0) dz + g(z0)/2 at each z0; zero for g
    analytic outside the void and vanishing at infinity."""
    K, rowsum = _cauchy_kernel(contour, np.asarray(z0))
    return K @ values + (1.0 - rowsum) * values0


def traction_residual(sol: ElasticitySolution, theta=None,
                      qc: SolverConfig | None = None) -> float:
    """Max analyticity defect of the recovered h at the given angles.

    The free-traction condition defines h on the boundary; it holds with an
    admissible h exactly when that boundary function extends analytically
    to the solid, which is what this measures.
    """
    qc = qc or SolverConfig()
    contour = build_contour(sol.shape, qc, sol.N)
    if theta is None:
        theta = spectral.legendre_nodes(sol.N - 1)
    theta = np.asarray(theta, dtype=float)
    phi, dphi = _full_fields(sol, contour)
    h = h_from_phi(contour.Z, phi, dphi, sol.chi)
    r = sol.shape.radius(theta, 0)[0]
    z0 = r * np.exp(1j * theta)
    return float(np.max(np.abs(
        analyticity_residual(h, contour, z0, recover_h(sol, theta)))))


def laurent_coefficients(sol: ElasticitySolution, kmax: int = 40,
                         qc: SolverConfig | None = None):
    """Coefficients of phi = sum c_k z^-k and h = sum d_k z^-k (k >= 1)."""
    qc = qc or SolverConfig()
    contour = build_contour(sol.shape, qc, sol.N)
    phi, dphi = _full_fields(sol, contour)
    h = h_from_phi(contour.Z, phi, dphi, sol.chi)
    k = np.arange(1, kmax + 1)
    zk = contour.Z[None, :] ** (k[:, None] - 1)
    c = (zk * contour.wdZ) @ phi / TWO_PI_I
    d = (zk * contour.wdZ) @ h / TWO_PI_I
    return c, d


def l2_error(f, f_ref, order: int = 16) -> float:
    """sqrt((2/pi) int_0^{pi/2} |f - f_ref|^2 dtheta), corner-graded."""
    t, w = spectral.graded_rule(0.0, HALF_PI, order=order, n_mid=8,
                                ratio=0.25, h_min=1e-12)
    fv = f(t) if callable(f) else f
    gv = f_ref(t) if callable(f_ref) else f_ref
    return float(math.sqrt(2.0 / math.pi * np.dot(w, np.abs(fv - gv) ** 2)))


def kirsch_trace(theta, chi: float):
    """Analytic boundary trace for a circular hole: 1 + chi - 2(1-chi) cos 2t."""
    return 1.0 + chi - 2.0 * (1.0 - chi) * np.cos(2.0 * np.asarray(theta))


def write_trace_csv(path, sol: ElasticitySolution, theta=None) -> None:
    if theta is None:
        theta = np.linspace(0.0, HALF_PI, 201)[1:-1]
    phi = sol.phi(theta)
    tr = sol.trace(theta)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["theta", "re_phi", "im_phi", "sigma_trace"])
        for row in zip(theta, phi.real, phi.imag, tr):
            wr.writerow([repr(float(v)) for v in row])


def write_diagnostics(path, sol: ElasticitySolution) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sol.diagnostics(), fh, indent=2)

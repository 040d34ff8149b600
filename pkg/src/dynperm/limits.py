"""Limit profiles of the random graph and cycle-free random graph processes.

zeta(u)  giant fraction of G(n, un): largest root of 1 - z = exp(-2uz)
phi(v)   effective edge count per n at time vn: int_0^v (1 - zeta^2)
eta(s)   giant fraction of the cycle-free process: zeta(phi^{-1}(s))

Scalar functions are accurate to ~1e-12 but slow; LimitTables gives fast
vectorized interpolants on a fixed grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import DomainError

U_MAX = 40.0
GRID_STEP = 1e-3


def _zeta_solve(u: np.ndarray) -> np.ndarray:
    """Vectorized bisection + Newton for the nonzero root (u > 1/2)."""
    c = 2.0 * u
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    # g(z) = 1 - z - exp(-cz) > 0 on (0, root), < 0 after
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        g = -mid - np.expm1(-c * mid)
        pos = g > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    z = 0.5 * (lo + hi)
    for _ in range(3):
        e = np.exp(-c * z)
        g = -z - np.expm1(-c * z)
        dg = -1.0 + c * e
        step = np.where(dg != 0, g / np.where(dg != 0, dg, 1.0), 0.0)
        z_new = z - step
        z = np.where((z_new > 0) & (z_new < 1), z_new, z)
    return z


def zeta(u):
    """Giant-component fraction at time un. Accepts scalars or arrays."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("zeta is defined for u >= 0")
    out = np.zeros_like(arr)
    sup = arr > 0.5
    fin = sup & np.isfinite(arr)
    if np.any(fin):
        out[fin] = _zeta_solve(arr[fin])
    out[np.isinf(arr)] = 1.0
    return float(out) if out.ndim == 0 else out


def _integrand(u: float) -> float:
    z = zeta(u)
    return 1.0 - z * z


def phi(v: float) -> float:
    if v < 0:
        raise DomainError("phi is defined for v >= 0")
    if v <= 0.5:
        return float(v)
    if math.isinf(v):
        return 1.0
    total = 0.5
    edges = [0.5] + [b for b in (1.0, 2.0, 4.0, 8.0, 16.0) if b < v] + [v]
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = quad(_integrand, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
    return total


def phi_inverse(w: float) -> float:
    if w < 0 or w >= 1:
        raise DomainError("phi_inverse is defined on [0, 1)")
    if w <= 0.5:
        return float(w)
    hi = 1.0
    while phi(hi) <= w:
        hi *= 2.0
    return brentq(lambda x: phi(x) - w, 0.5, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)


def eta(s: float) -> float:
    if s < 0 or s >= 1:
        raise DomainError("eta is defined on [0, 1)")
    return zeta(phi_inverse(s))


# tables ----------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


@dataclass
class LimitTables:
    u: np.ndarray
    zeta_vals: np.ndarray
    phi_vals: np.ndarray

    def __post_init__(self):
        self._zeta = PchipInterpolator(self.u, self.zeta_vals, extrapolate=False)
        self._phi = PchipInterpolator(self.u, self.phi_vals, extrapolate=False)
        # phi saturates at 1 in double precision; keep the strictly increasing head
        keep = np.concatenate([[True], np.diff(self.phi_vals) > 0])
        keep &= self.phi_vals < 1.0 - 1e-13
        self._w = self.phi_vals[keep]
        self._phi_inv = PchipInterpolator(self._w, self.u[keep], extrapolate=False)
        self._eta = PchipInterpolator(self._w, self.zeta_vals[keep], extrapolate=False)

    def zeta(self, u):
        u = np.asarray(u, dtype=float)
        out = np.where(u >= self.u[-1], 1.0, 0.0)
        inside = (u >= 0) & (u < self.u[-1])
        out = np.where(inside, self._zeta(np.clip(u, 0, self.u[-1])), out)
        return out

    def phi(self, v):
        v = np.asarray(v, dtype=float)
        inside = v < self.u[-1]
        return np.where(inside, self._phi(np.clip(v, 0, self.u[-1])), 1.0)

    def phi_inverse(self, w):
        w = np.asarray(w, dtype=float)
        if np.any(w < 0) or np.any(w >= 1):
            raise DomainError("phi_inverse is defined on [0, 1)")
        if np.any(w > self._w[-1]):
            raise DomainError("w beyond the tabulated range")
        return self._phi_inv(w)

    def eta(self, s):
        """Cycle-free giant fraction; used as a CDF so s >= 1 maps to 1."""
        s = np.asarray(s, dtype=float)
        top = self._w[-1]
        out = np.where(s > top, 1.0, 0.0)
        inside = (s >= 0) & (s <= top)
        return np.where(inside, self._eta(np.clip(s, 0, top)), out)


def build_tables(u_max: float = U_MAX, step: float = GRID_STEP) -> LimitTables:
    m = int(round(u_max / step))
    u = np.linspace(0.0, m * step, m + 1)
    z = zeta(u)
    # Gauss-Legendre on each cell; 1/2 is a node so the kink sits on a cell edge
    left = u[:-1]
    half = 0.5 * step
    pts = (left[:, None] + half) + half * _GL_NODES[None, :]
    zp = zeta(pts.ravel()).reshape(pts.shape)
    cell = half * ((1.0 - zp * zp) @ _GL_WEIGHTS)
    ph = np.concatenate([[0.0], np.cumsum(cell)])
    return LimitTables(u, z, ph)


@lru_cache(maxsize=4)
def default_tables(u_max: float = U_MAX, step: float = GRID_STEP) -> LimitTables:
    return build_tables(u_max, step)


# normalization identity --------------------------------------------------------


def series_coefficient(l: int) -> float:
    """c_l in the expansion of ds/du * u for s(u) = -log(1-u)/(2u)."""
    c = -1.0 / (l + 2)
    if l in (0, 1):
        c += 1.0
    if l >= 2:
        c += 1.0 / l
    return c


@dataclass
class NormalizationReport:
    integral_value: float
    series_value: float
    integral_residual: float
    series_residual: float
    c0: float
    c1: float


def check_normalization(u_max: float = U_MAX, terms: int = 10_000) -> NormalizationReport:
    """Two routes to int_{1/2}^inf (1 - zeta^2) = 1/2."""
    integral = phi(u_max) - 0.5
    # analytic tail beyond u_max: 1 - zeta^2 ~ 2 e^{-2u}
    integral += math.exp(-2 * u_max)
    parts = [series_coefficient(0), series_coefficient(1) / 2.0]
    parts += [series_coefficient(l) / (l + 1) for l in range(2, terms + 1)]
    partial = math.fsum(parts)
    # sum_{l>L} 1/(l(l+1)) - 1/((l+1)(l+2)) telescopes to 1/((L+1)(L+2))
    tail = 1.0 / ((terms + 1) * (terms + 2))
    series = 0.5 * (partial + tail)
    return NormalizationReport(
        integral_value=integral,
        series_value=series,
        integral_residual=abs(integral - 0.5),
        series_residual=abs(series - 0.5),
        c0=series_coefficient(0),
        c1=series_coefficient(1),
    )


def change_of_variable_residuals(points: int = 100) -> np.ndarray:
    """|zeta(s(u)) - u| for s(u) = -log(1-u)/(2u) on a grid in (0, 1)."""
    u = np.linspace(0.0, 1.0, points + 2)[1:-1]
    s = -np.log1p(-u) / (2 * u)
    return np.abs(zeta(s) - u)

"""Finite-difference reference eigenvalues, independent of the iteration.

H = -1/2 d^2/dx^2 + V is discretised with second-order central differences
on [0, L] with nodes x_i = i h. The boundary at 0 is Neumann (even parity),
Dirichlet (odd parity) or Robin with psi'/psi(0) = slope, encoded with a
ghost node psi_{-1} = psi_1 - 2 h slope psi_0. psi(L) = 0.

The lowest eigenvalue of the symmetric tridiagonal matrix is found by
bisection on the Sturm sequence count, and two step sizes are combined by
Richardson extrapolation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import default_x_max


@njit(cache=True)
def _count_below(d, e2, lam):
    # number of eigenvalues < lam (Sturm sequence of the LDL^T pivots)
    count = 0
    q = d[0] - lam
    if q < 0:
        count += 1
    for i in range(1, d.size):
        if q == 0.0:
            q = 1e-300
        q = d[i] - lam - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


@njit(cache=True)
def _bisect_lowest(d, e2, lo, hi, rtol):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _count_below(d, e2, mid) >= 1:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def default_step(g: float) -> float:
    return 0.0025 / math.sqrt(g)


def _system(g: float, h: float, L: float, slope: float | None):
    n = max(int(round(L / h)), 4)
    h = L / n
    x = np.arange(n + 1) * h
    v = 0.5 * g * g * (x * x - 1.0) ** 2
    off2 = 0.25 / h**4
    if slope is None:
        d = 1.0 / h**2 + v[1:-1]
        e2 = np.full(d.size - 1, off2)
    else:
        d = 1.0 / h**2 + v[:-1]
        d[0] += slope / h
        e2 = np.full(d.size - 1, off2)
        # row 0 carries a factor 2 from the ghost node; symmetrise
        e2[0] = 2.0 * off2
    return d, e2, h


def _lowest(d, e2):
    e = np.sqrt(e2)
    rad = np.zeros_like(d)
    rad[:-1] += e
    rad[1:] += e
    return _bisect_lowest(d, e2, float(np.min(d - rad)), float(np.max(d + rad)), 1e-15)


def _check(g, h, L):
    if not g > 1:
        raise ValueError("g must exceed 1")
    if h <= 0 or h > 0.01 / math.sqrt(g) * (1 + 1e-12):
        raise ValueError(f"h must be in (0, 0.01/sqrt(g)], got {h}")
    if L <= 1:
        raise ValueError("L must exceed 1")


def fd_eigen(g: float, parity: str = "even", h: float | None = None,
             L: float | None = None) -> float:
    """Lowest eigenvalue of the given parity on [0, L] with step h."""
    h = default_step(g) if h is None else h
    L = default_x_max(g) if L is None else L
    _check(g, h, L)
    if parity == "even":
        return fd_robin(g, 0.0, h, L)
    if parity != "odd":
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    d, e2, _ = _system(g, h, L, None)
    return _lowest(d, e2)


def fd_robin(g: float, slope: float, h: float | None = None, L: float | None = None) -> float:
    """Lowest eigenvalue with psi'/psi(0) = slope."""
    h = default_step(g) if h is None else h
    L = default_x_max(g) if L is None else L
    _check(g, h, L)
    if slope < 0:
        raise ValueError("slope must be >= 0")
    d, e2, _ = _system(g, h, L, float(slope))
    return _lowest(d, e2)


def richardson(coarse: float, fine: float, order: int = 2) -> float:
    r = 2.0**order
    return (r * fine - coarse) / (r - 1.0)


@dataclass(frozen=True)
class OracleResult:
    g: float
    h: float
    L: float
    E_ev: float
    E_od: float
    E_plus: float
    raw: dict
    richardson: dict

    def error_estimate(self, name: str) -> float:
        """|extrapolated - raw(h/2)|, the size of the remaining mesh error."""
        return abs(self.richardson[name] - self.raw[name][1])


def run_oracle(g: float, h: float | None = None, L: float | None = None) -> OracleResult:
    """Even, odd and psi_+ (slope g-1) energies, each from h and h/2."""
    h = default_step(g) if h is None else h
    L = default_x_max(g) if L is None else L
    solvers = {
        "E_ev": lambda s: fd_eigen(g, "even", s, L),
        "E_od": lambda s: fd_eigen(g, "odd", s, L),
        "E_plus": lambda s: fd_robin(g, g - 1.0, s, L),
    }
    raw, extra = {}, {}
    for name, solve in solvers.items():
        pair = (solve(h), solve(h / 2))
        raw[name] = pair
        extra[name] = richardson(*pair)
        if abs(extra[name] - pair[0]) > 1e-5 * g:
            warnings.warn(f"{name}: mesh too coarse, Richardson shift "
                          f"{abs(extra[name] - pair[0]):.2e}", RuntimeWarning, stacklevel=2)
    return OracleResult(g, h, L, extra["E_ev"], extra["E_od"], extra["E_plus"], raw, extra)

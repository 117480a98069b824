"""Graded half-line grid and the nested integral operators built on it.

All nested integrals are of the form

    Q(y) = W(y)^-1 * int W(z) F(z) dz

with W = weight^2 given through its logarithm. Q is accumulated with a
first-order linear recurrence whose coefficient is exp(log W(z) - log W(y))
between neighbouring nodes, so huge and tiny factors never meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numba import njit
from scipy.special import erf

from .model import ModelParams

Anchor = Literal["infinity", "zero", "split"]


@dataclass(frozen=True, eq=False)
class Grid:
    """Graded grid on [0, x_max] with a node at x = 1 and Simpson weights per side."""

    nodes: np.ndarray
    weights: np.ndarray
    refinement_zones: tuple
    i_one: int
    h: np.ndarray = field(repr=False)
    jump_weight: float = 0.0

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def x_max(self) -> float:
        return float(self.nodes[-1])

    def integrate(self, values, jump: float = 0.0) -> float:
        """Composite Simpson integral; ``jump`` is F(1-) - F(1+) at the node x = 1."""
        return float(np.dot(self.weights, values)) + self.jump_weight * jump

    def cumulative(self, values, from_right: bool = False) -> np.ndarray:
        """Running trapezoid integral from 0, or towards x_max if ``from_right``."""
        v = np.asarray(values, dtype=float)
        cells = 0.5 * self.h * (v[:-1] + v[1:])
        out = np.zeros_like(v)
        if from_right:
            out[:-1] = np.cumsum(cells[::-1])[::-1]
        else:
            out[1:] = np.cumsum(cells)
        return out

    def index_of(self, x: float) -> int:
        if math.isinf(x):
            return self.n_nodes - 1
        i = int(np.searchsorted(self.nodes, x))
        if i >= self.n_nodes or not math.isclose(self.nodes[i], x, abs_tol=1e-14):
            raise ValueError(f"{x} is not a grid node")
        return i


def _density(x, g, a0, a1):
    return 1.0 + a0 * g * np.exp(-g * x) + a1 * math.sqrt(g) * np.exp(-g * (x - 1.0) ** 2)


def _density_integral(x, g, a0, a1):
    sg = math.sqrt(g)
    return (x + a0 * (1.0 - np.exp(-g * x))
            + a1 * 0.5 * math.sqrt(math.pi) * (erf(sg * (x - 1.0)) + erf(sg)))


def _invert(targets, lo, hi, g, a0, a1):
    # Newton on the monotone cumulative density, bracketed by [lo, hi]
    x = np.interp(targets, [_density_integral(lo, g, a0, a1),
                            _density_integral(hi, g, a0, a1)], [lo, hi])
    for _ in range(100):
        step = (_density_integral(x, g, a0, a1) - targets) / _density(x, g, a0, a1)
        x = np.clip(x - step, lo, hi)
        if np.max(np.abs(step)) < 1e-15:
            break
    return x


def build_grid(params: ModelParams, a0: float = 2.0, a1: float = 4.0) -> Grid:
    """Graded grid, dense near 0 (scale 1/g) and near 1 (scale 1/sqrt g).

    Nodes are equally spaced in the cumulative density
    1 + a0 g exp(-g x) + a1 sqrt(g) exp(-g (x-1)^2), so spacing varies
    smoothly and the quadrature errors keep clean power expansions. The
    left piece always has an even number of cells.
    """
    g, xm, n = params.g, params.x_max, params.n_cells
    phi_1 = _density_integral(1.0, g, a0, a1)
    phi_m = _density_integral(xm, g, a0, a1)
    n_left = min(max(2 * int(round(0.5 * n * phi_1 / phi_m)), 10), n - 10)
    n_right = n - n_left
    left = _invert(np.linspace(0.0, phi_1, n_left + 1), 0.0, 1.0, g, a0, a1)
    right = _invert(np.linspace(phi_1, phi_m, n_right + 1), 1.0, xm, g, a0, a1)
    left[0], left[-1], right[-1] = 0.0, 1.0, xm
    nodes = np.concatenate([left, right[1:]])
    h = np.diff(nodes)
    if np.any(h <= 0):
        raise ValueError("grid construction produced non-increasing nodes")
    weights = np.zeros_like(nodes)
    _simpson_weights(h[:n_left], weights[:n_left + 1])
    jump_weight = float(weights[n_left])
    _simpson_weights(h[n_left:], weights[n_left:])
    zones = ((0.0, 1.0 / g), (1.0, 1.0 / math.sqrt(g)))
    return Grid(nodes, weights, zones, n_left, h, jump_weight)


def _simpson_weights(h, out):
    """Add nonuniform Simpson weights for cells ``h`` into ``out`` (one longer).

    Exact for quadratics on each pair of cells; an odd trailing cell gets
    the trapezoid rule.
    """
    m = h.size - h.size % 2
    h0, h1 = h[0:m:2], h[1:m:2]
    s = h0 + h1
    out[0:m:2] += s / 6.0 * (2.0 - h1 / h0)
    out[1:m:2] += s**3 / (6.0 * h0 * h1)
    out[2:m + 1:2] += s / 6.0 * (2.0 - h0 / h1)
    if m < h.size:
        out[-2] += 0.5 * h[-1]
        out[-1] += 0.5 * h[-1]


@dataclass(frozen=True, eq=False)
class GridFn:
    """A function sampled on a grid.

    ``log_abs`` optionally carries ln|values| for quantities whose magnitude
    is outside double range; ``values`` then holds whatever is representable.
    ``jump`` is F(1-) - F(1+), non-zero only for sources built from w.
    """

    grid: Grid
    values: np.ndarray
    log_abs: np.ndarray | None = None
    jump: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.nodes.shape:
            raise ValueError("values length must equal the node count")
        object.__setattr__(self, "values", v)
        if self.log_abs is not None:
            la = np.asarray(self.log_abs, dtype=float)
            if la.shape != v.shape:
                raise ValueError("log_abs length must equal the node count")
            object.__setattr__(self, "log_abs", la)

    @classmethod
    def from_log(cls, grid: Grid, log_abs, sign=1.0) -> GridFn:
        la = np.asarray(log_abs, dtype=float)
        return cls(grid, np.asarray(sign) * np.exp(la), la)

    def log(self) -> np.ndarray:
        if self.log_abs is not None:
            return self.log_abs
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.values))

    def __call__(self, x):
        return np.interp(x, self.grid.nodes, self.values)


def _same_grid(a: GridFn, b: GridFn):
    if a.grid is not b.grid:
        raise ValueError("grid mismatch")


@njit(cache=True)
def _cell_coeffs(d):
    # int_0^1 exp(d t) (1 - t) dt and int_0^1 exp(d t) t dt: the cell rule with
    # log W linear and F linear, exact for the exponential part of W
    if not math.isfinite(d):
        return 0.5, 0.5
    if abs(d) < 0.05:
        c0, c1, term = 0.0, 0.0, 1.0
        for k in range(8):
            fact = 1.0
            for j in range(2, k + 3):
                fact *= j
            c0 += term / fact
            c1 += (k + 1) * term / fact
            term *= d
        return c0, c1
    em1 = math.expm1(d)
    return (em1 - d) / (d * d), (d * em1 - em1 + d) / (d * d)


@njit(cache=True)
def _suffix_ratio(ell, f, h, i_one, jump, start):
    # q[i] = exp(-ell[i]) * int_{x_i}^{x_max} exp(ell) f
    n = ell.size
    q = np.zeros(n)
    for i in range(n - 2, start - 1, -1):
        d = ell[i + 1] - ell[i]
        c0, c1 = _cell_coeffs(d)
        right = f[i + 1] + jump if i + 1 == i_one else f[i + 1]
        q[i] = math.exp(d) * q[i + 1] + h[i] * (c0 * f[i] + c1 * right)
    return q


@njit(cache=True)
def _prefix_ratio(ell, f, h, i_one, jump, stop, q0):
    # r[i] = exp(-ell[i]) * int_0^{x_i} exp(ell) f ; r[0] supplied as a limit
    n = ell.size
    r = np.zeros(n)
    r[0] = q0
    for i in range(1, stop + 1):
        d = ell[i - 1] - ell[i]
        c0, c1 = _cell_coeffs(d)
        here = f[i] + jump if i == i_one else f[i]
        r[i] = math.exp(d) * r[i - 1] + h[i - 1] * (c0 * here + c1 * f[i - 1])
    return r


@njit(cache=True)
def _weighted_total(ell, f, h, i_one, jump, top):
    # exp(-top) * int_0^{x_max} exp(ell) f with the same cell rule
    total = 0.0
    for i in range(ell.size - 1):
        right = f[i + 1] + jump if i + 1 == i_one else f[i + 1]
        d = ell[i + 1] - ell[i]
        if math.isfinite(d):
            c0, c1 = _cell_coeffs(d)
            total += math.exp(ell[i] - top) * h[i] * (c0 * f[i] + c1 * right)
        else:
            lo = math.exp(ell[i] - top) * f[i] if math.isfinite(ell[i]) else 0.0
            hi = math.exp(ell[i + 1] - top) * right if math.isfinite(ell[i + 1]) else 0.0
            total += 0.5 * h[i] * (lo + hi)
    return total


@njit(cache=True)
def _suffix_scaled(ell, f, h, top):
    # s[i] = exp(-top) * int_{x_i}^{x_max} exp(ell) f, cell by cell
    n = ell.size
    s = np.zeros(n)
    for i in range(n - 2, -1, -1):
        c0, c1 = _cell_coeffs(ell[i + 1] - ell[i])
        s[i] = s[i + 1] + math.exp(ell[i] - top) * h[i] * (c0 * f[i] + c1 * f[i + 1])
    return s


def suffix_scaled(weight: GridFn, F: GridFn, top: float) -> np.ndarray:
    """exp(-top) * int_x^x_max weight^2 F at every node, same cell rule as the nests."""
    _same_grid(weight, F)
    if F.jump:
        raise ValueError("suffix_scaled does not handle jumps")
    return _suffix_scaled(_log_w2(weight), F.values, weight.grid.h, top)


def _log_w2(weight: GridFn) -> np.ndarray:
    return 2.0 * weight.log()


def inner_suffix(weight: GridFn, F: GridFn, start: int = 0) -> np.ndarray:
    """weight(y)^-2 * int_y^x_max weight^2 F, at nodes from ``start`` on."""
    _same_grid(weight, F)
    g = weight.grid
    return _suffix_ratio(_log_w2(weight), F.values, g.h, g.i_one, F.jump, start)


def inner_prefix(weight: GridFn, F: GridFn, stop: int | None = None,
                 limit_at_zero: float = 0.0) -> np.ndarray:
    """weight(y)^-2 * int_0^y weight^2 F, at nodes up to ``stop``.

    ``limit_at_zero`` is the y -> 0 value, needed when weight(0) = 0.
    """
    _same_grid(weight, F)
    g = weight.grid
    stop = g.n_nodes - 1 if stop is None else stop
    return _prefix_ratio(_log_w2(weight), F.values, g.h, g.i_one, F.jump, stop,
                         limit_at_zero)


def bracket(weight: GridFn, F: GridFn) -> float:
    """int_0^x_max weight^2 F with the composite rule."""
    _same_grid(weight, F)
    ell = _log_w2(weight)
    top = float(np.max(ell))
    g = weight.grid
    return _weighted_total(ell, F.values, g.h, g.i_one, F.jump, top) * math.exp(top)


def _check_weight(weight: GridFn, allow_zero_at_origin: bool):
    if weight.log_abs is None:
        ok = weight.values > 0
    else:
        ok = (weight.log_abs > -np.inf) & (weight.values >= 0)
    if np.any(np.isnan(weight.values)) or not np.all(ok[1:] if allow_zero_at_origin else ok):
        raise ValueError("weight must be strictly positive on the grid")


def split_inner(weight: GridFn, F: GridFn, limit_at_zero: float = 0.0) -> np.ndarray:
    """Signed inner integral -W^-1 int_y^inf W F, using the prefix form below 1.

    Valid when int_0^inf W F = 0, which the energy updates enforce.
    Each side then runs its recurrence in the direction where W shrinks.
    """
    i1 = weight.grid.i_one
    q = inner_suffix(weight, F, start=i1)
    r = inner_prefix(weight, F, stop=i1 - 1, limit_at_zero=limit_at_zero)
    q[:i1] = -r[:i1]
    return q


def apply_greens(weight: GridFn, F: GridFn, anchor: Anchor | bool = "infinity",
                 limit_at_zero: float = 0.0) -> GridFn:
    """Nested Green's-function integral of F.

    anchor="infinity" (or False): x -> -2 int_x^inf w^-2(y) int_y^inf w^2 F.
    anchor="zero" (or True): x -> -2 int_0^x w^-2(y) int_0^y w^2 F, which
    equals the "infinity" form minus its value at 0 when int_0^inf w^2 F = 0.
    anchor="split": the "infinity" form evaluated through the prefix inner
    integral on [0, 1); exact when int_0^inf w^2 F = 0 and free of the
    cancellation the pure suffix form suffers there.
    """
    if anchor is True:
        anchor = "zero"
    elif anchor is False:
        anchor = "infinity"
    _same_grid(weight, F)
    _check_weight(weight, allow_zero_at_origin=anchor != "infinity")
    grid = weight.grid
    if anchor == "infinity":
        q = inner_suffix(weight, F)
        out = -2.0 * grid.cumulative(q, from_right=True)
    elif anchor == "zero":
        r = inner_prefix(weight, F, limit_at_zero=limit_at_zero)
        out = -2.0 * grid.cumulative(r)
    elif anchor == "split":
        q = split_inner(weight, F, limit_at_zero)
        out = -2.0 * grid.cumulative(q, from_right=True)
    else:
        raise ValueError(f"unknown anchor {anchor!r}")
    return GridFn(grid, out)


def nested_double(weight: GridFn, inner_F: GridFn, y_range=(0.0, math.inf),
                  z_anchor: Literal["from_zero", "to_inf"] = "to_inf",
                  limit_at_zero: float = 0.0) -> float:
    """2 int_{y in y_range} weight^-2(y) int weight^2 inner_F dz dy.

    The z integral runs over [0, y] for "from_zero" and [y, inf) for
    "to_inf". Endpoints of ``y_range`` must be grid nodes.
    """
    _same_grid(weight, inner_F)
    grid = weight.grid
    lo, hi = grid.index_of(y_range[0]), grid.index_of(y_range[1])
    if z_anchor == "to_inf":
        q = inner_suffix(weight, inner_F, start=lo)
    elif z_anchor == "from_zero":
        q = inner_prefix(weight, inner_F, stop=hi, limit_at_zero=limit_at_zero)
    else:
        raise ValueError(f"unknown z_anchor {z_anchor!r}")
    seg = slice(lo, hi + 1)
    return 2.0 * float(np.sum(0.5 * grid.h[lo:hi] * (q[seg][:-1] + q[seg][1:])))

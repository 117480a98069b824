"""The psi_+ state and the odd state built from it.

psi_+ = phi_+ f_+ solves the half-line problem with psi'/psi(0) = g - 1 and
comes from the same iteration as the even state, with (phi_+, u) in place
of (phi, w). From psi_+ we build

    psi_-(x) = 2 gamma psi_+(x) int_x^inf psi_+^-2 int_y^inf psi_+^2
    chi      = psi_+ - psi_-

with gamma fixed by chi(0) = 0. chi solves the problem with an extra
potential nu for which only nu*chi = -gamma psi_+ is ever needed. The odd
state psi_od = chi k follows from the k_n / Delta_n iteration and
E_od = E_+ + Delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .even import (ConvergenceError, IterateTrace, _check_monotone, _flag, _record, new_trace,
                   iterate_shift)
from .model import ModelParams, TrialBundle, eval_trial
from .quadrature import (Grid, GridFn, apply_greens, bracket, build_grid, inner_suffix,
                         suffix_scaled)


@dataclass
class PlusSolution:
    params: ModelParams
    grid: Grid
    trial: TrialBundle
    f_plus: GridFn
    energy_shift_plus: float
    psi_plus: GridFn
    trace: IterateTrace

    @property
    def E_plus(self) -> float:
        return self.params.g - self.energy_shift_plus


@dataclass
class OddSolution:
    params: ModelParams
    grid: Grid
    plus: PlusSolution
    gamma: float
    log_gamma: float
    psi_minus: GridFn
    chi: GridFn
    k: GridFn
    delta_od: float
    psi_od: GridFn
    trace: IterateTrace

    @property
    def E_plus(self) -> float:
        return self.plus.E_plus

    @property
    def E_od(self) -> float:
        return self.plus.E_plus + self.delta_od

    @property
    def delta_first(self) -> float:
        return self.trace.energies[0]


def solve_plus(params: ModelParams, grid: Grid | None = None) -> PlusSolution:
    """Iterate f_+ from 1 to convergence; E_+ = g - E_+shift."""
    grid = build_grid(params) if grid is None else grid
    trial = eval_trial(params, grid.nodes)
    weight = GridFn.from_log(grid, trial.log_phi_plus)
    f, energy, trace = iterate_shift(grid, weight, trial.u, 0.0, params, "plus")
    psi = GridFn.from_log(grid, trial.log_phi_plus + np.log(f.values))
    return PlusSolution(params, grid, trial, f, energy, psi, trace)


def _psi_plus_nest(plus: PlusSolution):
    # q(y) = psi_+^-2(y) int_y^inf psi_+^2, and its tail integral A(x)
    grid = plus.grid
    q = inner_suffix(plus.psi_plus, GridFn(grid, np.ones(grid.n_nodes)))
    tail = grid.cumulative(q, from_right=True)
    head = grid.cumulative(q)
    return q, tail, head


def compute_gamma(plus: PlusSolution, log: bool = False) -> float:
    """gamma = 1 / (2 int_0^inf psi_+^-2 int_y^inf psi_+^2).

    With ``log=True`` returns ln gamma, which stays finite when gamma
    itself would underflow.
    """
    log_inv = math.log(2.0) + _log_nest_total(plus)
    if log:
        return -log_inv
    if log_inv > 709.0:
        raise OverflowError("gamma underflows at this coupling; use log=True")
    return math.exp(-log_inv)


def _log_nest_total(plus: PlusSolution) -> float:
    # ln int_0^inf q. Below 1, q = psi_+^-2 int_y^inf psi_+^2 can exceed double
    # range, so it is rebuilt there as exp(ln S + top - ell) with
    # S = int_y^inf exp(ell - top), which is of order one for y < 1.
    grid = plus.grid
    ell = 2.0 * plus.psi_plus.log()
    q = inner_suffix(plus.psi_plus, GridFn(grid, np.ones(grid.n_nodes)))
    i1 = grid.i_one
    top = float(ell[i1:].max())
    s = suffix_scaled(plus.psi_plus, GridFn(grid, np.ones(grid.n_nodes)), top)[:i1 + 1]
    log_q = np.empty_like(ell)
    log_q[:i1 + 1] = np.log(s) + top - ell[:i1 + 1]
    with np.errstate(divide="ignore"):
        log_q[i1 + 1:] = np.log(q[i1 + 1:])
    # trapezoid on exp(log_q), pivoted
    cells = np.logaddexp(log_q[:-1], log_q[1:]) + np.log(0.5 * grid.h)
    return float(np.logaddexp.reduce(cells))


def build_chi(plus: PlusSolution, gamma: float):
    """Return (chi, psi_minus) as log-carrying GridFns.

    Below x = 1, chi/psi_+ is taken as 2 gamma int_0^x (...) rather than
    1 - psi_-/psi_+, which would cancel catastrophically near the origin.
    """
    grid = plus.grid
    _, tail, head = _psi_plus_nest(plus)
    if not (np.isfinite(tail[0]) and gamma > 0):
        raise OverflowError("psi_+ nest outside double range; chi is not representable")
    i1 = grid.i_one
    # the two forms of chi/psi_+ meet at x = 1 only when gamma fits psi_+
    mismatch = 2.0 * gamma * (head[i1] + tail[i1]) - 1.0
    if abs(mismatch) > 1e-8:
        raise ValueError(f"gamma is inconsistent with psi_+ (mismatch {mismatch:.2e} at x = 1)")
    ratio_minus = 2.0 * gamma * tail
    ratio_chi = np.where(np.arange(grid.n_nodes) < grid.i_one,
                         2.0 * gamma * head, 1.0 - ratio_minus)
    log_pp = plus.psi_plus.log()
    with np.errstate(divide="ignore"):
        log_chi = log_pp + np.log(np.abs(ratio_chi))
        log_minus = log_pp + np.log(ratio_minus)
    chi = GridFn(grid, np.sign(ratio_chi) * np.exp(log_chi), log_chi)
    psi_minus = GridFn(grid, np.exp(log_minus), log_minus)
    if np.any(chi.values < -1e-12 * np.max(chi.values)):
        raise ValueError("chi is negative somewhere; gamma is inconsistent with psi_+")
    return chi, psi_minus


def _odd_source(chi: GridFn, psi_plus: GridFn, gamma: float, delta: float, k: np.ndarray):
    # (nu + delta) k with nu = -gamma psi_+/chi; the origin value is never
    # used since chi^2 vanishes there
    f = np.zeros_like(k)
    f[1:] = (-gamma * np.exp(psi_plus.log()[1:] - chi.log()[1:]) + delta) * k[1:]
    return f


def step_odd(chi: GridFn, psi_plus: GridFn, gamma: float, k_prev: GridFn):
    """One odd step: Delta_n from k_{n-1} first, then k_n. Returns (k_n, Delta_n)."""
    grid = chi.grid
    k = k_prev.values
    # numerator as {(psi_+/chi) k} so the source is orthogonal under the same rule
    ratio = np.zeros_like(k)
    ratio[1:] = np.exp(psi_plus.log()[1:] - chi.log()[1:]) * k[1:]
    delta = gamma * bracket(chi, GridFn(grid, ratio)) / bracket(chi, k_prev)
    src = GridFn(grid, _odd_source(chi, psi_plus, gamma, delta, k))
    # small-y limit of chi^-2 int_0^y chi^2 (nu + delta) k, with chi ~ chi'(0) y
    slope = chi.values[1] / grid.nodes[1]
    r0 = -gamma * psi_plus.values[0] * k[0] / (2.0 * slope)
    k_next = 1.0 + apply_greens(chi, src, anchor="split", limit_at_zero=r0).values
    return GridFn(grid, k_next), delta


def solve_odd(params: ModelParams, grid: Grid | None = None,
              plus: PlusSolution | None = None) -> OddSolution:
    """psi_+ -> gamma -> chi -> k iteration from k_0 = 1."""
    if plus is None:
        plus = solve_plus(params, grid)
    grid = plus.grid
    log_gamma = compute_gamma(plus, log=True)
    gamma = math.exp(log_gamma)
    chi, psi_minus = build_chi(plus, gamma)
    k = GridFn(grid, np.ones(grid.n_nodes))
    trace = new_trace(params, "odd")
    trace.history.append(k.values)
    for n in range(1, params.max_iter + 1):
        k_new, delta = step_odd(chi, plus.psi_plus, gamma, k)
        diff = float(np.max(np.abs(k_new.values - k.values)))
        trace.energies.append(delta)
        trace.sup_diffs.append(diff)
        trace.edge_values.append((float(k_new.values[0]), float(k_new.values[grid.i_one])))
        trace.n_iters = n
        _check_monotone(trace, k_new.values, n, "odd", decreasing=False)
        if k_new.values.min() <= 0 or k_new.values.max() > 1 + 1e-9:
            _flag(trace, f"odd: iterate {n} left (0, 1]")
        _record(trace, k_new.values, params.keep_history)
        k = k_new
        if n > 1 and abs(delta - trace.energies[-2]) < params.tol_energy and diff < params.tol_fn:
            trace.converged = True
            break
    if not trace.converged:
        raise ConvergenceError(f"odd iteration did not converge in {params.max_iter} steps",
                               trace)
    deltas = trace.energies
    # strict in exact arithmetic; at large g Delta_n - Delta_1 is below rounding
    if any(not (0 < d <= deltas[0] * (1 + 1e-10)) for d in deltas[1:]):
        _flag(trace, "odd: Delta_n outside (0, Delta_1)")
    psi_od = GridFn.from_log(grid, chi.log() + np.log(k.values))
    return OddSolution(params, grid, plus, gamma, log_gamma, psi_minus, chi, k,
                       deltas[-1], psi_od, trace)

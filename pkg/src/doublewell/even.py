"""Even ground state by the f_n / E_n iteration.

Starting from f_0 = 1 the iteration alternates

    E_n = [w f_{n-1}] / [f_{n-1}]
    f_n = 1 - 2 int_x^inf phi^-2 int_y^inf phi^2 (w - E_n) f_{n-1}

with [F] = int_0^inf phi^2 F. The energy is E_ev = g - E.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import REGIME_G, ModelParams, TrialBundle, eval_trial, g_hat_left_limit
from .quadrature import Grid, GridFn, apply_greens, bracket, build_grid


class ConvergenceError(RuntimeError):
    """Raised when an iteration hits max_iter; carries the trace."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class RegimeWarning(RuntimeWarning):
    """Run below the large-g regime, or a large-g invariant failed."""


@dataclass
class IterateTrace:
    energies: list = field(default_factory=list)
    sup_diffs: list = field(default_factory=list)
    n_iters: int = 0
    converged: bool = False
    violations: list = field(default_factory=list)
    regime_warning: bool = False
    history: list = field(default_factory=list, repr=False)
    edge_values: list = field(default_factory=list, repr=False)


@dataclass
class EvenSolution:
    params: ModelParams
    grid: Grid
    trial: TrialBundle
    f: GridFn
    energy_shift: float
    psi_ev: GridFn
    trace: IterateTrace

    @property
    def E_ev(self) -> float:
        return self.params.g - self.energy_shift

    @property
    def energy_first(self) -> float:
        return self.trace.energies[0]


def contraction_observed(trace: IterateTrace, f_history=None, floor: float = 1e-12):
    """Ratios sup|f_{n+1} - f_n| / sup|f_n - f_{n-1}|.

    Pairs whose denominator sits below ``floor`` are rounding noise and are
    dropped. A tiny numerator is kept: it still bounds the true ratio.
    """
    if f_history is not None:
        if len(f_history) < 3:
            raise ValueError("need at least three stored iterates")
        diffs = [float(np.max(np.abs(b - a))) for a, b in zip(f_history, f_history[1:])]
    else:
        diffs = list(trace.sup_diffs)
        if len(diffs) < 2:
            raise ValueError("need at least three stored iterates")
    ratios = []
    for prev, nxt in zip(diffs, diffs[1:]):
        if prev > floor:
            ratios.append(nxt / prev)
    return ratios


def _record(trace: IterateTrace, f_new, keep_history):
    trace.history.append(f_new)
    if not keep_history and len(trace.history) > 4:
        trace.history.pop(0)


def iterate_shift(grid: Grid, weight: GridFn, pot: np.ndarray, pot_jump: float,
                  params: ModelParams, label: str):
    """Fixed-point loop shared by the even and plus problems.

    ``pot`` is the potential difference (w or u) on the grid and
    ``pot_jump`` its jump pot(1-) - pot(1+).
    Returns (f, energy_shift, trace).
    """
    i1 = grid.i_one
    f = np.ones(grid.n_nodes)
    trace = new_trace(params, label)
    trace.history.append(f)
    for n in range(1, params.max_iter + 1):
        e_n, f_new = step_shift(weight, pot, pot_jump, f)
        diff = float(np.max(np.abs(f_new - f)))
        trace.energies.append(e_n)
        trace.sup_diffs.append(diff)
        trace.edge_values.append((float(f_new[0]), float(f_new[i1])))
        trace.n_iters = n
        _check_monotone(trace, f_new, n, label, decreasing=True)
        _record(trace, f_new, params.keep_history)
        f = f_new
        if n > 1 and abs(e_n - trace.energies[-2]) < params.tol_energy and diff < params.tol_fn:
            trace.converged = True
            break
    if not trace.converged:
        raise ConvergenceError(
            f"{label} iteration did not converge in {params.max_iter} steps "
            f"(last sup diff {trace.sup_diffs[-1]:.3e})", trace)
    if any(e <= trace.energies[0] for e in trace.energies[1:]):
        _flag(trace, f"{label}: an energy shift does not exceed the first one")
    return GridFn(grid, f), trace.energies[-1], trace


def step_shift(weight: GridFn, pot: np.ndarray, pot_jump: float, f_prev: np.ndarray):
    """One update: energy from f_prev, then the new iterate."""
    grid = weight.grid
    i1 = grid.i_one
    num = bracket(weight, GridFn(grid, pot * f_prev, jump=pot_jump * f_prev[i1]))
    den = bracket(weight, GridFn(grid, f_prev))
    e_n = num / den
    src = GridFn(grid, (pot - e_n) * f_prev, jump=pot_jump * f_prev[i1])
    f_new = 1.0 + apply_greens(weight, src, anchor="split").values
    return e_n, f_new


def new_trace(params: ModelParams, label: str) -> IterateTrace:
    trace = IterateTrace(regime_warning=params.regime_warning)
    if trace.regime_warning:
        warnings.warn(f"{label}: g = {params.g:g} is below {REGIME_G:g}, "
                      "outside the large-g regime", RegimeWarning, stacklevel=4)
    return trace


def _flag(trace: IterateTrace, message: str):
    trace.violations.append(message)
    warnings.warn(message, RegimeWarning, stacklevel=3)


def _check_monotone(trace, values, n, label, decreasing, tol=1e-9):
    d = np.diff(values)
    bad = np.max(d) if decreasing else -np.min(d)
    if bad > tol:
        _flag(trace, f"{label}: iterate {n} not monotone (excess {bad:.2e})")


def even_weight(params: ModelParams, grid: Grid) -> tuple[TrialBundle, GridFn]:
    trial = eval_trial(params, grid.nodes)
    return trial, GridFn.from_log(grid, trial.log_phi)


def step_even(params: ModelParams, trial: TrialBundle, f_prev: GridFn):
    """One even step: returns (f_next, E_n)."""
    grid = f_prev.grid
    weight = GridFn.from_log(grid, trial.log_phi)
    e_n, f_new = step_shift(weight, trial.w, g_hat_left_limit(params), f_prev.values)
    return GridFn(grid, f_new), e_n


def solve_even(params: ModelParams, grid: Grid | None = None) -> EvenSolution:
    """Iterate from f_0 = 1 to convergence."""
    grid = build_grid(params) if grid is None else grid
    trial, weight = even_weight(params, grid)
    f, energy, trace = iterate_shift(grid, weight, trial.w, g_hat_left_limit(params),
                                     params, "even")
    psi = GridFn.from_log(grid, trial.log_phi + np.log(f.values))
    return EvenSolution(params, grid, trial, f, energy, psi, trace)


def eigen_residual(grid: Grid, psi: np.ndarray, potential: np.ndarray, energy: float,
                   extra: np.ndarray | None = None) -> float:
    """Relative sup-norm of -psi''/2 + (V - E) psi (+ extra) on interior nodes."""
    x = grid.nodes
    hl, hr = x[1:-1] - x[:-2], x[2:] - x[1:-1]
    d2 = 2.0 * ((psi[2:] - psi[1:-1]) / hr - (psi[1:-1] - psi[:-2]) / hl) / (hl + hr)
    res = -0.5 * d2 + (potential[1:-1] - energy) * psi[1:-1]
    if extra is not None:
        res = res + extra[1:-1]
    scale = np.max(np.abs(energy * psi))
    return float(np.max(np.abs(res)) / scale)

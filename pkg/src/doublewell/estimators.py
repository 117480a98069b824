"""scikit-learn style façade over the solvers."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .even import solve_even
from .model import ModelParams
from .odd import solve_odd, solve_plus
from .quadrature import GridFn, bracket, build_grid


class DoubleWellSolver(BaseEstimator):
    """Even, psi_+ and odd states of V = (g^2/2)(x^2 - 1)^2 for one coupling.

    ``fit(g)`` runs all three iterations on a shared grid. ``predict(X)``
    returns the normalised even and odd wavefunctions on the full line as
    an ``(n, 2)`` array.

    Attributes
    ----------
    E_ev_, E_plus_, E_od_ : float
        Energies.
    splitting_ : float
        E_od_ - E_ev_.
    gamma_ : float
        Coefficient fixing chi(0) = 0.
    even_, plus_, odd_ : solution objects
    """

    def __init__(self, n_cells=8000, x_max=None, tol_energy=None, tol_fn=1e-10, max_iter=200):
        self.n_cells = n_cells
        self.x_max = x_max
        self.tol_energy = tol_energy
        self.tol_fn = tol_fn
        self.max_iter = max_iter

    def _params(self, g) -> ModelParams:
        return ModelParams(g=g, x_max=self.x_max, n_cells=self.n_cells,
                           tol_energy=self.tol_energy, tol_fn=self.tol_fn,
                           max_iter=self.max_iter)

    def fit(self, g, y=None):
        g = float(np.asarray(g).item())
        params = self._params(g)
        grid = build_grid(params)
        self.even_ = solve_even(params, grid)
        self.plus_ = solve_plus(params, grid)
        self.odd_ = solve_odd(params, grid, self.plus_)
        self.g_ = g
        self.E_ev_ = self.even_.E_ev
        self.E_plus_ = self.plus_.E_plus
        self.E_od_ = self.odd_.E_od
        self.splitting_ = self.E_od_ - self.E_ev_
        self.gamma_ = self.odd_.gamma
        self.n_iter_ = (self.even_.trace.n_iters, self.plus_.trace.n_iters,
                        self.odd_.trace.n_iters)
        return self

    def predict(self, X):
        check_is_fitted(self, "E_ev_")
        x = check_array(X, ensure_2d=False, dtype=float).reshape(-1)
        ax = np.abs(x)
        if np.any(ax > self.even_.grid.x_max):
            raise ValueError(f"|x| must not exceed x_max = {self.even_.grid.x_max}")
        ev = _normalised(self.even_.psi_ev)(ax)
        od = np.sign(x) * _normalised(self.odd_.psi_od)(ax)
        return np.column_stack([ev, od])


def _normalised(psi: GridFn) -> GridFn:
    # half-line norm 1/2 so the full-line state has unit norm
    one = GridFn(psi.grid, np.ones(psi.grid.n_nodes))
    scale = math.sqrt(2.0 * bracket(psi, one))
    return GridFn(psi.grid, psi.values / scale)

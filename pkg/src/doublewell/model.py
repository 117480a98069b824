"""Closed-form pieces of the quartic double well V = (g^2/2)(x^2 - 1)^2.

Everything here is analytic and vectorised over numpy arrays. Trial
functions are returned as log-magnitudes since phi^-2 near the origin
grows like exp(4g/3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: regime threshold below which the large-g bounds are not expected to hold
REGIME_G = 5.0


def default_x_max(g: float) -> float:
    """Cutoff 1 + sqrt(350/g), clipped to [4, 12]."""
    return float(min(12.0, max(4.0, 1.0 + math.sqrt(350.0 / g))))


@dataclass(frozen=True)
class ModelParams:
    """Coupling plus numerical policy for one solve.

    Parameters
    ----------
    g : float
        Coupling, must exceed 1.
    x_max : float, optional
        Right end of the half-line domain. Defaults to ``default_x_max(g)``.
    n_cells : int
        Number of grid cells.
    tol_energy : float, optional
        Stopping tolerance on successive energy shifts, default ``1e-12 * g``.
    tol_fn : float
        Stopping tolerance on the sup-norm of successive iterates.
    max_iter : int
        Iteration cap.
    keep_history : bool
        Keep every iterate instead of the last four.
    """

    g: float
    x_max: float | None = None
    n_cells: int = 8000
    tol_energy: float | None = None
    tol_fn: float = 1e-10
    max_iter: int = 200
    keep_history: bool = field(default=False, compare=False)

    def __post_init__(self):
        g = float(self.g)
        if not math.isfinite(g) or g <= 1.0:
            raise ValueError(f"g must be a finite number > 1, got {self.g!r}")
        object.__setattr__(self, "g", g)
        x_max = default_x_max(g) if self.x_max is None else float(self.x_max)
        if not x_max > 1.0:
            raise ValueError(f"x_max must exceed 1, got {x_max!r}")
        object.__setattr__(self, "x_max", x_max)
        if int(self.n_cells) != self.n_cells or self.n_cells < 100:
            raise ValueError(f"n_cells must be an integer >= 100, got {self.n_cells!r}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        tol_energy = 1e-12 * g if self.tol_energy is None else float(self.tol_energy)
        if not tol_energy > 0 or not self.tol_fn > 0:
            raise ValueError("tolerances must be positive")
        object.__setattr__(self, "tol_energy", tol_energy)
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    @property
    def eps(self) -> float:
        """Tunnelling scale exp(-4g/3)."""
        return math.exp(-4.0 * self.g / 3.0)

    @property
    def regime_warning(self) -> bool:
        return self.g < REGIME_G

    def replace(self, **changes) -> ModelParams:
        kw = dict(g=self.g, x_max=self.x_max, n_cells=self.n_cells,
                  tol_energy=self.tol_energy, tol_fn=self.tol_fn,
                  max_iter=self.max_iter, keep_history=self.keep_history)
        if "g" in changes and "x_max" not in changes:
            kw["x_max"] = None
        if "g" in changes and "tol_energy" not in changes:
            kw["tol_energy"] = None
        kw.update(changes)
        return ModelParams(**kw)


def _coords(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("coordinates must be >= 0; use parity for x < 0")
    return x


def eval_actions(params: ModelParams, x):
    """Return (S0, S1, V) at x >= 0.

    S0 = (x-1)^2 (x+2) / 3, S1 = ln((x+1)/2), V = (g^2/2)(x^2-1)^2.
    """
    x = _coords(x)
    s0 = (x - 1.0) ** 2 * (x + 2.0) / 3.0
    s1 = np.log((x + 1.0) / 2.0)
    v = 0.5 * params.g**2 * (x * x - 1.0) ** 2
    return s0, s1, v


def _tunnel_factor(g: float, x: np.ndarray) -> np.ndarray:
    # exp(2 g S0 - 4g/3) = exp(-2gx + 2gx^3/3), clipped at x = 1
    xc = np.minimum(x, 1.0)
    return np.exp(g * (-2.0 * xc + 2.0 * xc**3 / 3.0))


def eval_w(params: ModelParams, x):
    """Return (u, g_hat, w) at x >= 0.

    g_hat is discontinuous at x = 1; the point itself takes the outer
    branch, so w(1) = u(1) = 1/4.
    """
    x = _coords(x)
    g = params.g
    u = 1.0 / (1.0 + x) ** 2
    q = _tunnel_factor(g, x)
    gh = 2.0 * g * (g - 1.0) * q / ((g + 1.0) + (g - 1.0) * q)
    gh = np.where(x < 1.0, gh, 0.0)
    return u, gh, u + gh


def g_hat_left_limit(params: ModelParams) -> float:
    """g_hat(1-), the size of the jump of w at x = 1."""
    g, eps = params.g, params.eps
    return 2.0 * g * (g - 1.0) * eps / ((g + 1.0) + (g - 1.0) * eps)


@dataclass(frozen=True)
class TrialBundle:
    """Trial functions sampled at ``x``; phi's are stored as logs."""

    x: np.ndarray
    log_phi_plus: np.ndarray
    log_phi_minus: np.ndarray
    log_phi: np.ndarray
    u: np.ndarray
    g_hat: np.ndarray
    w: np.ndarray

    @property
    def phi(self) -> np.ndarray:
        return np.exp(self.log_phi)

    @property
    def phi_plus(self) -> np.ndarray:
        return np.exp(self.log_phi_plus)


def eval_trial(params: ModelParams, x) -> TrialBundle:
    """Evaluate phi_+, phi_-, phi and the potential differences at x >= 0."""
    x = _coords(x)
    g = params.g
    s0, s1, _ = eval_actions(params, x)
    log_pp = -g * s0 - s1
    log_pm = -4.0 * g / 3.0 + g * s0 - s1
    c = (g - 1.0) / (g + 1.0)
    inner = np.log1p(c * _tunnel_factor(g, x))
    log_phi = log_pp + np.where(x < 1.0, inner, math.log1p(c * params.eps))
    u, gh, w = eval_w(params, x)
    return TrialBundle(x, log_pp, log_pm, log_phi, u, gh, w)


def nu_chi_product(gamma: float, psi_plus):
    """nu * chi = -gamma * psi_+; nu alone is singular at the origin."""
    return -gamma * np.asarray(psi_plus, dtype=float)

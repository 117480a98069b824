"""Ground and first excited states of V = (g^2/2)(x^2 - 1)^2 by Green's-function iteration."""

from .bounds import BoundEntry, BoundsReport, analytic_bounds, j_envelope_check, verify
from .estimators import DoubleWellSolver
from .even import ConvergenceError, EvenSolution, RegimeWarning, solve_even
from .model import ModelParams, default_x_max
from .odd import OddSolution, PlusSolution, solve_odd, solve_plus
from .oracle import fd_eigen, fd_robin, run_oracle
from .quadrature import Grid, GridFn, build_grid
from .series import build_pyramid, sigma_prime

__all__ = [
    "BoundEntry", "BoundsReport", "ConvergenceError", "DoubleWellSolver", "EvenSolution",
    "Grid", "GridFn", "ModelParams", "OddSolution", "PlusSolution", "RegimeWarning",
    "analytic_bounds", "build_grid", "build_pyramid", "default_x_max", "fd_eigen", "fd_robin",
    "j_envelope_check", "run_oracle", "sigma_prime", "solve_even", "solve_odd", "solve_plus",
    "verify",
]

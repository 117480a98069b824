import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad, quad

from doublewell import GridFn, ModelParams, build_grid
from doublewell.bounds import J_upper, calJ_plus_upper, first_order_integrals, gamma_corridor
from doublewell.model import eval_trial, g_hat_left_limit
from doublewell.odd import compute_gamma, solve_plus
from doublewell.quadrature import apply_greens, bracket, nested_double


@pytest.fixture(scope="module")
def g5():
    p = ModelParams(g=5)
    grid = build_grid(p)
    t = eval_trial(p, grid.nodes)
    return p, grid, t, GridFn.from_log(grid, t.log_phi)


def ones(grid):
    return GridFn(grid, np.ones(grid.n_nodes))


def test_grid_shape():
    for g in (2.0, 5.0, 20.0, 80.0):
        grid = build_grid(ModelParams(g=g))
        x = grid.nodes
        assert x[0] == 0.0 and x[-1] == grid.x_max and x[grid.i_one] == 1.0
        assert np.all(np.diff(x) > 0) and np.all(grid.weights > 0)
        assert grid.integrate(np.ones_like(x)) == pytest.approx(grid.x_max, rel=1e-13)
        near = np.abs(x[:-1] - 1.0) < 3 / math.sqrt(g)
        assert grid.h[near].max() <= (1 / math.sqrt(g)) / 20


def test_gaussian_against_adaptive(g5):
    _, grid, _, _ = g5
    g = 5.0
    ref, _ = quad(lambda t: math.exp(-2 * g * (t - 1) ** 2), 0, grid.x_max,
                  points=[1.0], epsabs=0, epsrel=1e-13)
    assert grid.integrate(np.exp(-2 * g * (grid.nodes - 1) ** 2)) == pytest.approx(ref, rel=1e-10)


def test_integrate_jump():
    grid = build_grid(ModelParams(g=5))
    step = np.where(grid.nodes < 1.0, 1.0, 0.0)
    # the node at 1 carries the right value; the jump restores the left one
    assert grid.integrate(step, jump=1.0) == pytest.approx(1.0, rel=1e-13)


def test_gridfn_validation(g5):
    _, grid, _, _ = g5
    with pytest.raises(ValueError):
        GridFn(grid, np.ones(3))
    other = build_grid(ModelParams(g=6))
    with pytest.raises(ValueError):
        bracket(ones(grid), ones(other))


def test_bracket_zero_and_norm():
    for g in (10.0, 20.0):
        p = ModelParams(g=g)
        grid = build_grid(p)
        t = eval_trial(p, grid.nodes)
        pp = GridFn.from_log(grid, t.log_phi_plus)
        assert bracket(pp, GridFn(grid, np.zeros(grid.n_nodes))) == 0.0
        n = bracket(pp, ones(grid))
        assert n == pytest.approx(math.sqrt(math.pi / (2 * g)), rel=0.1)
        e1 = bracket(pp, GridFn(grid, t.u)) / n
        a1 = e1 - 0.25 - 9 / (64 * g)
        assert a1 < 311 / (64 * g * g)


def test_greens_trivial(g5):
    _, grid, _, phi = g5
    zero = GridFn(grid, np.zeros(grid.n_nodes))
    for anchor in ("infinity", "zero", "split"):
        assert np.all(apply_greens(phi, zero, anchor).values == 0)
    out = apply_greens(phi, GridFn(grid, np.exp(-grid.nodes)))
    assert out.values[-1] == 0.0
    with pytest.raises(ValueError):
        apply_greens(phi, zero, anchor="middle")
    with pytest.raises(ValueError):
        apply_greens(GridFn(grid, -np.ones(grid.n_nodes)), zero)


def test_greens_residual(g5):
    # (T + V + w - g)(phi G) = phi F with G = apply_greens(phi, F)
    p, grid, t, phi = g5
    x = grid.nodes
    F = np.exp(-x)
    psi = phi.values * apply_greens(phi, GridFn(grid, F)).values
    hl, hr = x[1:-1] - x[:-2], x[2:] - x[1:-1]
    d2 = 2 * ((psi[2:] - psi[1:-1]) / hr - (psi[1:-1] - psi[:-2]) / hl) / (hl + hr)
    v = 0.5 * p.g**2 * (x * x - 1) ** 2
    res = -0.5 * d2 + (v + t.w - p.g)[1:-1] * psi[1:-1] - (phi.values * F)[1:-1]
    res[grid.i_one - 1] = 0.0  # w is two-valued at x = 1
    assert np.max(np.abs(res)) / np.max(np.abs(phi.values * F)) < 1e-4


def test_anchor_forms_differ_by_constant(g5):
    p, grid, t, phi = g5
    w = GridFn(grid, t.w, jump=g_hat_left_limit(p))
    e = bracket(phi, w) / bracket(phi, ones(grid))
    src = GridFn(grid, t.w - e, jump=g_hat_left_limit(p))
    inf = apply_greens(phi, src, "infinity").values
    split = apply_greens(phi, src, "split").values
    # the prefix form is only usable where phi has not yet decayed
    with np.errstate(over="ignore", invalid="ignore"):
        zero = apply_greens(phi, src, "zero").values[:grid.i_one + 1]
    shift = inf[:grid.i_one + 1] - zero
    assert np.ptp(shift) < 1e-8 * np.max(np.abs(inf))
    assert shift[0] == pytest.approx(inf[0])
    np.testing.assert_allclose(split, inf, atol=1e-8 * np.max(np.abs(inf)))


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 4.0))
def test_greens_linearity(a, b, k):
    grid = build_grid(ModelParams(g=5, n_cells=400))
    t = eval_trial(ModelParams(g=5), grid.nodes)
    phi = GridFn.from_log(grid, t.log_phi)
    f1, f2 = np.exp(-k * grid.nodes), 1 / (1 + grid.nodes) ** 2
    lhs = apply_greens(phi, GridFn(grid, a * f1 + b * f2)).values
    rhs = a * apply_greens(phi, GridFn(grid, f1)).values + b * apply_greens(phi, GridFn(grid, f2)).values
    scale = (abs(a) + abs(b)) * max(1.0, np.max(np.abs(rhs)))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


def test_nested_zero_and_bounds():
    p = ModelParams(g=10)
    grid = build_grid(p)
    phi = GridFn.from_log(grid, eval_trial(p, grid.nodes).log_phi)
    assert nested_double(phi, GridFn(grid, np.zeros(grid.n_nodes))) == 0.0
    J = nested_double(phi, ones(grid), (1.0, math.inf), "to_inf")
    assert J < calJ_plus_upper(10.0)
    assert J < J_upper(10.0)
    with pytest.raises(ValueError):
        nested_double(phi, ones(grid), (0.5, 1.0), "from_zero")
    g = compute_gamma(solve_plus(p, grid))
    lo, hi = gamma_corridor(10.0, 0.2, J)
    assert lo < g < hi


def test_I_J_against_scipy():
    # second-order rule: error below 1e-4 at the default grid, quartering per doubling
    g = 10.0
    p = ModelParams(g=g)
    lp = lambda z: float(eval_trial(p, [z]).log_phi[0])
    w = lambda z: float(eval_trial(p, [z]).w[0])
    J, _ = dblquad(lambda z, y: math.exp(2 * lp(z) - 2 * lp(y)), 1, p.x_max,
                   lambda y: y, lambda y: p.x_max, epsabs=0, epsrel=1e-11)
    I, _ = dblquad(lambda z, y: math.exp(2 * lp(z) - 2 * lp(y)) * w(z), 0, 1,
                   lambda y: 0, lambda y: y, epsabs=0, epsrel=1e-11)
    coarse, fine = first_order_integrals(p.replace(n_cells=4000)), first_order_integrals(p)
    for name, ref in (("J", 2 * J), ("I", 2 * I)):
        e1 = abs(getattr(coarse, name) / ref - 1)
        e2 = abs(getattr(fine, name) / ref - 1)
        assert e2 < 1e-4
        assert e2 < 1e-8 or 3.0 < e1 / e2 < 5.0


def test_refinement_stability():
    p = ModelParams(g=5)
    a, b = first_order_integrals(p), first_order_integrals(p.replace(n_cells=16000))
    assert abs(a.I / b.I - 1) < 1e-3
    assert abs(a.J / b.J - 1) < 1e-3
    ga = compute_gamma(solve_plus(p))
    gb = compute_gamma(solve_plus(p.replace(n_cells=16000)))
    assert abs(ga / gb - 1) < 1e-3

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doublewell.model import (ModelParams, default_x_max, eval_actions, eval_trial, eval_w,
                              g_hat_left_limit, nu_chi_product)

couplings = st.floats(min_value=1.5, max_value=60.0)


def test_params_validation():
    for bad in (dict(g=1.0), dict(g=0.5), dict(g=float("nan")), dict(g=5, x_max=0.9),
                dict(g=5, n_cells=50), dict(g=5, tol_fn=0.0), dict(g=5, max_iter=0)):
        with pytest.raises(ValueError):
            ModelParams(**bad)


def test_params_defaults():
    p = ModelParams(g=10)
    assert p.x_max == default_x_max(10) == 1 + math.sqrt(35)
    assert p.tol_energy == pytest.approx(1e-11)
    assert p.eps == math.exp(-40 / 3)
    assert ModelParams(g=4).regime_warning and not p.regime_warning
    assert default_x_max(1000) == 4.0 and default_x_max(2) == 12.0


def test_replace_rederives_g_dependent_defaults():
    p = ModelParams(g=10).replace(g=20)
    assert p.x_max == default_x_max(20)
    assert p.tol_energy == pytest.approx(2e-11)


def test_trial_at_one():
    p = ModelParams(g=7)
    t = eval_trial(p, [1.0])
    assert t.log_phi_plus[0] == 0.0
    assert t.log_phi_minus[0] == pytest.approx(-4 * 7 / 3)


def test_w_examples():
    p = ModelParams(g=6)
    u, gh, w = eval_w(p, [0.0, 1.0, 3.0])
    assert gh[0] == pytest.approx(p.g - 1) and w[0] == pytest.approx(p.g)
    assert w[1] == u[1] == 0.25 and gh[1] == 0.0
    assert w[2] == 1 / 16


def test_negative_x_rejected():
    with pytest.raises(ValueError):
        eval_w(ModelParams(g=5), [-0.1])


def test_phi_continuous_at_one():
    p = ModelParams(g=8)
    d = 1e-7
    lp = eval_trial(p, [1 - 2 * d, 1 - d, 1.0, 1 + d, 1 + 2 * d]).log_phi
    assert abs(lp[1] - lp[3]) < 1e-5
    left, right = (lp[1] - lp[0]) / d, (lp[4] - lp[3]) / d
    assert left == pytest.approx(right, abs=1e-4)


def test_w_decreasing_below_one():
    p = ModelParams(g=5)
    x = np.linspace(0, 1, 2001)[:-1]
    _, gh, w = eval_w(p, x)
    assert np.all(np.diff(w) < 0)
    assert np.all(gh > 0) and gh[0] == gh.max() == pytest.approx(4.0)
    assert gh.max() <= 2 * 5 * 4 / 6


def test_log_phi_matches_direct():
    for g in (2.0, 5.0, 10.0):
        p = ModelParams(g=g)
        x = np.linspace(0, 3, 301)
        s0, s1, _ = eval_actions(p, x)
        c = (g - 1) / (g + 1)
        pp = np.exp(-g * s0 - s1)
        pm = np.exp(-4 * g / 3 + g * s0 - s1)
        direct = np.where(x < 1, pp + c * pm, (1 + c * p.eps) * pp)
        np.testing.assert_allclose(eval_trial(p, x).phi, direct, rtol=1e-12)


def test_phi_plus_slope_at_origin():
    # phi_+'/phi_+(0) = g - 1
    p = ModelParams(g=9)
    d = 1e-6
    lp = eval_trial(p, [0.0, d]).log_phi_plus
    assert (lp[1] - lp[0]) / d == pytest.approx(8.0, rel=1e-4)


def test_nu_chi_product():
    assert np.all(nu_chi_product(0.0, [1.0, 2.0]) == 0)
    assert nu_chi_product(0.1, [2.0])[0] == pytest.approx(-0.2)


@given(couplings)
def test_jump_equals_left_limit(g):
    p = ModelParams(g=g)
    _, gh, _ = eval_w(p, [1 - 1e-12])
    assert gh[0] == pytest.approx(g_hat_left_limit(p), rel=1e-6)


@settings(max_examples=50)
@given(couplings, st.floats(min_value=0.0, max_value=5.0))
def test_trial_identities(g, x):
    p = ModelParams(g=g)
    t = eval_trial(p, [x])
    s0, s1, _ = eval_actions(p, [x])
    assert t.log_phi_plus[0] + t.log_phi_minus[0] == pytest.approx(-4 * g / 3 - 2 * s1[0], abs=1e-9)
    assert t.log_phi[0] >= t.log_phi_plus[0]
    assert t.w[0] == pytest.approx(t.u[0] + t.g_hat[0])
    assert 0 <= t.g_hat[0] <= 2 * g * (g - 1) / (g + 1) * (1 + 1e-12)

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from doublewell import ModelParams, build_pyramid, sigma_prime, solve_even
from doublewell.series import (asymptotic_check, asymptotic_energy, optimal_truncation,
                               partial_sum, table1_ratios, to_csv)


@pytest.fixture(scope="module")
def big():
    return build_pyramid(100)


def test_rows_through_four():
    # displayed with l running downwards, so reverse before comparing
    t = build_pyramid(4)
    assert t.row(1)[::-1] == (1, 1)
    assert t.row(2)[::-1] == (5, 9, 9, 9)
    assert t.row(3)[::-1] == (35, 89, 134, 170, 170, 170)
    assert t.row(4)[::-1] == (315, 1027, 1965, 2985, 3835, 4515, 4515, 4515)


def test_coefficients():
    t = build_pyramid(4)
    assert t.e == (Fraction(1, 4), Fraction(9, 64), Fraction(85, 512), Fraction(4515, 16384))
    assert all(isinstance(e, Fraction) for e in t.e)


def test_alpha0_equals_alpha1(big):
    assert all(row[0] == row[1] for row in big.alpha)


def test_rows_positive_and_nonincreasing(big):
    for m, row in enumerate(big.alpha, start=1):
        assert len(row) == 2 * m
        assert all(isinstance(a, int) and a > 0 for a in row)
        assert all(a >= b for a, b in zip(row, row[1:]))


def test_sigma_prime_values():
    t = build_pyramid(2)
    assert sigma_prime(t, 1, 0) == Fraction(-3, 4)
    assert sigma_prime(t, 2, 0) == Fraction(-103, 64)
    assert sigma_prime(t, 1, 1) == Fraction(-1, 8)
    assert sigma_prime(t, 1, 0.0) == pytest.approx(-0.75)


def test_sigma_prime_errors():
    t = build_pyramid(2)
    with pytest.raises(ValueError):
        sigma_prime(t, 3, 0)
    with pytest.raises(ValueError):
        sigma_prime(t, 0, 0)
    with pytest.raises(ValueError):
        sigma_prime(t, 1, -1)


def test_known_ratio_rows():
    rows = {m: (r, tag) for m, r, tag in table1_ratios(build_pyramid(4))}
    assert set(rows) == {1, 2, 3}
    assert rows[1] == (1, "exact") and rows[2] == (1, "exact")
    assert rows[3] == (Fraction(89, 85), "exact")
    assert round(float(rows[3][0]), 4) == 1.0471


def test_asymptotic_ratio_row(big):
    rows = {m: (r, tag) for m, r, tag in table1_ratios(big)}
    assert not any(4 <= m < 10 for m in rows)
    r30, tag = rows[30]
    assert tag == "asymptotic"
    assert abs(r30 / 1.5708 - 1) < 0.25


def test_asymptotic_energy_sign():
    assert asymptotic_energy(10) < 0
    assert asymptotic_energy(11) / asymptotic_energy(10) == pytest.approx(3 / 8 * 11)


def test_growth_ratio_exact_at_3():
    diag = asymptotic_check(build_pyramid(4))
    assert diag.ratios[3] == Fraction(4515, 16384) / Fraction(85, 512) / Fraction(3, 2)


def test_growth_ratios_approach_one(big):
    diag = asymptotic_check(big)
    for m in range(90, 100):
        assert 0.98 <= diag.ratios[m] <= 1.02
    assert 1.0 <= diag.prefactors[100] <= 1.6
    assert abs(diag.prefactors[100] / diag.prefactors[90] - 1) < 0.05


def test_entries_outgrow_fixed_width(big):
    assert big.row(15)[0].bit_length() > 63
    assert len(str(big.row(100)[0])) > 200


def test_optimal_truncation_tracks_8g_over_3(big):
    for g in (5.0, 10.0, 20.0):
        m = optimal_truncation(big, g)
        assert abs(m - 8 * g / 3) <= 3
    with pytest.raises(ValueError):
        optimal_truncation(build_pyramid(5), 20.0)


def test_csv_layout():
    text = to_csv(build_pyramid(4))
    lines = text.splitlines()
    assert lines[0] == "kind,m,a,b"
    assert "e,4,4515,16384" in lines
    assert "alpha,2,0,9" in lines and "alpha,2,3,5" in lines
    assert "ratio,3,1.0470588235294118,exact" in lines
    assert "\r" not in text


def test_build_rejects_bad_order():
    for bad in (0, -1, 2.5):
        with pytest.raises(ValueError):
            build_pyramid(bad)


def test_matches_iterated_energy_at_40():
    g = 40.0
    t = build_pyramid(4)
    shift = solve_even(ModelParams(g=g)).energy_shift
    remainder = shift - partial_sum(t, g, 3)
    assert abs(remainder) < 10 * float(t.e[3]) / g**3


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 40))
def test_row_invariants(m):
    t = build_pyramid(m)
    row = t.row(m)
    assert row[0] == row[1]
    assert t.coefficient(m) == Fraction(row[0], 2 ** (4 * m - 2))
    # top entries equal the full weighted sum of the previous row
    if m > 1:
        prev = t.row(m - 1)
        assert row[0] == sum((l + 4) * a for l, a in enumerate(prev))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 12), st.fractions(0, 10))
def test_sigma_prime_negative_and_decreasing_in_magnitude(m, x):
    t = build_pyramid(m)
    assert sigma_prime(t, m, x) < 0
    assert abs(sigma_prime(t, m, x + 1)) < abs(sigma_prime(t, m, x))

import functools
import warnings

import pytest

from doublewell import ModelParams, build_grid, run_oracle, solve_even, solve_odd, solve_plus

SWEEP = (3.0, 5.0, 8.0)


class Run:
    """All three solves for one coupling on one grid."""

    def __init__(self, g, **kw):
        self.params = ModelParams(g=g, **kw)
        self.grid = build_grid(self.params)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            self.even = solve_even(self.params, self.grid)
            self.plus = solve_plus(self.params, self.grid)
            self.odd = solve_odd(self.params, self.grid, self.plus)
        self.warnings = [str(w.message) for w in caught]


@functools.lru_cache(maxsize=None)
def solved(g, **kw):
    return Run(g, **kw)


@functools.lru_cache(maxsize=None)
def oracle(g):
    return run_oracle(g)


@pytest.fixture(scope="session")
def run():
    return solved


@pytest.fixture(scope="session")
def fd():
    return oracle


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE = {}


def record(n, ok, detail):
    ACCEPTANCE[n] = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(ACCEPTANCE[n])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])

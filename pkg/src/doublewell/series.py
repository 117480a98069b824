"""Exact coefficients of the 1/g expansion of the first energy shift.

The integer pyramid

    alpha_L(m+1) = sum_{l = max(0, L-2)}^{2m-1} (l + 4) alpha_l(m),  L = 0..2m+1

starts from alpha_0(1) = alpha_1(1) = 1 and gives e_m = alpha_0(m) / 2^(4m-2).
Everything is kept as Python ints and Fractions; by m = 100 the entries
have hundreds of digits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

#: perturbative energy coefficients E_1..E_3
KNOWN_E = {1: Fraction(-1, 4), 2: Fraction(-9, 64), 3: Fraction(-89, 512)}


@dataclass(frozen=True)
class SeriesTable:
    """alpha[m-1][l] = alpha_l(m) and e[m-1] = e_m for m = 1..m_max."""

    alpha: tuple
    e: tuple

    @property
    def m_max(self) -> int:
        return len(self.alpha)

    def row(self, m: int) -> tuple:
        """alpha_0(m), ..., alpha_{2m-1}(m)."""
        self._check(m)
        return self.alpha[m - 1]

    def coefficient(self, m: int) -> Fraction:
        self._check(m)
        return self.e[m - 1]

    def _check(self, m):
        if not 1 <= m <= self.m_max:
            raise ValueError(f"order {m} outside 1..{self.m_max}")


def build_pyramid(m_max: int) -> SeriesTable:
    if int(m_max) != m_max or m_max < 1:
        raise ValueError("m_max must be a positive integer")
    rows = [(1, 1)]
    for m in range(1, m_max):
        prev = rows[-1]
        # suffix[k] = sum_{l >= k} (l + 4) alpha_l(m)
        suffix = [0] * (len(prev) + 1)
        for l in range(len(prev) - 1, -1, -1):
            suffix[l] = suffix[l + 1] + (l + 4) * prev[l]
        rows.append(tuple(suffix[max(0, L - 2)] for L in range(2 * m + 2)))
    e = tuple(Fraction(r[0], 2 ** (4 * m - 2)) for m, r in enumerate(rows, start=1))
    return SeriesTable(tuple(rows), e)


def sigma_prime(table: SeriesTable, m: int, x):
    """sigma'_{m+1}(x) = -(1/2^4m) t^2 sum_l alpha_l(m) t^l with t = 2/(1+x).

    Exact for int/Fraction x, float otherwise.
    """
    row = table.row(m)
    if x < 0:
        raise ValueError("x must be >= 0")
    exact = isinstance(x, (int, Fraction))
    t = Fraction(2) / (1 + Fraction(x)) if exact else 2.0 / (1.0 + x)
    total = sum(a * t**l for l, a in enumerate(row))
    return -t * t * total / 2 ** (4 * m)


def asymptotic_energy(m: int) -> float:
    """Leading large-order form E_m ~ -(6/pi)(3/8)^m m!."""
    return -(6.0 / math.pi) * math.exp(m * math.log(3 / 8) + math.lgamma(m + 1))


def table1_ratios(table: SeriesTable, asymptotic_from: int = 10):
    """(m, |E_m|/e_m, tag) rows: exact for m <= 3, "asymptotic" from m >= 10."""
    out = []
    for m in range(1, table.m_max + 1):
        if m in KNOWN_E:
            out.append((m, abs(KNOWN_E[m]) / table.coefficient(m), "exact"))
        elif m >= asymptotic_from:
            log_e = math.log(6 / math.pi) + m * math.log(3 / 8) + math.lgamma(m + 1)
            ratio = math.exp(log_e - _log_fraction(table.coefficient(m)))
            out.append((m, ratio, "asymptotic"))
    return out


def _log_fraction(q: Fraction) -> float:
    # math.log takes big ints directly; float(q) would overflow past 1e308
    return math.log(q.numerator) - math.log(q.denominator)


@dataclass(frozen=True)
class GrowthDiagnostics:
    ratios: dict
    prefactors: dict


def asymptotic_check(table: SeriesTable) -> GrowthDiagnostics:
    """Ratios e_{m+1} / ((3/8)(m+1) e_m), exact, and prefactors e_m / ((3/8)^m m!)."""
    ratios = {}
    for m in range(1, table.m_max):
        ratios[m] = table.e[m] / (Fraction(3, 8) * (m + 1) * table.e[m - 1])
    prefactors = {m: math.exp(_log_fraction(table.e[m - 1]) - m * math.log(3 / 8)
                              - math.lgamma(m + 1))
                  for m in range(1, table.m_max + 1)}
    return GrowthDiagnostics(ratios, prefactors)


def optimal_truncation(table: SeriesTable, g: float) -> int:
    """Order of the smallest term e_m / g^(m-1); beyond it the series grows."""
    best, best_m = None, 1
    for m in range(1, table.m_max + 1):
        term = _log_fraction(table.e[m - 1]) - (m - 1) * math.log(g)
        if best is None or term < best:
            best, best_m = term, m
    if best_m == table.m_max:
        raise ValueError("table too short to locate the smallest term; raise m_max")
    return best_m


def partial_sum(table: SeriesTable, g: float, order: int) -> float:
    """sum_{m <= order} e_m / g^(m-1)."""
    return float(sum(table.coefficient(m) / Fraction(g) ** (m - 1) for m in range(1, order + 1)))


def to_csv(table: SeriesTable) -> str:
    """Three blocks sharing one header: alpha rows, e rows and ratio rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "m", "a", "b"])
    for m, row in enumerate(table.alpha, start=1):
        for l, a in enumerate(row):
            w.writerow(["alpha", m, l, a])
    for m, e in enumerate(table.e, start=1):
        w.writerow(["e", m, e.numerator, e.denominator])
    for m, ratio, tag in table1_ratios(table):
        w.writerow(["ratio", m, repr(float(ratio)), tag])
    return buf.getvalue()

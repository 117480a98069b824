"""Command-line front end.

Exit status: 0 success, 2 ran outside the large-g regime (results written),
1 failure. Floats are written with repr, i.e. shortest round-trip form.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bounds import analytic_bounds, verify
from .even import ConvergenceError, RegimeWarning, solve_even
from .model import REGIME_G, ModelParams
from .odd import solve_odd, solve_plus
from .oracle import run_oracle
from .quadrature import build_grid
from .series import build_pyramid, table1_ratios, to_csv

EXIT_OK, EXIT_FAIL, EXIT_REGIME = 0, 1, 2
COMPARE_RTOL = 1e-6


class _Outcome:
    def __init__(self, payload, kind, regime=False, failed=False):
        self.payload = payload
        self.kind = kind
        self.regime = regime
        self.failed = failed


def _threads() -> int:
    raw = os.environ.get("DOUBLEWELL_THREADS", "2")
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(f"DOUBLEWELL_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def _params(args) -> ModelParams:
    kw = {"g": args.g}
    for name in ("n_cells", "x_max", "tol_energy", "tol_fn", "max_iter"):
        val = getattr(args, name)
        if val is not None:
            kw[name] = val
    return ModelParams(**kw)


def _f(x):
    return float(x)


def _solution_table(header, columns, arrays):
    rows = [[_f(v) for v in r] for r in zip(*arrays)]
    return {**header, "columns": list(columns), "rows": rows}


def cmd_solve_even(args):
    p = _params(args)
    sol = solve_even(p)
    header = {"g": p.g, "E_ev": _f(sol.E_ev), "energy_shift": _f(sol.energy_shift),
              "iterations": sol.trace.n_iters, "converged": sol.trace.converged}
    table = _solution_table(header, ("x", "phi", "f", "psi"),
                            (sol.grid.nodes, np.exp(sol.trial.log_phi), sol.f.values,
                             sol.psi_ev.values))
    return _Outcome(table, "solution")


def cmd_solve_plus(args):
    p = _params(args)
    sol = solve_plus(p)
    header = {"g": p.g, "E_plus": _f(sol.E_plus), "energy_shift": _f(sol.energy_shift_plus),
              "iterations": sol.trace.n_iters, "converged": sol.trace.converged}
    table = _solution_table(header, ("x", "phi", "f", "psi"),
                            (sol.grid.nodes, np.exp(sol.trial.log_phi_plus), sol.f_plus.values,
                             sol.psi_plus.values))
    return _Outcome(table, "solution")


def cmd_solve_odd(args):
    p = _params(args)
    sol = solve_odd(p)
    header = {"g": p.g, "E_od": _f(sol.E_od), "E_plus": _f(sol.E_plus),
              "energy_shift": _f(sol.delta_od), "gamma": _f(sol.gamma),
              "iterations": sol.trace.n_iters, "converged": sol.trace.converged}
    # chi plays the role of the trial function and k that of f
    table = _solution_table(header, ("x", "phi", "f", "psi"),
                            (sol.grid.nodes, sol.chi.values, sol.k.values, sol.psi_od.values))
    return _Outcome(table, "solution")


def cmd_bounds(args):
    p = _params(args)
    grid = build_grid(p)
    even = solve_even(p, grid)
    plus = solve_plus(p, grid)
    odd = solve_odd(p, grid, plus)
    report = verify(analytic_bounds(p.g), even, plus, odd)
    bad = report.failures()
    regime = bool(bad) and all(e.regime_warning for e in bad)
    for e in bad:
        print(f"bound not satisfied: {e.name} ({e.anchor})", file=sys.stderr)
    return _Outcome(report.to_records(), "records", regime=regime, failed=bool(bad) and not regime)


def cmd_series(args):
    table = build_pyramid(args.m_max)
    if args.output == "csv":
        return _Outcome(to_csv(table), "text")
    payload = {
        "m_max": table.m_max,
        "alpha": [[int(a) for a in row] for row in table.alpha],
        "e": [[e.numerator, e.denominator] for e in table.e],
        "ratios": [{"m": m, "ratio": _f(r), "kind": tag} for m, r, tag in table1_ratios(table)],
    }
    return _Outcome(payload, "json")


def _oracle_payload(res):
    out = {"g": res.g, "h": res.h, "L": res.L}
    for name in ("E_ev", "E_od", "E_plus"):
        out[name] = {"richardson": _f(res.richardson[name]), "h": _f(res.raw[name][0]),
                     "h/2": _f(res.raw[name][1]), "error_estimate": _f(res.error_estimate(name))}
    return out


def cmd_oracle(args):
    if args.g is None:
        raise ValueError("--g is required")
    return _Outcome(_oracle_payload(run_oracle(args.g, args.h, args.L)), "json")


def _iterative(p):
    grid = build_grid(p)
    even = solve_even(p, grid)
    odd = solve_odd(p, grid)
    return {"E_ev": even.E_ev, "E_od": odd.E_od, "E_plus": odd.E_plus}


def cmd_compare(args):
    p = _params(args)
    with ThreadPoolExecutor(max_workers=min(2, _threads())) as pool:
        it = pool.submit(_iterative, p)
        orc = pool.submit(run_oracle, p.g, args.h, args.L)
        iterative, oracle = it.result(), orc.result()
    tol = COMPARE_RTOL * p.g
    payload = {"g": p.g, "tolerance": tol}
    failed = False
    for name in ("E_ev", "E_od", "E_plus"):
        diff = iterative[name] - oracle.richardson[name]
        failed |= not abs(diff) < tol
        payload[name] = {"iterative": _f(iterative[name]), "oracle": _f(oracle.richardson[name]),
                         "difference": _f(diff)}
    return _Outcome(payload, "json", failed=failed)


COMMANDS = {
    "solve-even": cmd_solve_even,
    "solve-odd": cmd_solve_odd,
    "solve-plus": cmd_solve_plus,
    "bounds": cmd_bounds,
    "series": cmd_series,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage, which would read as a regime warning
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="doublewell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, need_g=True, numeric=True):
        sp.add_argument("--g", type=float, required=need_g, help="coupling, > 1")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--output", choices=("json", "csv"), default="json")
        if numeric:
            sp.add_argument("--n-cells", type=int)
            sp.add_argument("--x-max", type=float)
            sp.add_argument("--tol-energy", type=float)
            sp.add_argument("--tol-fn", type=float)
            sp.add_argument("--max-iter", type=int)

    for name in ("solve-even", "solve-odd", "solve-plus", "bounds"):
        common(sub.add_parser(name))
    sp = sub.add_parser("series")
    sp.add_argument("--m-max", type=int, default=10)
    sp.add_argument("--out")
    sp.add_argument("--output", choices=("json", "csv"), default="csv")
    sp = sub.add_parser("oracle")
    common(sp, numeric=False)
    sp.add_argument("--h", type=float)
    sp.add_argument("--L", type=float)
    sp = sub.add_parser("compare")
    common(sp)
    sp.add_argument("--h", type=float)
    sp.add_argument("--L", type=float)
    return parser


def _render(outcome: _Outcome, fmt: str) -> str:
    if outcome.kind == "text":
        return outcome.payload
    if fmt == "json":
        return json.dumps(outcome.payload, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    data = outcome.payload
    if outcome.kind == "solution":
        for key, val in data.items():
            if key not in ("columns", "rows"):
                buf.write(f"# {key}={_cell(val)}\n")
        w.writerow(data["columns"])
        w.writerows([[_cell(v) for v in r] for r in data["rows"]])
    elif outcome.kind == "records":
        keys = list(data[0])
        w.writerow(keys)
        w.writerows([[_cell(r[k]) for k in keys] for r in data])
    else:
        w.writerow(["key", "field", "value"])
        for key, val in data.items():
            if isinstance(val, dict):
                for sub, v in val.items():
                    w.writerow([key, sub, _cell(v)])
            else:
                w.writerow([key, "", _cell(val)])
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegimeWarning)
        try:
            outcome = COMMANDS[args.command](args)
        except ConvergenceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        except ValueError as exc:
            parser.print_usage(sys.stderr)
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    text = _render(outcome, args.output)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if outcome.failed:
        return EXIT_FAIL
    g = getattr(args, "g", None)
    regime = outcome.regime or any(issubclass(w.category, RegimeWarning) for w in caught)
    if regime or (g is not None and g < REGIME_G):
        return EXIT_REGIME
    return EXIT_OK


def main():
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away, e.g. piped into head; silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()

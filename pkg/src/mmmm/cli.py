"""
Command line entry point.

    mmmm transient  --lambda0 0.4 --mu 0.1 --m 1 --t 0.5 --n0 0 --method exact
    mmmm stationary --lambda0 0.4 --mu 0.1 --m 2
    mmmm experiment --table A
    mmmm compare    --lambda0 25 --mu 1 --m 50 --n0 0 --t 1 --n 25 --methods asymptotic,infinite

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .core import NumericalFailure, SystemParams, erlang_b, stationary
from .harness import (
    METHODS,
    ExperimentSpec,
    compare,
    experiment_columns,
    run_experiment,
    transient,
)
from .render import SCHEMA, fmt_fixed, fmt_sci, round_half_up, to_csv, transient_csv, transient_json

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(ValueError):
    pass


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _add_system(p):
    p.add_argument("--lambda0", type=float, required=True, help="arrival rate")
    p.add_argument("--mu", type=float, required=True, help="service rate per server (1/alpha)")
    p.add_argument("--m", type=int, required=True, help="number of servers")


def _add_output(p, default):
    p.add_argument("--output", choices=("json", "csv"), default=default)
    p.add_argument("--precision", type=int, default=6, help="decimal places (default 6)")
    p.add_argument("--out", metavar="FILE", help="write to FILE instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmmm", description="Transient analysis of the M|M|m|m loss system")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transient", help="distribution of N(t) from a fixed start")
    _add_system(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n0", type=int, default=0)
    p.add_argument("--method", choices=METHODS, default="oracle")
    p.add_argument("--tol", type=float, default=1e-8, help="series remainder tolerance")
    p.add_argument("--F", type=int, default=None, help="fixed series truncation order")
    p.add_argument("--case", default=None, help="force one asymptotic regime, e.g. R1B")
    p.add_argument("--clamp", action="store_true", help="zero negative series entries")
    _add_output(p, "json")

    p = sub.add_parser("stationary", help="stationary distribution and Erlang loss probability")
    _add_system(p)
    _add_output(p, "json")

    p = sub.add_parser("experiment", help="reproduce one of the experiment tables A-E")
    p.add_argument("--table", choices=tuple("ABCDE"), required=True)
    p.add_argument("--case", type=int, default=None, help="case number for tables D and E")
    p.add_argument("--lambda0", type=float, default=None, help="override the arrival rate")
    _add_output(p, "csv")

    p = sub.add_parser("compare", help="cross-method comparison on an (n, t) grid")
    _add_system(p)
    p.add_argument("--n0", type=int, default=0)
    p.add_argument("--t", type=_float_list, required=True, help="comma-separated times")
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated states")
    p.add_argument("--methods", type=_str_list, default=["exact", "series", "asymptotic", "infinite"])
    p.add_argument("--tol", type=float, default=1e-8)
    _add_output(p, "csv")
    return parser


def _params(args) -> SystemParams:
    if args.mu <= 0:
        raise UsageError(f"--mu must be positive, got {args.mu}")
    return SystemParams.from_rates(args.lambda0, args.mu, args.m)


def _cmd_transient(args) -> str:
    params = _params(args)
    if args.method == "exact" and params.m > 2:
        raise UsageError(f"--method exact needs m <= 2, got m={params.m}")
    dist = transient(params, args.n0, args.t, args.method, tol=args.tol, F=args.F,
                     case=args.case, clamp=args.clamp)
    if args.output == "json":
        return transient_json(params, dist, args.precision)
    return transient_csv(dist, args.precision)


def _cmd_stationary(args) -> str:
    params = _params(args)
    probs = stationary(params)
    b = erlang_b(params)
    if args.output == "json":
        doc = {
            "schema": SCHEMA,
            "params": {"lambda0": params.lambda0, "mu": params.mu, "m": params.m},
            "probabilities": [float(fmt_fixed(float(p), args.precision)) for p in probs],
            "erlang_b": float(fmt_fixed(b, args.precision)),
        }
        return json.dumps(doc, indent=2) + "\n"
    return to_csv(["n", "probability"], [[n, fmt_fixed(float(p), args.precision)] for n, p in enumerate(probs)])


def _cmd_experiment(args) -> str:
    overrides = {} if args.lambda0 is None else {"lambda0": args.lambda0}
    spec = ExperimentSpec(args.table, overrides, args.case)
    rows = run_experiment(spec)
    cols = experiment_columns(args.table)

    def cell(col, v):
        if col == "error_ub":
            return f"{round_half_up(v, 4):.4f}"
        if col in ("t", "lambda0"):
            return f"{v:g}"
        return fmt_fixed(v, args.precision)

    if args.output == "json":
        out = [{c: (r[c] if c in ("case", "label", "entry", "F", "phi", "theta")
                    else float(cell(c, r[c]))) for c in cols} for r in rows]
        return json.dumps({"schema": SCHEMA, "table": args.table, "rows": out}, indent=2) + "\n"
    return to_csv(cols, [[cell(c, r[c]) for c in cols] for r in rows])


def _cmd_compare(args) -> str:
    params = _params(args)
    if not args.t or not args.n:
        raise UsageError("comparison grid is empty: give at least one --t and one --n")
    rows = compare(params, args.n0, args.t, args.n, args.methods, tol=args.tol)
    methods = [m for m in args.methods if m != "oracle"]
    p = args.precision
    if args.output == "json":
        out = []
        for r in rows:
            d = {"n0": r.n0, "n": r.n, "t": r.t, "regime": r.regime, "oracle": r.oracle}
            for mt in methods:
                a, rel = r.deviations(mt)
                d[mt] = r.values.get(mt)
                d[f"{mt}_abs_dev"] = a
                d[f"{mt}_rel_dev"] = rel
            out.append({k: (float(fmt_sci(v, p)) if isinstance(v, float) else v) for k, v in d.items()})
        return json.dumps({"schema": SCHEMA, "rows": out}, indent=2) + "\n"
    cols = ["n0", "n", "t", "regime", "oracle"]
    for mt in methods:
        cols += [mt, f"{mt}_abs_dev", f"{mt}_rel_dev"]
    lines = []
    for r in rows:
        line = [r.n0, r.n, f"{r.t:g}", r.regime or "", fmt_sci(r.oracle, p)]
        for mt in methods:
            a, rel = r.deviations(mt)
            line += [fmt_sci(r.values.get(mt), p), fmt_sci(a, p), fmt_sci(rel, p)]
        lines.append(line)
    return to_csv(cols, lines)


_COMMANDS = {
    "transient": _cmd_transient,
    "stationary": _cmd_stationary,
    "experiment": _cmd_experiment,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "precision", 6) < 0:
        parser.error("--precision must be >= 0")
    try:
        text = _COMMANDS[args.command](args)
    except NumericalFailure as exc:
        print(f"mmmm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"mmmm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

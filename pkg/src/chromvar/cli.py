"""Command line: ``python -m chromvar <command> [flags]``.

Exit codes: 0 success, 2 bad parameters, 3 size or feasibility error,
4 too many timed-out trials.
"""
from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .analytic import DomainError, SizeError

EXIT_OK, EXIT_PARAM, EXIT_SIZE, EXIT_INVALID = 0, 2, 3, 4


def _prob(v: str) -> float:
    p = float(v)
    if not 0.0 < p < 1.0:
        raise argparse.ArgumentTypeError(f"p={v} must lie in (0, 1)")
    return p


def _positive_int(v: str) -> int:
    i = int(v)
    if i < 1:
        raise argparse.ArgumentTypeError(f"{v} must be a positive integer")
    return i


def _grid_flags(sp):
    sp.add_argument("--n-min", default="1e3", help="smallest n (e.g. 1000 or 1e300)")
    sp.add_argument("--n-max", default="1e12", help="largest n")
    sp.add_argument("--grid", choices=("log", "linear"), default="log")
    sp.add_argument("--points", type=_positive_int, default=100)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chromvar", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analytic", help="closed-form quantities on an n grid")
    _grid_flags(sp)
    sp.add_argument("--p", type=_prob, default=0.5)

    sp = sub.add_parser("simulate", help="exact chi of sampled G(n, p)")
    sp.add_argument("--n", type=_positive_int, nargs="+", required=True)
    sp.add_argument("--p", type=_prob, default=0.5)
    sp.add_argument("--trials", type=_positive_int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget-secs", type=float, default=60.0)
    sp.add_argument("--workers", type=_positive_int, default=1)

    sp = sub.add_parser("oracle", help="exact first moments against full enumeration")
    sp.add_argument("--max-n", type=_positive_int, default=6)

    sp = sub.add_parser("coupling", help="chained planting against fresh samples")
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--a", type=_positive_int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--p", type=_prob, default=0.5)
    sp.add_argument("--trials", type=_positive_int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget-secs", type=float, default=60.0)
    sp.add_argument("--workers", type=_positive_int, default=1)

    sp = sub.add_parser("predict", help="width predictions and bounds on an n grid")
    _grid_flags(sp)
    sp.add_argument("--p", type=_prob, default=0.5)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--c", type=float, default=1.0)

    for name in sub.choices.values():
        name.add_argument("--out", default="out", help="output directory")
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "out")}
    seed = getattr(args, "seed", None)
    try:
        if args.command == "analytic":
            pts = ex.n_grid(args.n_min, args.n_max, args.points, args.grid)
            ex.run("analytic", lambda: ex.analytic_rows(pts, args.p), ex.ANALYTIC_COLUMNS,
                   args.out, argv, seed, params)
        elif args.command == "predict":
            pts = ex.n_grid(args.n_min, args.n_max, args.points, args.grid)
            ex.run("predict", lambda: ex.predict_rows(pts, args.p, args.eps, args.c),
                   ex.PREDICT_COLUMNS, args.out, argv, seed, params)
        elif args.command == "simulate":
            _, rows = ex.run("simulate", lambda: ex.simulate_rows(
                args.n, args.p, args.trials, args.seed, args.budget_secs, args.workers),
                ex.SIMULATE_COLUMNS, args.out, argv, seed, params)
            if not ex.invalid_share_ok(rows):
                ex.eprint("more than 1% of trials timed out")
                return EXIT_INVALID
        elif args.command == "oracle":
            ex.run("oracle", lambda: ex.oracle_rows(args.max_n), ex.ORACLE_COLUMNS,
                   args.out, argv, seed, params)
        elif args.command == "coupling":
            if args.r < 0:
                raise DomainError("--r must be >= 0")
            holder = {}

            def rows():
                out, st = ex.coupling_rows(args.n, args.a, args.r, args.p, args.trials,
                                           args.seed, args.budget_secs, args.workers)
                holder["stats"] = st
                return out

            ex.run("coupling", rows, ex.COUPLING_COLUMNS, args.out, argv, seed, params)
            if not holder["stats"].invalid_ok:
                ex.eprint("more than 1% of trials timed out")
                return EXIT_INVALID
    except SizeError as exc:
        ex.eprint(f"size error: {exc}")
        return EXIT_SIZE
    except DomainError as exc:
        ex.eprint(f"parameter error: {exc}")
        return EXIT_PARAM
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

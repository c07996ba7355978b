"""Command-line entry point: ``mcco {gen,solve,anneal,bench,verify,plot}``.

Exit codes: 0 on success, 1 on usage or input errors, 2 when a verification
suite has a failing check.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .annealer import AnnealConfig
from .bench import METHODS, anneal_row, bench, rows_to_csv, solve
from .core import dumps_problem, load_problem, random_problem
from .plot import plot
from .sketch import KIND_ALIASES
from .verify import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_solve_flags(p: argparse.ArgumentParser, single: bool = True) -> None:
    if single:
        p.add_argument("--sketch", choices=sorted(KIND_ALIASES), default="quad")
    p.add_argument("--sketch-rows", type=int, default=None, help="row count for the random sketch")
    p.add_argument("--sketch-seed", type=int, default=0)
    if single:
        p.add_argument("--samples", type=int, default=250)
    p.add_argument("--threshold-quantile", type=float, default=0.5)
    p.add_argument("--threshold-abs", type=float, default=None)
    p.add_argument("--sparsity", type=int, default=None, help="default: number of rules")
    p.add_argument("--decoder", choices=["omp", "mp"], default="omp")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcco", description="Sample, sketch and decode rule-based cost functions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="draw a random problem")
    g.add_argument("--n-bits", type=int, default=12)
    g.add_argument("--rule-lengths", type=_int_list, default=[4, 5, 6])
    g.add_argument("--count-range", type=_int_list, default=[1, 5], help="min,max rules per length")
    g.add_argument("--reward-range", default="0.5,2.0", help="min,max reward")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")

    s = sub.add_parser("solve", help="run the sampling pipeline once")
    s.add_argument("--problem", required=True)
    s.add_argument("--seed", type=int, default=0)
    _add_solve_flags(s)

    a = sub.add_parser("anneal", help="run the annealing baseline once")
    a.add_argument("--problem", required=True)
    a.add_argument("--budget", type=int, default=250)
    a.add_argument("--restarts", type=int, default=2)
    a.add_argument("--t0", type=float, default=None)
    a.add_argument("--t1", type=float, default=None)
    a.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="sweep methods, sample sizes and trials")
    b.add_argument("--problem", required=True)
    b.add_argument("--methods", default="anneal,quad", help=f"comma-separated subset of {','.join(METHODS)}")
    b.add_argument("--samples", type=_int_list, default=[50, 100, 150, 200, 250, 300])
    b.add_argument("--trials", type=int, default=200)
    b.add_argument("--seed", type=int, default=0, help="master seed")
    b.add_argument("--out", required=True)
    b.add_argument("--restarts", type=int, default=2)
    _add_solve_flags(b, single=False)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.add_argument("--out", default="-")

    pl = sub.add_parser("plot", help="render a benchmark CSV as SVG")
    pl.add_argument("csv")
    pl.add_argument("out_svg")
    return parser


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _pair(text: str, cast) -> tuple:
    parts = [cast(v) for v in str(text).split(",")] if isinstance(text, str) else list(text)
    if len(parts) != 2:
        raise UsageError(f"expected two comma-separated values, got {text!r}")
    return tuple(parts)


def _solve_options(args) -> dict:
    return {
        "threshold_q": args.threshold_quantile,
        "threshold_abs": args.threshold_abs,
        "sparsity": args.sparsity,
        "decoder": args.decoder,
        "sketch_rows": args.sketch_rows,
        "sketch_seed": args.sketch_seed,
    }


def _run(args) -> int:
    if args.command == "gen":
        problem = random_problem(args.n_bits, tuple(args.rule_lengths), _pair(args.count_range, int),
                                 _pair(args.reward_range, float), args.seed)
        _write(dumps_problem(problem), args.out)
        return EXIT_OK

    if args.command == "plot":
        plot(args.csv, args.out_svg)
        return EXIT_OK

    if args.command == "verify":
        checks, text = run_suite(args.suite)
        _write(text, args.out)
        failed = [c for c in checks if not c.passed]
        for c in failed:
            print(f"FAIL {c.name} {c.params}: expected {c.expected}, got {c.actual}", file=sys.stderr)
        return EXIT_VERIFY if failed else EXIT_OK

    problem = load_problem(args.problem)
    if args.command == "solve":
        row = solve(problem, args.sketch, args.samples, seed=args.seed, **_solve_options(args))
        sys.stdout.write(rows_to_csv([row]))
        return EXIT_OK

    if args.command == "anneal":
        config = {"restarts": args.restarts, "t_initial": args.t0, "t_final": args.t1}
        AnnealConfig(budget=args.budget, **config)  # validate before running
        sys.stdout.write(rows_to_csv([anneal_row(problem, args.budget, args.seed, **config)]))
        return EXIT_OK

    if args.command == "bench":
        methods = [m for m in args.methods.split(",") if m]
        bad = [m for m in methods if m not in METHODS]
        if bad:
            raise UsageError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
        options = {"solve": _solve_options(args), "anneal": {"restarts": args.restarts}}
        rows = bench(problem, methods, args.samples, args.trials, args.seed, args.out, options)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
        return EXIT_OK
    raise UsageError(f"unknown command {args.command}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return _run(args)
    except (UsageError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"mcco: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

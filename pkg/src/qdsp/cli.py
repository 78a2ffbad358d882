"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain/model error. Every command
writes one CSV (``-o`` path, or stdout when omitted); files are written to a
temporary sibling and renamed, so a failed run leaves no partial output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

from . import __version__
from .amplitude_estimation import error_bound, run_ae
from .applications import (DELTA_PARAMS, DELTA_STRIKES, CRW_EXAMPLE, DeltaRow, CrwRow, MarketParams, build_crw_model,
                           evaluate_grid, load_crw_params, run_crw_pipeline, run_delta_pipeline)
from .bench import HEADER as BENCH_HEADER, bench, fair_walk
from .errors import QdspError
from .estimator import CSV_HEADER, ae_problem, exact_good_amplitude
from .model import load_model


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return val


def _nonneg_int(text: str) -> int:
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return val


def _positive_float(text: str) -> float:
    val = float(text)
    if not (val > 0 and math.isfinite(val)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return val


def _strikes(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not vals or any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError("strikes must be positive numbers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--method", choices=("exact", "shots", "ae"), default="exact",
                        help="characteristic-function estimator (default: exact)")
    common.add_argument("--shots", type=_positive_int, default=8192, help="shots per Pauli batch (default: 8192)")
    common.add_argument("--ae-m", type=_positive_int, default=6, dest="ae_m",
                        help="amplitude-estimation ancilla count m (default: 6)")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads (default: logical cores); output does not depend on it")
    common.add_argument("-o", "--output", default=None, help="CSV output path (default: stdout)")

    grid = _Parser(add_help=False)
    grid.add_argument("--L", type=_nonneg_int, default=100, help="grid order L (default: 100)")
    grid.add_argument("--P", type=_positive_float, default=100.0, help="period P (default: 100)")

    parser = _Parser(prog="qdsp", description="Characteristic functions of discrete stochastic processes "
                                                "by exact statevector simulation.")
    parser.add_argument("--version", action="version", version=f"qdsp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("charfn", parents=[common, grid], help="phi(2 pi l / P) for l = -L..L")
    p.add_argument("--model", required=True, help="model JSON file")

    p = sub.add_parser("delta", parents=[common, grid], help="Fourier-assembled Delta of a European call")
    p.add_argument("--params", help="market parameter JSON (default: the built-in experiment parameters)")
    p.add_argument("--K", type=_strikes, default=None, help="comma-separated strikes (default: params K or the built-in list)")
    p.add_argument("--n", type=_positive_int, default=4, help="walk steps n (default: 4)")
    p.add_argument("--explicit-negative", action="store_true", help="evaluate l < 0 instead of conjugating")

    p = sub.add_parser("crw", parents=[common, grid], help="characteristic function of a correlated random walk")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--model", help="model JSON file")
    src.add_argument("--params", help="CRW parameter JSON {x0, x_plus, x_minus, p, q}")

    p = sub.add_parser("ae-demo", parents=[common], help="amplitude-estimation outcome distribution")
    p.add_argument("--model", help="model JSON file (default: fair two-step walk)")
    p.add_argument("--v", type=float, default=1.0, help="evaluation point v (default: 1)")
    p.add_argument("--mode", choices=("cos", "sin"), default="cos")
    p.add_argument("--sample", action="store_true", help="sample the outcome instead of taking the argmax")

    p = sub.add_parser("bench", parents=[common], help="error vs budget for Monte Carlo, shots and AE")
    p.add_argument("--model", help="model JSON file (default: fair two-step walk)")
    p.add_argument("--v", type=float, default=1.0, help="evaluation point v (default: 1)")
    p.add_argument("--shot-sweep", type=lambda s: [_positive_int(x) for x in s.split(",")],
                   default=[100, 1000, 10000], help="comma-separated shot budgets")
    p.add_argument("--ae-sweep", type=lambda s: [_positive_int(x) for x in s.split(",")],
                   default=[4, 5, 6, 7, 8], help="comma-separated AE ancilla counts")
    p.add_argument("--reps", type=_positive_int, default=20, help="seeded repetitions per sampling budget")
    p.add_argument("--timing", action="store_true", help="fill the wall_time column (makes output run-dependent)")
    return parser


def _threads(args) -> int:
    return args.threads or os.cpu_count() or 1


def _cmd_charfn(args):
    model = load_model(args.model)
    ls = range(-args.L, args.L + 1)
    ests = evaluate_grid(model, ls, args.P, args.method, shots=args.shots, ae_m=args.ae_m, seed=args.seed,
                         threads=_threads(args))
    return CSV_HEADER, [e.csv_row() for e in ests]


def _cmd_delta(args):
    params = MarketParams.load(args.params) if args.params else DELTA_PARAMS
    strikes = args.K or ([params.K] if params.K is not None else list(DELTA_STRIKES))
    rows = run_delta_pipeline(params, strikes, args.n, args.L, args.P, args.method, args.seed, shots=args.shots,
                              ae_m=args.ae_m, explicit_negative=args.explicit_negative, threads=_threads(args))
    return DeltaRow.HEADER, [r.csv_row() for r in rows]


def _cmd_crw(args):
    if args.model:
        model = load_model(args.model)
    elif args.params:
        model = load_crw_params(args.params)
    else:
        model = build_crw_model(**CRW_EXAMPLE)
    rows = run_crw_pipeline(model, args.L, args.P, args.method, args.seed, shots=args.shots, ae_m=args.ae_m,
                            threads=_threads(args))
    return CrwRow.HEADER, [r.csv_row() for r in rows]


def _cmd_ae_demo(args):
    model = load_model(args.model) if args.model else fair_walk(2)
    problem = ae_problem(model, args.v, args.ae_m, args.mode)
    res = run_ae(problem, args.seed, deterministic=not args.sample)
    a = exact_good_amplitude(model, args.v, args.mode)
    print(f"a = {a!r}  a_hat = {res.a_hat!r}  y = {res.y}  bound = {error_bound(a, args.ae_m)!r}", file=sys.stderr)
    M = problem.M
    rows = [[str(y), repr(float(p)), repr(math.sin(math.pi * y / M) ** 2)] for y, p in enumerate(res.distribution)]
    return ("y", "probability", "a_hat"), rows


def _cmd_bench(args):
    model = load_model(args.model) if args.model else fair_walk(2)
    rows = bench(model, args.v, args.seed, shots=args.shot_sweep, ae_ms=args.ae_sweep, reps=args.reps,
                 timing=args.timing)
    return BENCH_HEADER, [r.csv_row() for r in rows]


COMMANDS = {"charfn": _cmd_charfn, "delta": _cmd_delta, "crw": _cmd_crw, "ae-demo": _cmd_ae_demo,
            "bench": _cmd_bench}


def _write(header, rows, output: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if output is None:
        sys.stdout.write(buf.getvalue())
        return
    directory = os.path.dirname(os.path.abspath(output))
    fd, tmp = tempfile.mkstemp(prefix=".qdsp-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    try:
        header, rows = COMMANDS[args.command](args)
        _write(header, rows, args.output)
    except (QdspError, OSError, json.JSONDecodeError) as exc:
        print(f"qdsp {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

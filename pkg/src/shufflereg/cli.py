"""Command-line front end.

Subcommands: ``solve`` (estimate a permutation and signal from matrix files),
``simulate`` (run a Monte-Carlo sweep from a config file into a CSV),
``demo-failure`` (single-observation stagnation trace), and ``diagnose``
(feasibility diagnostics for a signal file).

Exit codes: 0 success, 1 runtime or data error, 2 usage or validation error.
Diagnostics go to stderr; files and stdout stay machine-readable.
"""

from __future__ import annotations

import argparse
import math
import sys

from .estimators import RankDeficiencyError, one_step_estimate
from .experiments import (
    ConfigError,
    format_csv,
    load_config,
    reproduce_failure_demo,
    run_sweep,
    with_overrides,
)
from .matrixio import read_matrix, write_matrix, write_permutation
from .metrics import (
    classify_regime,
    logdet_ratio,
    minimax_logdet_threshold,
    snr,
    stable_rank,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_solve(args) -> int:
    try:
        x = read_matrix(args.x)
        y = read_matrix(args.y)
    except FileNotFoundError as exc:
        return _fail(f"cannot read input file: {exc.filename}", EXIT_RUNTIME)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_RUNTIME)
    try:
        result = one_step_estimate(x, y)
    except (RankDeficiencyError, ValueError) as exc:
        return _fail(str(exc), EXIT_RUNTIME)
    try:
        write_permutation(result.perm_hat, args.out_perm)
        write_matrix(result.b_hat, args.out_b)
    except OSError as exc:
        return _fail(str(exc), EXIT_RUNTIME)
    print(
        f"solved: n={x.shape[0]} p={x.shape[1]} m={y.shape[1]} "
        f"objective={result.objective:.12g}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        config = load_config(args.config)
        overrides = {}
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if overrides:
            config = with_overrides(config, **overrides)
    except FileNotFoundError as exc:
        return _fail(f"cannot read config file: {exc.filename}", EXIT_RUNTIME)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_USAGE)
    result = run_sweep(config)
    try:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(format_csv(result))
    except OSError as exc:
        return _fail(f"cannot write sweep CSV to {args.out}: {exc}", EXIT_RUNTIME)
    for row in result.rows:
        note = f" failures={row.failures}" if row.failures else ""
        print(
            f"snr={row.snr!r} sigma={row.sigma:.6g} recovery_rate={row.recovery_rate:.4g} "
            f"mean_hamming={row.mean_hamming:.6g} trials={row.trials}{note}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_demo_failure(args) -> int:
    if args.n < 100:
        return _fail(f"demo needs n >= 100, got {args.n}", EXIT_USAGE)
    if args.iters < 0:
        return _fail(f"iters must be >= 0, got {args.iters}", EXIT_USAGE)
    trace = reproduce_failure_demo(args.n, args.iters, args.seed)
    try:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write("iteration,hamming,residual\n")
            for record in trace:
                fh.write(f"{record.iteration},{record.hamming},{record.residual:.12g}\n")
    except OSError as exc:
        return _fail(f"cannot write trace to {args.out}: {exc}", EXIT_RUNTIME)
    print(
        f"demo-failure: n={args.n} iterations={len(trace) - 1} "
        f"first_hamming={trace[0].hamming} last_hamming={trace[-1].hamming}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_diagnose(args) -> int:
    if args.sigma < 0:
        return _fail(f"sigma must be >= 0, got {args.sigma}", EXIT_USAGE)
    if args.n < 3:
        return _fail(f"n must be >= 3, got {args.n}", EXIT_USAGE)
    try:
        b = read_matrix(args.b)
    except FileNotFoundError as exc:
        return _fail(f"cannot read signal file: {exc.filename}", EXIT_RUNTIME)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_RUNTIME)
    m = args.m if args.m is not None else b.shape[1]
    if m < 1:
        return _fail(f"m must be >= 1, got {m}", EXIT_USAGE)
    try:
        srank = stable_rank(b)
    except ValueError as exc:
        return _fail(str(exc), EXIT_RUNTIME)
    print(f"stable_rank = {srank:.12g}")
    print(f"regime = {classify_regime(srank, args.n)}")
    threshold = minimax_logdet_threshold(args.n)
    print(f"minimax_threshold = {threshold:.12g}")
    ratio = snr(b, m, args.sigma)
    if args.sigma == 0:
        print("snr = noiseless")
        print("logdet = noiseless")
        return EXIT_OK
    print(f"snr = {float(ratio):.12g}")
    logdet = logdet_ratio(b, args.sigma, args.n) * math.log(args.n)
    print(f"logdet = {logdet:.12g}")
    print(f"logdet_over_log_n = {logdet / math.log(args.n):.12g}")
    if logdet < threshold:
        print("below minimax threshold: recovery information-theoretically unreliable")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shufflereg",
        description="Estimators and Monte-Carlo experiments for regression with shuffled labels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="recover a permutation and signal from matrix files")
    solve.add_argument("--x", required=True, help="design matrix file (n x p)")
    solve.add_argument("--y", required=True, help="observation matrix file (n x m)")
    solve.add_argument("--out-perm", required=True, help="output permutation file, one index per line")
    solve.add_argument("--out-b", required=True, help="output signal matrix file")
    solve.set_defaults(func=cmd_solve)

    simulate = sub.add_parser("simulate", help="run a Monte-Carlo sweep from a config file")
    simulate.add_argument("--config", required=True, help="flat key = value config file")
    simulate.add_argument("--out", required=True, help="output CSV path")
    simulate.add_argument("--workers", type=int, default=None, help="override worker count")
    simulate.add_argument("--seed", type=int, default=None, help="override the master seed")
    simulate.set_defaults(func=cmd_simulate)

    demo = sub.add_parser("demo-failure", help="two-column single-observation stagnation trace")
    demo.add_argument("--n", type=int, default=1000, help="sample count (>= 100)")
    demo.add_argument("--iters", type=int, default=100, help="alternating iterations")
    demo.add_argument("--seed", type=int, default=0, help="instance seed")
    demo.add_argument("--out", required=True, help="output trace CSV path")
    demo.set_defaults(func=cmd_demo_failure)

    diagnose = sub.add_parser("diagnose", help="feasibility diagnostics for a signal file")
    diagnose.add_argument("--b", required=True, help="signal matrix file (p x m)")
    diagnose.add_argument("--sigma", type=float, required=True, help="noise level (>= 0)")
    diagnose.add_argument("--n", type=int, required=True, help="sample count")
    diagnose.add_argument("--m", type=int, default=None, help="measurement count (default: columns of B)")
    diagnose.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

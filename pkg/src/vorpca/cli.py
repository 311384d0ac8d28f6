"""Command-line front end: instance generation, solving, diagnostics.

JSON goes to stdout, human diagnostics to stderr.  Exit codes: 0 success,
2 usage/validation, 3 enumeration budget exceeded, 4 degenerate-input
diagnostics.  Every subcommand is deterministic given an explicit --seed;
when --seed is omitted one is drawn and echoed.
"""

from __future__ import annotations

import argparse
import secrets
import sys

import numpy as np

from . import jsonfmt
from .core import Subspace, center_rows
from .data import (
    basis_columns,
    generate_planted_instance,
    load_basis,
    read_csv,
    save_instance,
)
from .grassmann import (
    SeededRng,
    ball_measure_lower_bound,
    grassmannian_volume,
    mc_ball_measure,
    required_samples,
)
from .randomized import DegenerateGap, alpha_gap, randomized_solve
from .voronoi import (
    DEFAULT_SUBSET_BUDGET,
    BudgetExceededError,
    brute_force_solve,
    voronoi_solve_2d,
    voronoi_solve_sampled,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_DEGENERATE = 4

METHODS = ("brute", "voronoi2d", "voronoi-sampled", "randomized")


def _emit(doc: dict) -> None:
    sys.stdout.write(jsonfmt.dumps(doc) + "\n")


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    drawn = secrets.randbits(63)
    print(f"no --seed given; drew seed {drawn}", file=sys.stderr)
    return drawn


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vorpca",
        description="PCA with outliers: exact Voronoi-based and randomized solvers.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("gen", help="generate a planted instance (CSV + JSON sidecar)")
    gen.add_argument("--n", type=int, required=True, help="number of points")
    gen.add_argument("--d", type=int, required=True, help="ambient dimension")
    gen.add_argument("--r", type=int, required=True, help="planted subspace rank")
    gen.add_argument("--k", type=int, required=True, help="number of outliers")
    gen.add_argument("--sigma", type=float, default=0.0, help="inlier noise scale")
    gen.add_argument("--gamma", type=float, required=True, help="gap factor (> 1)")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.add_argument("--header", action="store_true", help="write a header row")

    solve = sub.add_parser("solve", help="solve an instance read from CSV")
    solve.add_argument("--input", required=True, help="input CSV path")
    solve.add_argument("--method", choices=METHODS, required=True)
    solve.add_argument("--r", type=int, required=True)
    solve.add_argument("--k", type=int, required=True)
    solve.add_argument("--T", type=int, default=None, help="sample count for sampled methods")
    solve.add_argument("--seed", type=int, default=None)
    solve.add_argument("--budget", type=int, default=DEFAULT_SUBSET_BUDGET)
    solve.add_argument("--center", action="store_true", help="subtract column means first")
    solve.add_argument("--header", action="store_true", help="input has a header row")

    diag = sub.add_parser("diag", help="Grassmannian and gap diagnostics")
    dsub = diag.add_subparsers(dest="diag_kind", required=True)

    vol = dsub.add_parser("volume", help="closed-form volume of Gr(r, d)")
    vol.add_argument("--r", type=int, required=True)
    vol.add_argument("--d", type=int, required=True)

    ball = dsub.add_parser("ball", help="ball-measure lower bound")
    ball.add_argument("--alpha", type=float, required=True)
    ball.add_argument("--r", type=int, required=True)
    ball.add_argument("--d", type=int, required=True)

    samples = dsub.add_parser("samples", help="sample count for a target success level")
    samples.add_argument("--alpha", type=float, required=True)
    samples.add_argument("--eps", type=float, required=True)
    samples.add_argument("--r", type=int, required=True)
    samples.add_argument("--d", type=int, required=True)

    mcball = dsub.add_parser("mc-ball", help="Monte-Carlo ball measure estimate")
    mcball.add_argument("--alpha", type=float, required=True)
    mcball.add_argument("--r", type=int, required=True)
    mcball.add_argument("--d", type=int, required=True)
    mcball.add_argument("--samples", type=int, default=10000)
    mcball.add_argument("--seed", type=int, default=None)

    gap = dsub.add_parser("gap", help="alpha-gap of a dataset under a given basis")
    gap.add_argument("--input", required=True, help="dataset CSV path")
    gap.add_argument("--basis", required=True, help="JSON file with a column-major basis")
    gap.add_argument("--k", type=int, required=True)
    gap.add_argument("--header", action="store_true")

    return parser


def _cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    instance = generate_planted_instance(
        args.n, args.d, args.r, args.k, args.sigma, args.gamma, SeededRng(seed)
    )
    sidecar = save_instance(args.out, instance, header=args.header)
    _emit(
        {
            "csv": args.out,
            "sidecar": sidecar,
            "n": args.n,
            "d": args.d,
            "r": args.r,
            "k": args.k,
            "true_outliers": list(instance.true_outliers),
            "seed": seed,
        }
    )
    return EXIT_OK


def _cmd_solve(args) -> int:
    x = read_csv(args.input, header=args.header)
    if args.center:
        x = center_rows(x)
    n, d = x.shape
    method = args.method
    seed = None
    samples_used = None
    if method == "brute":
        result = brute_force_solve(x, args.r, args.k, budget=args.budget)
    elif method == "voronoi2d":
        if d != 2 or args.r != 1:
            raise ValueError(f"voronoi2d requires d=2 and r=1, got d={d}, r={args.r}")
        result = voronoi_solve_2d(x, args.k)
    else:
        if args.T is None or args.T < 1:
            raise ValueError(f"method {method} needs --T >= 1")
        seed = _resolve_seed(args.seed)
        rng = SeededRng(seed)
        solver = voronoi_solve_sampled if method == "voronoi-sampled" else randomized_solve
        result = solver(x, args.r, args.k, args.T, rng)
        samples_used = args.T
    _emit(
        {
            "method": method,
            "loss": result.loss,
            "outliers": list(result.outliers),
            "basis": basis_columns(result.subspace),
            "seed": seed,
            "samples_used": samples_used,
        }
    )
    return EXIT_OK


def _cmd_diag(args) -> int:
    kind = args.diag_kind
    if kind == "volume":
        _emit({"diag": "volume", "r": args.r, "d": args.d, "volume": grassmannian_volume(args.r, args.d)})
    elif kind == "ball":
        _emit(
            {
                "diag": "ball",
                "alpha": args.alpha,
                "r": args.r,
                "d": args.d,
                "lower_bound": ball_measure_lower_bound(args.alpha, args.r, args.d),
            }
        )
    elif kind == "samples":
        _emit(
            {
                "diag": "samples",
                "alpha": args.alpha,
                "eps": args.eps,
                "r": args.r,
                "d": args.d,
                "T": required_samples(args.alpha, args.eps, args.r, args.d),
            }
        )
    elif kind == "mc-ball":
        seed = _resolve_seed(args.seed)
        # The Haar measure is rotation invariant, so any center gives the
        # same ball measure; use the leading coordinate subspace.
        anchor = Subspace(np.eye(args.d)[:, : args.r])
        est = mc_ball_measure(anchor, args.alpha, args.samples, SeededRng(seed))
        _emit(
            {
                "diag": "mc-ball",
                "alpha": args.alpha,
                "r": args.r,
                "d": args.d,
                "samples": args.samples,
                "estimate": est.estimate,
                "stderr": est.stderr,
                "lower_bound": ball_measure_lower_bound(args.alpha, args.r, args.d),
                "seed": seed,
            }
        )
    else:  # gap
        x = read_csv(args.input, header=args.header)
        subspace = load_basis(args.basis)
        report = alpha_gap(x, subspace, args.k)
        _emit({"diag": "gap", "k": args.k, "d1": report.d1, "d2": report.d2, "alpha": report.alpha})
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.subcommand == "gen":
            return _cmd_gen(args)
        if args.subcommand == "solve":
            return _cmd_solve(args)
        return _cmd_diag(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DegenerateGap as exc:
        _emit({"error": "degenerate_gap", "message": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, IndexError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

"""Command line interface: ``fbr gen | solve | bench | verify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bench import ALGORITHMS, records_to_csv, run_benchmark, solve, summarize
from .graph import comm_graph
from .instances import GenerationError, gen_instance, load_instance, save_instance
from .relocate import MoveSolution
from .render import render_svg
from .verify import verify_solution

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def solution_to_dict(algorithm: str, sol: MoveSolution) -> dict:
    return {
        "algorithm": algorithm,
        "positions": np.asarray(sol.new_positions).tolist(),
        "minmax": sol.minmax,
        "augmentation": [] if sol.augmentation is None else [list(p) for p in sol.augmentation.pairs()],
        "repair_passes": sol.repair_passes,
    }


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        inst = gen_instance(args.n, args.h, args.seed, args.side)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    save_instance(inst, args.out)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        inst = load_instance(args.inp)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        sol = solve(args.algo, inst)
    except ValueError as exc:
        print(f"error: {args.algo} cannot run on this input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:
        print(f"error: {args.algo} failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    constraints = None
    if sol.augmentation is not None:
        constraints = comm_graph(inst.config).union(sol.augmentation.pairs()).edges
    report = verify_solution(inst.config, sol, constraints)
    if args.out:
        Path(args.out).write_text(json.dumps(solution_to_dict(args.algo, sol), indent=2) + "\n")
    if args.svg:
        Path(args.svg).write_text(render_svg(inst, sol))
    print(json.dumps({"algorithm": args.algo, "minmax": report.minmax, "biconnected": report.biconnected}))
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        records = run_benchmark(args.algos, args.n_list, args.trials, args.seed0, args.h, args.side)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    text = records_to_csv(records)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for (algo, n), stats in summarize(records).items():
        print(
            f"{algo:>7} n={n:<4} mean_minmax={stats['mean_minmax']:.4f} "
            f"median_runtime={stats['median_runtime_s']:.4f}s success={stats['success_rate']:.2%}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        inst = load_instance(args.inp)
        data = json.loads(Path(args.solution).read_text())
        positions = np.asarray(data["positions"], dtype=float)
        constraints = None
        if data.get("augmentation"):
            constraints = comm_graph(inst.config).union(data["augmentation"]).edges
        report = verify_solution(inst.config, positions, constraints)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(
        json.dumps(
            {
                "biconnected": report.biconnected,
                "minmax": report.minmax,
                "violated_pairs": [list(p) for p in report.violated_pairs],
            }
        )
    )
    return EXIT_OK if report.ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbr", description="Fast biconnectivity restoration for robot networks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a barely connected instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", type=float, default=None, help="sampling square side (default 0.5*h*sqrt(n+1))")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run one algorithm on an instance file")
    p.add_argument("--algo", choices=sorted(ALGORITHMS), required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="benchmark algorithms on seeded instances, write CSV")
    p.add_argument("--algos", type=_str_list, default=["ea-scr", "ea-opt", "bt", "cr"])
    p.add_argument("--n-list", type=_int_list, default=[8, 16, 32, 64, 128, 256])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed0", type=int, default=0)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--side", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="check a solution file against an instance")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

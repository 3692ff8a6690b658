"""Command-line interface.

Subcommands: solve (ILS or exact), check (validate a solution file),
convert (any supported format to canonical), cuts (separate violated
inequalities on a dumped fractional point), bench (directory sweep
reporting min/avg/max over seeded runs). Costs are displayed with two
decimals; files and comparisons keep full precision.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

from . import cuts as cuts_mod
from .exact import exact_solve
from .formulation import load_point
from .ils import IlsParams, ils_solve
from .instances import (
    ParseError,
    load_instance,
    read_solution,
    write_canonical,
    write_solution,
)
from .model import (
    Instance,
    InvalidSolutionError,
    check_feasibility,
    evaluate_weighted_latency,
    make_ktrp,
)


class CliError(Exception):
    """User-facing error: printed to stderr, exit code 1."""


def _env_seed() -> int:
    try:
        return int(os.environ.get("WKTRP_SEED", "0"))
    except ValueError:
        return 0


def _apply_variant(instance: Instance, variant: str, d: Optional[float]) -> Instance:
    if variant == "wktrp":
        return instance
    if variant == "ktrp":
        return make_ktrp(instance)
    if variant == "ktrpdc":
        if d is None:
            raise CliError("--variant ktrpdc needs --d <duration limit>")
        return make_ktrp(instance, duration_limit=d)
    if variant == "wrrp":
        if instance.rig_count < 1:
            raise CliError(
                "--variant wrrp needs a multi-start instance (rig file or "
                "canonical file with DELTA)"
            )
        return instance
    raise CliError(f"unknown variant {variant!r}")


def _load(path: str, k: Optional[int]) -> Instance:
    try:
        return load_instance(path, k=k)
    except FileNotFoundError as exc:
        raise CliError(str(exc)) from exc
    except (ParseError, ValueError) as exc:
        raise CliError(f"{path}: {exc}") from exc


def _run_ils(instance: Instance, seed: int, iters: int, time_limit: Optional[float]):
    return ils_solve(
        instance,
        IlsParams(seed=seed, max_iterations=iters, time_limit=time_limit),
    )


def cmd_solve(args) -> int:
    instance = _apply_variant(_load(args.instance, args.k), args.variant, args.d)
    if args.algo == "exact":
        result = exact_solve(instance, node_limit=args.node_limit)
        if result.solution is None:
            raise CliError("no feasible solution exists")
        status = "proven optimum" if result.proved else "best found (node limit hit)"
        print(f"{instance.name}: cost {result.cost:.2f} ({status}, {result.nodes} nodes)")
        for route in result.solution.routes:
            print(" ".join(str(v) for v in route))
        if args.out:
            write_solution(result.solution, args.out, cost=result.cost)
        return 0

    best = None
    rows = []
    for run in range(args.runs):
        seed = args.seed + run
        res = _run_ils(instance, seed, args.iters, args.time_limit)
        rows.append((run, seed, res))
        if best is None or res.cost < best.cost:
            best = res
    if args.report == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(["run", "seed", "cost", "iterations", "best_iteration", "time_s"])
        for run, seed, res in rows:
            writer.writerow(
                [run, seed, f"{res.cost:.2f}", res.iterations, res.best_iteration,
                 f"{res.wall_time:.3f}"]
            )
    else:
        for run, seed, res in rows:
            print(
                f"run {run} (seed {seed}): cost {res.cost:.2f} "
                f"after {res.iterations} iterations ({res.backend})"
            )
        print(f"best: {best.cost:.2f}")
    if args.out:
        write_solution(best.solution, args.out, cost=best.cost)
    return 0


def cmd_check(args) -> int:
    instance = _load(args.instance, args.k)
    try:
        solution = read_solution(args.solution)
    except (ParseError, OSError) as exc:
        raise CliError(str(exc)) from exc
    report = check_feasibility(instance, solution)
    if report.structural_errors:
        for err in report.structural_errors:
            print(f"invalid: {err}", file=sys.stderr)
        return 1
    cost = evaluate_weighted_latency(instance, solution)
    print(f"cost {cost:.2f}")
    ok = True
    for idx, dur in report.duration_violations:
        print(f"route {idx} exceeds duration limit: {dur:.2f}", file=sys.stderr)
        ok = False
    for v, comp in report.deadline_violations:
        print(f"client {v} misses deadline: completes at {comp:.2f}", file=sys.stderr)
        ok = False
    if math.isinf(cost):
        print("solution crosses a forbidden arc", file=sys.stderr)
        ok = False
    if ok:
        print("feasible")
    return 0 if ok else 1


def cmd_convert(args) -> int:
    instance = _load(args.instance, args.k)
    write_canonical(instance, args.out)
    print(f"wrote {args.out} (n={instance.n}, k={instance.k})")
    return 0


def cmd_cuts(args) -> int:
    try:
        point = load_point(args.point)
    except (ParseError, ValueError, OSError) as exc:
        raise CliError(str(exc)) from exc
    kinds = args.types.split(",") if args.types else ["pigeonhole", "f", "z"]
    found = []
    if any(k.startswith("pigeon") for k in kinds):
        found.extend(cuts_mod.separate_pigeonhole(point, eps=args.eps))
    if any(k in ("f", "f_activation", "f-activation") for k in kinds):
        found.extend(cuts_mod.separate_f_activation(point, eps=args.eps))
    if any(k in ("z", "z_activation", "z-activation") for k in kinds):
        found.extend(cuts_mod.separate_z_activation(point, eps=args.eps))
    for cut in found:
        violation = cuts_mod.cut_violation(cut, point)
        if cut.kind == cuts_mod.PIGEONHOLE:
            detail = "vertices=" + ",".join(map(str, cut.vertices)) + f" rhs={cut.rhs}"
        else:
            detail = "triple=" + ",".join(map(str, cut.triple))
        print(f"{cut.kind} {detail} violation={violation:.6f}")
    print(f"{len(found)} cuts", file=sys.stderr)
    return 0


def _bench_job(job):
    path, k, variant, d, runs, iters, time_limit, base_seed = job
    try:
        instance = _apply_variant(_load(path, k), variant, d)
    except CliError as exc:
        # Report the failure to the parent instead of killing the pool; a
        # sweep directory may contain files that need per-file options.
        return None, (path, str(exc))
    costs = []
    times = []
    for run in range(runs):
        t0 = time.perf_counter()
        res = _run_ils(instance, base_seed + run, iters, time_limit)
        times.append(time.perf_counter() - t0)
        costs.append(res.cost)
    return (instance.name, instance.n, instance.k, costs, times), None


def cmd_bench(args) -> int:
    root = Path(args.directory)
    if root.is_file():
        paths = [root]
    else:
        if not root.is_dir():
            raise CliError(f"{args.directory}: not a file or directory")
        paths = sorted(
            p for p in root.iterdir()
            if p.is_file() and p.suffix.lower() in (".vrp", ".txt", ".rig", ".wktrp")
        )
    if not paths:
        raise CliError(f"{args.directory}: no instance files found")
    jobs = [
        (str(p), args.k, args.variant, args.d, args.runs, args.iters,
         args.time_limit, args.seed)
        for p in paths
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_job, jobs))
    else:
        results = [_bench_job(job) for job in jobs]
    rows = []
    for row, failure in results:
        if failure is not None:
            path, message = failure
            # Loader messages already lead with the path; don't repeat it.
            if message.startswith(f"{path}: "):
                message = message[len(path) + 2:]
            print(f"skipping {path}: {message}", file=sys.stderr)
        else:
            rows.append(row)
    if not rows:
        raise CliError(f"{args.directory}: no instance files could be loaded")
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        header = ["instance", "n", "k", "runs", "min_cost", "avg_cost", "max_cost"]
        if not args.no_times:
            header += ["min_time_s", "avg_time_s", "max_time_s"]
        writer.writerow(header)
        for name, n, k, costs, times in rows:
            row = [
                name, n, k, len(costs),
                f"{min(costs):.2f}",
                f"{sum(costs) / len(costs):.2f}",
                f"{max(costs):.2f}",
            ]
            if not args.no_times:
                row += [
                    f"{min(times):.3f}",
                    f"{sum(times) / len(times):.3f}",
                    f"{max(times):.3f}",
                ]
            writer.writerow(row)
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wktrp",
        description="Weighted k-traveling repairman solver toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance_opts(p):
        p.add_argument("instance", help="instance file (canonical, CVRP or rig)")
        p.add_argument("--k", type=int, default=None, help="route count override")

    p_solve = sub.add_parser("solve", help="solve an instance")
    add_instance_opts(p_solve)
    p_solve.add_argument("--algo", choices=["ils", "exact"], default="ils")
    p_solve.add_argument("--seed", type=int, default=_env_seed(),
                         help="base seed (default: WKTRP_SEED or 0)")
    p_solve.add_argument("--runs", type=int, default=1)
    p_solve.add_argument("--iters", type=int, default=10000)
    p_solve.add_argument("--time-limit", type=float, default=None)
    p_solve.add_argument("--node-limit", type=int, default=None,
                         help="search node budget for --algo exact")
    p_solve.add_argument("--variant",
                         choices=["ktrp", "ktrpdc", "wktrp", "wrrp"],
                         default="wktrp")
    p_solve.add_argument("--d", type=float, default=None,
                         help="route duration limit for --variant ktrpdc")
    p_solve.add_argument("--report", choices=["csv", "text"], default="text")
    p_solve.add_argument("--out", default=None, help="write best solution here")
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", help="validate a solution file")
    add_instance_opts(p_check)
    p_check.add_argument("solution", help="solution file (one route per line)")
    p_check.set_defaults(func=cmd_check)

    p_conv = sub.add_parser("convert", help="convert to the canonical format")
    add_instance_opts(p_conv)
    p_conv.add_argument("out", help="output path")
    p_conv.set_defaults(func=cmd_convert)

    p_cuts = sub.add_parser("cuts", help="separate cuts on a fractional point")
    p_cuts.add_argument("point", help="fractional point dump")
    p_cuts.add_argument("--eps", type=float, default=1e-6)
    p_cuts.add_argument("--types", default=None,
                        help="comma list: pigeonhole,f,z (default all)")
    p_cuts.set_defaults(func=cmd_cuts)

    p_bench = sub.add_parser("bench", help="benchmark a directory of instances")
    p_bench.add_argument("directory",
                         help="directory of instance files (or one file)")
    p_bench.add_argument("--k", type=int, default=None)
    p_bench.add_argument("--variant",
                         choices=["ktrp", "ktrpdc", "wktrp", "wrrp"],
                         default="wktrp")
    p_bench.add_argument("--d", type=float, default=None)
    p_bench.add_argument("--runs", type=int, default=10)
    p_bench.add_argument("--iters", type=int, default=10000)
    p_bench.add_argument("--time-limit", type=float, default=None)
    p_bench.add_argument("--seed", type=int, default=_env_seed())
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--no-times", action="store_true",
                         help="omit timing columns (bit-reproducible output)")
    p_bench.add_argument("--out", default=None, help="CSV output path")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvalidSolutionError as exc:
        print(f"invalid solution: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

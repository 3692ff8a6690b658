"""Compare the compiled kernel against the pure-Python fallback.

Runs the same seeded searches through both engines, asserts the traces are
identical (same costs, same iteration-by-iteration decisions, same final
RNG state), then reports per-iteration timings.

Usage: python3 benchmarks/compare_backends.py [--iters N] [--sizes 15,30,60]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wktrp import Instance
from wktrp.ils import IlsParams, ils_solve
from wktrp import _pykernel
from wktrp import ils as ils_mod

try:
    from wktrp import _speedups
except ImportError:
    _speedups = None


def random_instance(n: int, k: int, seed: int) -> Instance:
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 100.0, size=(n + 1, 2))
    c = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
    w = rng.uniform(0.5, 2.0, size=n + 1)
    w[0] = 0.0
    r = rng.uniform(0.0, 5.0, size=n + 1)
    r[0] = 0.0
    return Instance(c, w, r, k, name=f"rand-{n}-{k}")


def run_with(module, instance: Instance, params: IlsParams):
    saved = ils_mod._kernel
    ils_mod._kernel = module
    try:
        t0 = time.perf_counter()
        result = ils_solve(instance, params)
        elapsed = time.perf_counter() - t0
    finally:
        ils_mod._kernel = saved
    return result, elapsed


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--iters", type=int, default=3000)
    ap.add_argument("--sizes", default="15,30,60")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _speedups is None:
        print("compiled kernel not available; nothing to compare")
        return 0

    sizes = [int(s) for s in args.sizes.split(",")]
    params = IlsParams(seed=args.seed, max_iterations=args.iters)
    print(f"{'n':>5} {'k':>3} {'pure ms/it':>11} {'compiled ms/it':>15} {'speedup':>8}")
    for n in sizes:
        k = max(1, n // 10)
        instance = random_instance(n, k, seed=args.seed + n)
        fast, t_fast = run_with(_speedups, instance, params)
        slow, t_slow = run_with(_pykernel, instance, params)
        assert fast.cost == slow.cost, (fast.cost, slow.cost)
        assert fast.trace == slow.trace, "iteration traces diverged"
        assert [r for r in fast.solution.routes] == [r for r in slow.solution.routes]
        ms_fast = 1e3 * t_fast / args.iters
        ms_slow = 1e3 * t_slow / args.iters
        print(f"{n:>5} {k:>3} {ms_slow:>11.4f} {ms_fast:>15.4f} {ms_slow / ms_fast:>7.1f}x")
    print("traces identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Iterated local search for weighted-latency routing.

The outer loop lives here; the inner moves (relocate, tail exchange,
random removal/reinsertion) run in a search engine. Two interchangeable
engines exist: a Cython extension (``wktrp._speedups``) and a pure-Python
twin (``wktrp._pykernel``). Both consume one PCG32 stream and order their
floating-point operations identically, so results do not depend on which
backend happens to be importable. Set ``WKTRP_PURE_PYTHON=1`` to force
the fallback.

Forbidden (+inf) arcs are mapped to a large finite surrogate before the
search starts; ``total_cost`` then charges a fixed penalty per client
whose completion time proves a forbidden arc was used, which keeps such
solutions strictly worse than any clean one. The reported final cost is
re-evaluated on the true matrix.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .model import Instance, Solution, evaluate_weighted_latency
from .rng import Pcg32

if os.environ.get("WKTRP_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernel as _kernel

    BACKEND = "python"
else:
    try:
        from . import _speedups as _kernel  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build environment
        from . import _pykernel as _kernel

        BACKEND = "python"


@dataclass
class IlsParams:
    seed: int = 0
    max_iterations: int = 10000
    time_limit: Optional[float] = None
    acceptance_factor: float = 0.95
    two_opt_probability: float = 0.5


@dataclass
class IlsResult:
    solution: Solution
    cost: float
    iterations: int
    best_iteration: int
    wall_time: float
    trace: List[Tuple[int, float, float]] = field(repr=False, default_factory=list)
    backend: str = BACKEND


def _working_arrays(instance: Instance):
    """Finite surrogate matrix plus the penalty scheme that keeps any
    solution using a forbidden arc strictly worse than any clean one."""
    c = np.array(instance.travel, dtype=np.float64)
    np.fill_diagonal(c, 0.0)
    n = instance.n
    finite = c[np.isfinite(c)]
    maxc = float(finite.max()) if finite.size else 0.0
    maxr = float(instance.service.max())
    big = (n + 2) * (maxc + maxr + 1.0) * 10.0
    closing = np.where(np.isfinite(c[:, 0]), c[:, 0], 0.0)
    closing[0] = 0.0
    c[~np.isfinite(c)] = big
    penalty = (float(instance.weights.sum()) + 1.0) * big
    if instance.deadlines is None:
        deadlines = np.full(n + 1, np.inf)
    else:
        deadlines = np.array(instance.deadlines, dtype=np.float64)
    return (
        np.ascontiguousarray(c),
        np.ascontiguousarray(closing),
        np.ascontiguousarray(deadlines),
        big,
        penalty,
    )


def make_engine(instance: Instance, seed: int):
    """Fresh search engine for ``instance`` seeded with ``seed``."""
    c, closing, deadlines, big, penalty = _working_arrays(instance)
    gen = Pcg32(seed)
    return _kernel.Engine(
        c,
        np.ascontiguousarray(instance.weights, dtype=np.float64),
        np.ascontiguousarray(instance.service, dtype=np.float64),
        instance.k,
        gen.state,
        gen.inc,
        closing,
        instance.duration_limit,
        deadlines,
        big,
        penalty,
    )


def _descent(engine, two_opt_probability: float) -> None:
    """Alternate the two moves until neither improves.

    After a successful relocate pass the tail-exchange move is tried only
    with the given probability, and its failure ends the descent even
    though relocation was still improving; this trades descent depth for
    iteration throughput.
    """
    while True:
        improved = engine.relocate()
        if (not improved) or (engine.uniform() < two_opt_probability):
            improved = engine.two_opt_star()
        if not improved:
            break


def _signature(routes) -> tuple:
    """Route multiset as a hashable value (route order is irrelevant)."""
    return tuple(sorted(tuple(r) for r in routes))


def ils_solve(instance: Instance, params: Optional[IlsParams] = None) -> IlsResult:
    """Run iterated local search and return the best solution found.

    Starts from a random round-robin assignment, then repeatedly perturbs
    (random removal of p clients and greedy reinsertion) and re-descends.
    A candidate replaces the incumbent only when strictly better; the
    current solution is reset to the incumbent when it is more than
    roughly 5% worse. When an iteration reproduces the pre-perturbation
    routes, the perturbation strength p grows by one (bounded by n - 2);
    p never shrinks.
    """
    if params is None:
        params = IlsParams()
    t0 = time.perf_counter()
    n, k = instance.n, instance.k
    engine = make_engine(instance, params.seed)
    engine.build_initial()
    _descent(engine, params.two_opt_probability)
    best_cost = engine.total_cost()
    best_routes = engine.get_routes()
    best_iteration = 0
    trace: List[Tuple[int, float, float]] = [(0, best_cost, best_cost)]
    p = n // k
    iteration = 0
    while iteration < params.max_iterations:
        if (
            params.time_limit is not None
            and time.perf_counter() - t0 >= params.time_limit
        ):
            break
        iteration += 1
        last_sig = _signature(engine.get_routes())
        engine.perturb(p)
        _descent(engine, params.two_opt_probability)
        cost = engine.total_cost()
        if cost < best_cost:
            best_cost = cost
            best_routes = engine.get_routes()
            best_iteration = iteration
        if cost * params.acceptance_factor > best_cost:
            engine.set_routes(best_routes)
            cost = best_cost
        if _signature(engine.get_routes()) == last_sig and p < n - 2:
            p += 1
        trace.append((iteration, cost, best_cost))
    solution = Solution(best_routes)
    true_cost = evaluate_weighted_latency(instance, solution)
    return IlsResult(
        solution=solution,
        cost=true_cost,
        iterations=iteration,
        best_iteration=best_iteration,
        wall_time=time.perf_counter() - t0,
        trace=trace,
        backend=BACKEND,
    )


# Alias: some callers prefer a verb that names the whole procedure.
ils_run = ils_solve

"""Ground-truth solvers for small instances.

``exact_solve`` is a depth-first branch-and-bound. Routes are built
sequentially: a node either appends a client to the route currently
under construction or closes it and opens the next one. Route
relabeling symmetry is broken completely by requiring the opening
clients of successive routes to have increasing ids — every set of K
routes has exactly one such ordering, so each solution is enumerated
once and none is missed.

``brute_force_solve`` enumerates every partition of the clients into
exactly K non-empty blocks and every visiting order inside each block;
it is the reference the branch-and-bound is tested against.

Both enforce route-duration limits and client deadlines as hard
feasibility and treat any solution crossing a forbidden (+inf) arc as
infeasible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .model import INF, Instance, Solution

COST_EPS = 1e-9


@dataclass
class ExactResult:
    solution: Optional[Solution]
    cost: float
    proved: bool
    nodes: int


def min_incoming_arc(instance: Instance) -> np.ndarray:
    """Per client, the cheapest arc into it from any other vertex."""
    c = instance.travel
    n = instance.n
    out = np.zeros(n + 1)
    for j in range(1, n + 1):
        best = INF
        for i in range(0, n + 1):
            if i != j and c[i, j] < best:
                best = c[i, j]
        out[j] = best
    return out


def partial_lower_bound(weights, service, minarc, unassigned, cost_so_far, t_min):
    """Admissible completion bound: every unassigned client still needs at
    least one arc into it, its own service, and cannot finish before the
    earliest time any route can still receive it."""
    lb = cost_so_far
    wsum = 0.0
    for j in unassigned:
        wsum += weights[j]
        lb += weights[j] * (minarc[j] + service[j])
    return lb + t_min * wsum


class _Budget(Exception):
    pass


def exact_solve(instance: Instance, node_limit: Optional[int] = None) -> ExactResult:
    """Proven optimum by branch-and-bound, or the best solution found
    before ``node_limit`` search nodes with ``proved=False``."""
    n, k = instance.n, instance.k
    if n < k:
        raise ValueError("need at least one client per route")
    C = [list(map(float, row)) for row in np.asarray(instance.travel)]
    W = list(map(float, instance.weights))
    R = list(map(float, instance.service))
    DL = (
        None
        if instance.deadlines is None
        else list(map(float, instance.deadlines))
    )
    D = instance.duration_limit
    has_d = math.isfinite(D)
    minarc = [float(v) for v in min_incoming_arc(instance)]

    routes: List[List[int]] = [[] for _ in range(k)]
    assigned = [False] * (n + 1)
    best_cost = INF
    best_routes: Optional[List[List[int]]] = None
    nodes = 0

    def close_ok(q: int, t_cur: float) -> bool:
        """Full duration check (with the return arc when finite) for the
        route being closed."""
        if not has_d:
            return True
        back = C[routes[q][-1]][0]
        dur = t_cur + back if math.isfinite(back) else t_cur
        return dur <= D + COST_EPS

    def leaf_cost() -> float:
        # re-accumulate route by route so the reported cost matches the
        # evaluator bit for bit
        total = 0.0
        for route in routes:
            t = 0.0
            prev = 0
            for v in route:
                t = t + C[prev][v] + R[v]
                total += W[v] * t
                prev = v
        return total

    def rec(q: int, t_cur: float, cost: float, n_left: int) -> None:
        nonlocal nodes, best_cost, best_routes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise _Budget
        if n_left == 0:
            if close_ok(q, t_cur):
                total = leaf_cost()
                if total < best_cost:
                    best_cost = total
                    best_routes = [list(rt) for rt in routes]
            return
        can_extend = q >= 0 and n_left > k - 1 - q
        can_open = q + 1 < k and (q < 0 or close_ok(q, t_cur))
        opener_min = routes[q][0] if q >= 0 else 0
        last = routes[q][-1] if q >= 0 and routes[q] else 0
        cands: List[Tuple[float, int, int, float]] = []
        for x in range(1, n + 1):
            if assigned[x]:
                continue
            if can_extend:
                arc = C[last][x]
                if arc < INF:
                    comp = t_cur + arc + R[x]
                    if (DL is None or comp <= DL[x] + COST_EPS) and (
                        not has_d or comp <= D + COST_EPS
                    ):
                        cands.append((W[x] * comp, x, 0, comp))
            if can_open and x > opener_min:
                arc = C[0][x]
                if arc < INF:
                    comp = arc + R[x]
                    if (DL is None or comp <= DL[x] + COST_EPS) and (
                        not has_d or comp <= D + COST_EPS
                    ):
                        cands.append((W[x] * comp, x, 1, comp))
        cands.sort()
        for delta, x, kind, comp in cands:
            new_q = q + kind
            new_cost = cost + delta
            t_min = comp if new_q == k - 1 else 0.0
            lb = new_cost
            wsum = 0.0
            for y in range(1, n + 1):
                if not assigned[y] and y != x:
                    wsum += W[y]
                    lb += W[y] * (minarc[y] + R[y])
            lb += t_min * wsum
            if lb >= best_cost - COST_EPS:
                continue
            assigned[x] = True
            routes[new_q].append(x)
            rec(new_q, comp, new_cost, n_left - 1)
            routes[new_q].pop()
            assigned[x] = False

    proved = True
    try:
        rec(-1, 0.0, 0.0, n)
    except _Budget:
        proved = False
    if best_routes is None:
        return ExactResult(None, INF, proved, nodes)
    return ExactResult(Solution(best_routes), best_cost, proved, nodes)


def _partitions_into(n: int, k: int):
    """Partitions of clients 1..n into exactly k non-empty blocks; blocks
    are sorted internally and ordered by their smallest element."""
    blocks: List[List[int]] = []

    def rec(x: int):
        if x > n:
            if len(blocks) == k:
                yield [list(b) for b in blocks]
            return
        if n - x >= k - len(blocks):
            for b in blocks:
                b.append(x)
                yield from rec(x + 1)
                b.pop()
        if len(blocks) < k and n - x >= k - len(blocks) - 1:
            blocks.append([x])
            yield from rec(x + 1)
            blocks.pop()

    yield from rec(1)


def _best_block_order(C, W, R, DL, D, has_d, block) -> Tuple[float, Optional[tuple]]:
    """Cheapest feasible visiting order of one block (exhaustive); ties go
    to the lexicographically smallest order."""
    best_cost = INF
    best_order: Optional[tuple] = None
    for perm in itertools.permutations(block):
        t = 0.0
        prev = 0
        acc = 0.0
        ok = True
        for v in perm:
            t = t + C[prev][v] + R[v]
            if t == INF or (DL is not None and t > DL[v] + COST_EPS):
                ok = False
                break
            acc += W[v] * t
            prev = v
        if not ok:
            continue
        if has_d:
            back = C[prev][0]
            dur = t + back if math.isfinite(back) else t
            if dur > D + COST_EPS:
                continue
        if acc < best_cost:
            best_cost = acc
            best_order = perm
    return best_cost, best_order


def brute_force_solve(instance: Instance) -> Optional[Solution]:
    """Reference optimum by full enumeration (n <= 9). Returns None when
    no feasible solution exists. Among equal-cost optima, returns the one
    whose sorted route tuple is lexicographically smallest."""
    n, k = instance.n, instance.k
    if n > 9:
        raise ValueError("brute force is limited to n <= 9")
    C = [list(map(float, row)) for row in np.asarray(instance.travel)]
    W = list(map(float, instance.weights))
    R = list(map(float, instance.service))
    DL = (
        None
        if instance.deadlines is None
        else list(map(float, instance.deadlines))
    )
    D = instance.duration_limit
    has_d = math.isfinite(D)
    cache: Dict[tuple, Tuple[float, Optional[tuple]]] = {}

    best_total = INF
    best_routes: Optional[List[List[int]]] = None
    best_key: Optional[tuple] = None
    for partition in _partitions_into(n, k):
        total = 0.0
        routes = []
        feasible = True
        for block in partition:
            key = tuple(block)
            if key not in cache:
                cache[key] = _best_block_order(C, W, R, DL, D, has_d, block)
            block_cost, order = cache[key]
            if order is None:
                feasible = False
                break
            total += block_cost
            routes.append(list(order))
        if not feasible:
            continue
        skey = tuple(sorted(tuple(rt) for rt in routes))
        if total < best_total - COST_EPS or (
            abs(total - best_total) <= COST_EPS
            and (best_key is None or skey < best_key)
        ):
            best_total = total
            best_routes = routes
            best_key = skey
    if best_routes is None:
        return None
    return Solution(best_routes)

"""Shared helpers: seeded random instances and solutions, plus small
independent oracles used by both the unit tests and the acceptance gate.

All generators take an explicit ``numpy.random.Generator`` so every test
controls its own seed and reruns are deterministic.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from wktrp import Instance, Solution, tau

INSTANCE_DIR = Path(__file__).resolve().parent.parent / "instances"


def random_instance(
    rng: np.random.Generator,
    n: int,
    k: int,
    *,
    integer: bool = False,
    with_service: bool = True,
    with_weights: bool = True,
    inf_frac: float = 0.0,
    duration_limit: float = np.inf,
    with_deadlines: bool = False,
    asymmetric: bool = False,
    name: str = "random",
) -> Instance:
    """A dense instance on n clients. ``integer=True`` keeps all data on an
    integer grid so kernel arithmetic is exact and cross-checks can use ==.
    ``inf_frac`` poisons that fraction of off-diagonal arcs with +inf
    (symmetric pairs, never touching depot arcs so feasibility survives)."""
    m = n + 1
    if integer:
        c = rng.integers(1, 30, size=(m, m)).astype(float)
    else:
        pts = rng.uniform(0.0, 100.0, size=(m, 2))
        c = np.hypot(pts[:, None, 0] - pts[None, :, 0],
                     pts[:, None, 1] - pts[None, :, 1])
    if asymmetric:
        c = c + rng.integers(0, 5, size=(m, m)).astype(float)
    elif integer:
        c = np.minimum(c, c.T)
    np.fill_diagonal(c, 0.0)
    if inf_frac > 0.0:
        for i in range(1, m):
            for j in range(i + 1, m):
                if rng.random() < inf_frac:
                    c[i, j] = np.inf
                    c[j, i] = np.inf
    if with_weights:
        w = (rng.integers(1, 9, size=m) if integer
             else rng.uniform(0.5, 2.0, size=m)).astype(float)
    else:
        w = np.ones(m)
    w[0] = 0.0
    if with_service:
        r = (rng.integers(0, 6, size=m) if integer
             else rng.uniform(0.0, 5.0, size=m)).astype(float)
    else:
        r = np.zeros(m)
    r[0] = 0.0
    deadlines = None
    if with_deadlines:
        deadlines = np.full(m, np.inf)
        # loose enough that a feasible assignment usually exists
        scale = float(np.max(c[np.isfinite(c)])) * (n / max(k, 1) + 1.0)
        chosen = rng.choice(np.arange(1, m), size=max(1, n // 3), replace=False)
        deadlines[chosen] = rng.uniform(scale * 0.5, scale, size=len(chosen))
    return Instance(
        c, w, r, k,
        name=name,
        duration_limit=duration_limit,
        deadlines=deadlines,
    )


def random_partition_solution(rng: np.random.Generator, n: int, k: int) -> Solution:
    """Random permutation of 1..n chopped into k non-empty routes."""
    perm = list(rng.permutation(np.arange(1, n + 1)))
    if k == 1:
        return Solution([[int(v) for v in perm]])
    cutpoints = sorted(rng.choice(np.arange(1, n), size=k - 1, replace=False))
    routes = []
    prev = 0
    for cut in list(cutpoints) + [n]:
        routes.append([int(v) for v in perm[prev:cut]])
        prev = cut
    return Solution(routes)


def omega_brute(gamma: int, k: int) -> int:
    """Independent pair-count oracle: minimum of sum tau(part) over all
    compositions of gamma into at most k positive parts."""
    if gamma == 0:
        return 0
    best = None
    for parts in range(1, min(k, gamma) + 1):
        for comp in itertools.combinations(range(1, gamma), parts - 1):
            sizes = []
            prev = 0
            for cut in list(comp) + [gamma]:
                sizes.append(cut - prev)
                prev = cut
            val = sum(tau(x) for x in sizes)
            if best is None or val < best:
                best = val
    return best


def mutable_coordinates(n: int):
    """Every variable slot of an n-client arc formulation that may carry a
    value (used to build single-bit mutants)."""
    from wktrp.formulation import _valid_f_index

    coords = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                coords.append(("z", i, j, 0))
            if i < j:
                coords.append(("s", i, j, 0))
    for k in range(0, n + 1):
        for i in range(0, n + 1):
            for j in range(0, n + 1):
                if _valid_f_index(n, k, i, j):
                    coords.append(("f", k, i, j))
    return coords


def flip_coordinate(point, coord) -> None:
    kind, a, b, c = coord
    if kind == "z":
        point.z[a, b] = 1.0 - point.z[a, b]
    elif kind == "s":
        point.set_s(a, b, 1.0 - point.s[a, b])
    else:
        point.f[a, b, c] = 1.0 - point.f[a, b, c]

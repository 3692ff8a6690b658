"""Valid inequalities over the arc-flow variables and their separation.

Three families:

  * pigeonhole cuts: any group of more than K clients forces a minimum
    number of same-route pairs, so sum of s over the group's pairs is at
    least :func:`min_same_route_pairs` (group size, K);
  * f-activation: f[k,i,j] <= f[j,i,j] (a path may only use selected arcs);
  * z-activation: f[k,i,j] + f[j,k,i] + f[j,i,k] <= z[i,j].

``separate_pigeonhole`` is the greedy growth heuristic: from every client
seed it repeatedly adds the vertex that keeps the group's s-mass minimal
and emits a cut whenever the mass trails the pair bound by more than the
already-claimed slack plus eps. Positive ``cut_violation`` means violated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .formulation import FractionalPoint

EPS_SEPARATION = 1e-6

PIGEONHOLE = "pigeonhole"
F_ACTIVATION = "f_activation"
Z_ACTIVATION = "z_activation"


def clique_edges(x: int) -> int:
    """Number of client pairs in a single route visiting x clients."""
    if x < 0:
        raise ValueError("negative group size")
    return (x * x - x) // 2


def min_same_route_pairs(group_size: int, k: int) -> int:
    """Minimum number of same-route pairs when ``group_size`` clients are
    spread over at most ``k`` routes (balanced split is optimal)."""
    if k < 1:
        raise ValueError("k must be positive")
    if group_size < 0:
        raise ValueError("negative group size")
    big = -(-group_size // k)  # ceil
    small = group_size // k
    rem = group_size % k
    return rem * clique_edges(big) + (k - rem) * clique_edges(small)


# Conventional short names for the same quantities.
tau = clique_edges
omega = min_same_route_pairs


@dataclass(frozen=True)
class Cut:
    kind: str
    vertices: Tuple[int, ...] = ()
    rhs: int = 0
    triple: Optional[Tuple[int, int, int]] = None  # (i, j, k)

    def __post_init__(self):
        if self.kind == PIGEONHOLE:
            if not self.vertices or list(self.vertices) != sorted(set(self.vertices)):
                raise ValueError("pigeonhole cut needs sorted distinct vertices")
            if min(self.vertices) < 1:
                raise ValueError("pigeonhole cut vertices must be clients")
        elif self.kind in (F_ACTIVATION, Z_ACTIVATION):
            if self.triple is None:
                raise ValueError(f"{self.kind} cut needs an (i, j, k) triple")
            i, j, k = self.triple
            if len({i, j, k}) != 3:
                raise ValueError("activation triple must be distinct")
        else:
            raise ValueError(f"unknown cut kind {self.kind!r}")


def cut_violation(cut: Cut, point: FractionalPoint) -> float:
    """Amount by which ``point`` violates ``cut`` (positive means violated)."""
    if cut.kind == PIGEONHOLE:
        acc = 0.0
        verts = cut.vertices
        for a in range(len(verts)):
            for b in range(a + 1, len(verts)):
                acc += point.s[verts[a], verts[b]]
        return cut.rhs - acc
    i, j, k = cut.triple
    if cut.kind == F_ACTIVATION:
        return point.f[k, i, j] - point.f[j, i, j]
    return point.f[k, i, j] + point.f[j, k, i] + point.f[j, i, k] - point.z[i, j]


def separate_pigeonhole(
    point: FractionalPoint, eps: float = EPS_SEPARATION
) -> List[Cut]:
    """Greedy growth separation, one pass per client seed.

    Ties in the growth argmin go to the smallest client index. After a cut
    is emitted the claimed slack (bound minus current mass) must be beaten
    again before a larger group is emitted, which suppresses supersets that
    add no fresh violation.
    """
    n, k = point.n, point.k
    s = point.s
    cuts: List[Cut] = []
    for seed in range(1, n + 1):
        in_group = [False] * (n + 1)
        in_group[seed] = True
        group = [seed]
        # deg[v]: s-mass between v and the current group
        deg = [0.0] * (n + 1)
        for v in range(1, n + 1):
            if v != seed:
                deg[v] = s[seed, v]
        zeta = 0.0
        delta = 0.0
        while len(group) < n:
            jstar = -1
            best = 0.0
            for v in range(1, n + 1):
                if not in_group[v] and (jstar < 0 or deg[v] < best):
                    jstar = v
                    best = deg[v]
            zeta += deg[jstar]
            in_group[jstar] = True
            group.append(jstar)
            bound = min_same_route_pairs(len(group), k)
            if zeta + delta + eps < bound:
                cuts.append(
                    Cut(PIGEONHOLE, vertices=tuple(sorted(group)), rhs=bound)
                )
                delta = bound - zeta
            for v in range(1, n + 1):
                if not in_group[v]:
                    deg[v] += s[jstar, v]
    return cuts


def separate_f_activation(
    point: FractionalPoint, eps: float = EPS_SEPARATION
) -> List[Cut]:
    """Exhaustive scan of f[k,i,j] <= f[j,i,j] over all index triples."""
    n = point.n
    f = point.f
    cuts: List[Cut] = []
    for i in range(0, n + 1):
        for j in range(1, n + 1):
            if j == i:
                continue
            for k in range(1, n + 1):
                if k == i or k == j:
                    continue
                if f[k, i, j] > f[j, i, j] + eps:
                    cuts.append(Cut(F_ACTIVATION, triple=(i, j, k)))
    return cuts


def separate_z_activation(
    point: FractionalPoint, eps: float = EPS_SEPARATION
) -> List[Cut]:
    """Exhaustive scan of f[k,i,j] + f[j,k,i] + f[j,i,k] <= z[i,j]."""
    n = point.n
    f = point.f
    z = point.z
    cuts: List[Cut] = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if j == i:
                continue
            for k in range(1, n + 1):
                if k == i or k == j:
                    continue
                if f[k, i, j] + f[j, k, i] + f[j, i, k] > z[i, j] + eps:
                    cuts.append(Cut(Z_ACTIVATION, triple=(i, j, k)))
    return cuts

"""Arc-flow formulation of the problem: variables, constraint checks, objective.

Variables (all binary in an assignment, fractional in a point):

  s[i,j]  (1 <= i < j <= n)      clients i and j share a route
  z[i,j]  (i != j, both >= 1)    i precedes j on their common route
  f[k,i,j] (k,j >= 1, i != j,    arc (i,j) lies on the depot -> k path
            i != k)
  f[0,j,0] (j >= 1)              arc (j,0) closes j's route

Constraint identifiers are stable strings used in violation reports:

  eq2[i,j]  z[i,j] + z[j,i] == s[i,j]                (pairing; kills 2-cycles)
  eq3[j,k]  z[j,k] == sum_i f[k,i,j]                 (j on k's path: one arc in)
  eq4[j,k]  z[j,k] == sum_i f[k,j,i]                 (j on k's path: one arc out)
  eq5[j]    sum_i f[j,0,i] == 1                      (depot precedes everyone)
  eq6       sum_j f[j,0,j] == K                      (K departures)
  eq6.1     sum_j f[0,j,0] == K                      (K returns)
  eq7[j]    sum_i f[j,i,j] == 1                      (one incoming arc)
  eq8[i]    sum_j f[j,i,j] == 1  (j=0 term: f[0,i,0]) (one outgoing arc)
  eq12[i,j] sum_{k not in {i,j}} f[k,i,j] <= (n-K) f[j,i,j]
  eq13[...] binary domain membership
"""

from __future__ import annotations

from typing import IO, List, Optional, Union

import numpy as np

from .model import Instance, InvalidSolutionError, Solution

_TOL = 1e-9


class FractionalPoint:
    """Dense container for (possibly fractional) variable values.

    ``s`` is kept symmetric internally; the canonical entries are i < j.
    """

    def __init__(self, n: int, k: int):
        self.n = int(n)
        self.k = int(k)
        m = self.n + 1
        self.z = np.zeros((m, m))
        self.s = np.zeros((m, m))
        self.f = np.zeros((m, m, m))  # f[k, i, j]

    def set_s(self, i: int, j: int, value: float) -> None:
        self.s[i, j] = value
        self.s[j, i] = value

    def copy(self) -> "FractionalPoint":
        out = FractionalPoint(self.n, self.k)
        out.z = self.z.copy()
        out.s = self.s.copy()
        out.f = self.f.copy()
        return out


class VariableAssignment(FractionalPoint):
    """A 0/1-valued point, as induced by an integer solution."""


def _valid_f_index(n: int, k: int, i: int, j: int) -> bool:
    if k == 0:
        return j == 0 and 1 <= i <= n
    return 1 <= k <= n and 1 <= j <= n and 0 <= i <= n and i != j and i != k


def assignment_from_solution(
    instance: Instance, solution: Solution
) -> VariableAssignment:
    """Encode a structurally valid solution as a variable assignment."""
    from .model import validate_solution

    validate_solution(instance, solution)
    a = VariableAssignment(instance.n, instance.k)
    for route in solution.routes:
        for pos, j in enumerate(route):
            for i in route[pos + 1 :]:
                a.z[j, i] = 1.0
                a.set_s(j, i, 1.0)
        # path arcs: every client k on the route owns the prefix ending at k
        for pos, k in enumerate(route):
            prev = 0
            for v in route[: pos + 1]:
                a.f[k, prev, v] = 1.0
                prev = v
        a.f[0, route[-1], 0] = 1.0
    return a


def verify_constraints(point, _point: Optional[FractionalPoint] = None) -> List[str]:
    """Evaluate every constraint instance; return identifiers of violated ones.

    Works for binary assignments and fractional points alike (equalities and
    the activation inequality are checked with a 1e-9 tolerance; eq13 checks
    binary membership and is meaningful for assignments).

    The constraints only involve n and K, which the point carries, so the
    instance is not needed; ``verify_constraints(instance, point)`` is
    accepted anyway for symmetry with the other assignment helpers.
    """
    if _point is not None:
        point = _point
    n, K = point.n, point.k
    z, s, f = point.z, point.s, point.f
    bad: List[str] = []

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if abs(z[i, j] + z[j, i] - s[i, j]) > _TOL:
                bad.append(f"eq2[{i},{j}]")

    for j in range(1, n + 1):
        for k in range(1, n + 1):
            if j == k:
                continue
            acc = 0.0
            for i in range(0, n + 1):
                if i != j and i != k:
                    acc += f[k, i, j]
            if abs(z[j, k] - acc) > _TOL:
                bad.append(f"eq3[{j},{k}]")

    for j in range(1, n + 1):
        for k in range(1, n + 1):
            if j == k:
                continue
            acc = 0.0
            for i in range(1, n + 1):
                if i != j:
                    acc += f[k, j, i]
            if abs(z[j, k] - acc) > _TOL:
                bad.append(f"eq4[{j},{k}]")

    for j in range(1, n + 1):
        acc = 0.0
        for i in range(1, n + 1):
            acc += f[j, 0, i]
        if abs(acc - 1.0) > _TOL:
            bad.append(f"eq5[{j}]")

    if abs(sum(f[j, 0, j] for j in range(1, n + 1)) - K) > _TOL:
        bad.append("eq6")
    if abs(sum(f[0, j, 0] for j in range(1, n + 1)) - K) > _TOL:
        bad.append("eq6.1")

    for j in range(1, n + 1):
        acc = 0.0
        for i in range(0, n + 1):
            if i != j:
                acc += f[j, i, j]
        if abs(acc - 1.0) > _TOL:
            bad.append(f"eq7[{j}]")

    for i in range(1, n + 1):
        acc = f[0, i, 0]
        for j in range(1, n + 1):
            if j != i:
                acc += f[j, i, j]
        if abs(acc - 1.0) > _TOL:
            bad.append(f"eq8[{i}]")

    for i in range(0, n + 1):
        for j in range(1, n + 1):
            if j == i:
                continue
            acc = 0.0
            for k in range(1, n + 1):
                if k != i and k != j:
                    acc += f[k, i, j]
            if acc > (n - K) * f[j, i, j] + _TOL:
                bad.append(f"eq12[{i},{j}]")

    bad.extend(_check_domains(point))
    return bad


def _check_domains(point: FractionalPoint) -> List[str]:
    n = point.n
    z, s, f = point.z, point.s, point.f
    bad: List[str] = []

    def binary(x: float) -> bool:
        return abs(x) <= _TOL or abs(x - 1.0) <= _TOL

    for i in range(0, n + 1):
        for j in range(0, n + 1):
            valid = 1 <= i <= n and 1 <= j <= n and i != j
            if valid:
                if not binary(z[i, j]):
                    bad.append(f"eq13[z,{i},{j}]")
            elif z[i, j] != 0.0:
                bad.append(f"eq13[z,{i},{j}]")
            valid_s = 1 <= i < j <= n
            if valid_s:
                if not binary(s[i, j]):
                    bad.append(f"eq13[s,{i},{j}]")
            elif i > j:
                if abs(s[i, j] - s[j, i]) > _TOL:
                    bad.append(f"eq13[s,{i},{j}]")
            elif s[i, j] != 0.0:
                bad.append(f"eq13[s,{i},{j}]")

    for k in range(0, n + 1):
        for i in range(0, n + 1):
            for j in range(0, n + 1):
                if _valid_f_index(n, k, i, j):
                    if not binary(f[k, i, j]):
                        bad.append(f"eq13[f,{k},{i},{j}]")
                elif f[k, i, j] != 0.0:
                    bad.append(f"eq13[f,{k},{i},{j}]")
    return bad


def objective_from_assignment(instance: Instance, point: FractionalPoint) -> float:
    """Objective exactly as modeled:
    sum over arcs (i,j), j a client, of (c_ij + r_j) * sum_k w_k f[k,i,j]."""
    n = instance.n
    c = instance.travel
    r = instance.service
    w = instance.weights
    f = point.f
    total = 0.0
    for i in range(0, n + 1):
        for j in range(1, n + 1):
            if j == i:
                continue
            acc = 0.0
            for k in range(1, n + 1):
                if k != i:
                    acc += w[k] * f[k, i, j]
            if acc != 0.0:
                total += (c[i, j] + r[j]) * acc
    return total


def solution_from_assignment(point: FractionalPoint) -> Solution:
    """Decode a binary assignment back into routes by following selected arcs.

    Raises InvalidSolutionError when the arc structure does not describe
    exactly K depot-rooted paths covering every client once.
    """
    n = point.n
    f = point.f

    def selected(i: int, j: int) -> bool:
        return abs(f[j, i, j] - 1.0) <= _TOL

    starts = [j for j in range(1, n + 1) if selected(0, j)]
    routes: List[List[int]] = []
    visited = set()
    for start in starts:
        route = [start]
        visited.add(start)
        cur = start
        while abs(f[0, cur, 0] - 1.0) > _TOL:
            nxts = [j for j in range(1, n + 1) if j != cur and selected(cur, j)]
            if len(nxts) != 1:
                raise InvalidSolutionError(
                    f"client {cur} has {len(nxts)} selected outgoing arcs"
                )
            cur = nxts[0]
            if cur in visited:
                raise InvalidSolutionError(f"client {cur} reached twice")
            visited.add(cur)
            route.append(cur)
        routes.append(route)
    if len(visited) != n:
        raise InvalidSolutionError("selected arcs do not cover every client")
    if len(routes) != point.k:
        raise InvalidSolutionError(
            f"decoded {len(routes)} routes, expected {point.k}"
        )
    return Solution(routes)


# ---------------------------------------------------------------------------
# Point files: one line per nonzero variable.
#   header:  N <n>, K <k>
#   lines:   s <i> <j> <value> | z <i> <j> <value> | f <i> <j> <k> <value>
# where an f line gives arc (i, j) on the path to k; the closing arcs use
# j = 0, k = 0.
# ---------------------------------------------------------------------------


def dump_point(point: FractionalPoint, fp: Union[str, IO[str]]) -> None:
    if isinstance(fp, str):
        with open(fp, "w") as fh:
            dump_point(point, fh)
        return
    n = point.n
    fp.write(f"N {n}\nK {point.k}\n")
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if point.s[i, j] != 0.0:
                fp.write(f"s {i} {j} {float(point.s[i, j])!r}\n")
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and point.z[i, j] != 0.0:
                fp.write(f"z {i} {j} {float(point.z[i, j])!r}\n")
    for k in range(0, n + 1):
        for i in range(0, n + 1):
            for j in range(0, n + 1):
                if point.f[k, i, j] != 0.0 and _valid_f_index(n, k, i, j):
                    fp.write(f"f {i} {j} {k} {float(point.f[k, i, j])!r}\n")


def load_point(fp: Union[str, IO[str]]) -> FractionalPoint:
    if isinstance(fp, str):
        with open(fp) as fh:
            return load_point(fh)
    n = k = None
    entries = []
    for lineno, raw in enumerate(fp, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "N":
                n = int(tok[1])
            elif tok[0] == "K":
                k = int(tok[1])
            elif tok[0] in ("s", "z"):
                entries.append((tok[0], int(tok[1]), int(tok[2]), 0, float(tok[3])))
            elif tok[0] == "f":
                entries.append(
                    ("f", int(tok[1]), int(tok[2]), int(tok[3]), float(tok[4]))
                )
            else:
                raise ValueError(f"unknown record {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"bad point line {lineno}: {raw.rstrip()!r}") from exc
    if n is None or k is None:
        raise ValueError("point file must declare N and K")
    point = FractionalPoint(n, k)
    for kind, i, j, k3, value in entries:
        if value < -_TOL or value > 1.0 + _TOL:
            raise ValueError(f"value out of [0,1]: {kind} {i} {j} {value}")
        if kind == "s":
            if not (1 <= i < j <= n):
                raise ValueError(f"bad s index ({i},{j})")
            point.set_s(i, j, value)
        elif kind == "z":
            if not (1 <= i <= n and 1 <= j <= n and i != j):
                raise ValueError(f"bad z index ({i},{j})")
            point.z[i, j] = value
        else:
            if not _valid_f_index(n, k3, i, j):
                raise ValueError(f"bad f index ({i},{j},{k3})")
            point.f[k3, i, j] = value
    return point

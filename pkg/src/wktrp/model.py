"""Core problem model: instances, solutions, evaluation, feasibility, transforms.

An instance has vertices 0..n where 0 is the depot and 1..n are clients.
A solution is a set of exactly K non-empty routes; every client appears
exactly once. The objective is the weighted sum of client latencies,
where a client's latency is the travel plus service time accumulated
from the depot up to and including its own service. The return leg to
the depot never enters any latency.

Optional variant data on an instance:
  * ``duration_limit`` - maximum route duration (travel + service, plus
    the closing arc back to the depot when that arc is finite);
  * ``deadlines`` - per-client latest completion times;
  * ``rig_count`` - number of artificial zero-weight start vertices for
    instances produced by :func:`wrrp_transform` (vertices 1..rig_count).
"""

from __future__ import annotations

import math
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .rng import Pcg32, WEIGHT_STREAM

INF = math.inf


class InvalidSolutionError(ValueError):
    """Raised when a solution fails structural validation."""


class InvalidTransformError(ValueError):
    """Raised when a transform's preconditions do not hold."""


def _as_readonly(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


class Instance:
    """Immutable problem data.

    Parameters
    ----------
    travel : (n+1) x (n+1) matrix of arc costs; +inf marks a forbidden arc.
        The diagonal is ignored. Arcs are directed (the matrix need not be
        symmetric).
    weights : length n+1; index 0 must be 0.
    service : length n+1; index 0 must be 0.
    k : number of routes (1 <= k <= n).
    """

    def __init__(
        self,
        travel,
        weights,
        service,
        k: int,
        *,
        name: str = "unnamed",
        duration_limit: float = INF,
        deadlines: Optional[Sequence[float]] = None,
        rig_count: int = 0,
    ):
        self.travel = _as_readonly(travel)
        self.weights = _as_readonly(weights)
        self.service = _as_readonly(service)
        self.k = int(k)
        self.name = str(name)
        self.duration_limit = float(duration_limit)
        self.deadlines = None if deadlines is None else _as_readonly(deadlines)
        self.rig_count = int(rig_count)
        self._validate()

    @property
    def n(self) -> int:
        """Number of clients (vertices are 0..n)."""
        return self.weights.shape[0] - 1

    def _validate(self) -> None:
        n1 = self.weights.shape[0]
        if n1 < 2:
            raise ValueError("instance needs at least one client")
        if self.travel.shape != (n1, n1):
            raise ValueError(f"travel matrix must be {n1}x{n1}, got {self.travel.shape}")
        if self.service.shape != (n1,):
            raise ValueError("service vector length mismatch")
        if self.deadlines is not None and self.deadlines.shape != (n1,):
            raise ValueError("deadline vector length mismatch")
        if not (1 <= self.k <= self.n):
            raise ValueError(f"k={self.k} outside [1, n={self.n}]")
        if self.weights[0] != 0.0 or self.service[0] != 0.0:
            raise ValueError("depot weight and service time must be 0")
        if np.any(self.weights < 0) or np.any(self.service < 0):
            raise ValueError("weights and service times must be non-negative")
        off_diag = self.travel[~np.eye(n1, dtype=bool)]
        if np.any(np.isnan(off_diag)) or np.any(off_diag < 0):
            raise ValueError("travel costs must be non-negative (inf allowed)")
        if self.duration_limit <= 0:
            raise ValueError("duration_limit must be positive")
        if not (0 <= self.rig_count <= self.n):
            raise ValueError("rig_count out of range")
        if self.rig_count:
            self._validate_rig_structure()

    def _validate_rig_structure(self) -> None:
        d = self.rig_count
        n = self.n
        if self.k != d:
            raise ValueError("transformed instances need exactly one route per rig start")
        if np.any(self.weights[1 : d + 1] != 0) or np.any(self.service[1 : d + 1] != 0):
            raise ValueError("rig-start vertices must have zero weight and service")
        c = self.travel
        for j in range(1, d + 1):
            if c[0, j] != 0.0:
                raise ValueError("depot -> rig-start arcs must cost 0")
        for j in range(d + 1, n + 1):
            if not math.isinf(c[0, j]):
                raise ValueError("depot -> client arcs must be forbidden")
        for i in range(1, d + 1):
            for j in range(0, d + 1):
                if i != j and not math.isinf(c[i, j]):
                    raise ValueError("rig -> rig/depot arcs must be forbidden")
        for i in range(d + 1, n + 1):
            if c[i, 0] != 0.0:
                raise ValueError("client -> depot arcs must cost 0")
            for j in range(1, d + 1):
                if not math.isinf(c[i, j]):
                    raise ValueError("client -> rig arcs must be forbidden")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.k == other.k
            and self.name == other.name
            and self.duration_limit == other.duration_limit
            and self.rig_count == other.rig_count
            and np.array_equal(self.travel, other.travel)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.service, other.service)
            and (
                (self.deadlines is None and other.deadlines is None)
                or (
                    self.deadlines is not None
                    and other.deadlines is not None
                    and np.array_equal(self.deadlines, other.deadlines)
                )
            )
        )

    def __repr__(self) -> str:
        extras = []
        if math.isfinite(self.duration_limit):
            extras.append(f"D={self.duration_limit:g}")
        if self.deadlines is not None:
            extras.append("deadlines")
        if self.rig_count:
            extras.append(f"rigs={self.rig_count}")
        tail = (", " + ", ".join(extras)) if extras else ""
        return f"Instance({self.name!r}, n={self.n}, k={self.k}{tail})"


class Solution:
    """A set of routes. Each route lists client ids in visit order (no depot)."""

    def __init__(self, routes: Iterable[Iterable[int]]):
        self.routes: List[List[int]] = [list(r) for r in routes]
        # Per-client completion times, filled in by evaluate_weighted_latency.
        self.completion: Optional[np.ndarray] = None

    def copy(self) -> "Solution":
        return Solution(self.routes)

    def clients(self) -> List[int]:
        out: List[int] = []
        for r in self.routes:
            out.extend(r)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Solution):
            return NotImplemented
        return self.routes == other.routes

    def __repr__(self) -> str:
        return f"Solution({self.routes!r})"


def validate_solution(instance: Instance, solution: Solution) -> None:
    """Structural validation: exactly K non-empty routes partitioning the clients."""
    n, k = instance.n, instance.k
    if len(solution.routes) != k:
        raise InvalidSolutionError(
            f"expected {k} routes, got {len(solution.routes)}"
        )
    seen = set()
    for idx, route in enumerate(solution.routes):
        if not route:
            raise InvalidSolutionError(f"route {idx} is empty")
        for v in route:
            if not isinstance(v, (int, np.integer)) or not (1 <= v <= n):
                raise InvalidSolutionError(f"route {idx} has invalid client id {v!r}")
            if v in seen:
                raise InvalidSolutionError(f"client {v} visited more than once")
            seen.add(v)
    if len(seen) != n:
        missing = sorted(set(range(1, n + 1)) - seen)
        raise InvalidSolutionError(f"clients never visited: {missing}")


def evaluate_weighted_latency(instance: Instance, solution: Solution) -> float:
    """Total cost: sum over clients of weight * latency.

    A client's latency accumulates travel and service from the depot up to
    and including its own service time; the return leg to the depot is
    never part of any latency. If any arc on a path is +inf the whole
    solution cost is +inf. Fills ``solution.completion``.
    """
    validate_solution(instance, solution)
    c = instance.travel
    w = instance.weights
    r = instance.service
    completion = np.zeros(instance.n + 1)
    total = 0.0
    saw_inf = False
    for route in solution.routes:
        t = 0.0
        prev = 0
        for v in route:
            t = t + c[prev, v] + r[v]
            completion[v] = t
            if math.isinf(t):
                saw_inf = True
            else:
                total += w[v] * t
            prev = v
    solution.completion = completion
    return INF if saw_inf else total


def route_duration(
    instance: Instance, route: Sequence[int], *, include_return_arc: bool = True
) -> float:
    """Travel plus service along a route; the closing arc to the depot is
    included when it is finite and ``include_return_arc`` is set."""
    c = instance.travel
    r = instance.service
    t = 0.0
    prev = 0
    for v in route:
        t += c[prev, v] + r[v]
        prev = v
    if include_return_arc and prev != 0:
        back = c[prev, 0]
        if math.isfinite(back):
            t += back
    return t


class FeasibilityReport:
    """Outcome of check_feasibility. Violations are reported, not raised."""

    def __init__(self):
        self.structural_errors: List[str] = []
        self.duration_violations: List[tuple] = []  # (route index, duration)
        self.deadline_violations: List[tuple] = []  # (client, completion)

    @property
    def feasible(self) -> bool:
        return not (
            self.structural_errors
            or self.duration_violations
            or self.deadline_violations
        )

    def __repr__(self) -> str:
        return (
            f"FeasibilityReport(feasible={self.feasible}, "
            f"structural={self.structural_errors}, "
            f"duration={self.duration_violations}, "
            f"deadline={self.deadline_violations})"
        )


def check_feasibility(
    instance: Instance, solution: Solution, *, include_return_arc: bool = True
) -> FeasibilityReport:
    """Report structural, route-duration and deadline violations separately."""
    report = FeasibilityReport()
    try:
        validate_solution(instance, solution)
    except InvalidSolutionError as exc:
        report.structural_errors.append(str(exc))
        return report

    if math.isfinite(instance.duration_limit):
        for idx, route in enumerate(solution.routes):
            dur = route_duration(
                instance, route, include_return_arc=include_return_arc
            )
            if dur > instance.duration_limit + 1e-9:
                report.duration_violations.append((idx, dur))

    if instance.deadlines is not None:
        evaluate_weighted_latency(instance, solution)
        comp = solution.completion
        for v in range(1, instance.n + 1):
            limit = instance.deadlines[v]
            if comp[v] > limit + 1e-9:
                report.deadline_violations.append((v, float(comp[v])))
    return report


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def fold_service_times(instance: Instance, direction: str = "incoming") -> Instance:
    """Absorb service times into the travel matrix.

    ``incoming``: every arc into client j gains r_j; latencies and therefore
    the objective value of every solution are unchanged.
    ``outgoing``: every arc out of client i gains r_i; each client's own
    service time leaves its latency (objective drops by sum(w_i * r_i) for
    any solution), which models latency without the client's own service.
    Service times are zero afterwards in both cases.
    """
    c = np.array(instance.travel, dtype=float)
    r = instance.service
    n = instance.n
    if direction == "incoming":
        for j in range(1, n + 1):
            for h in range(0, n + 1):
                if h != j:
                    c[h, j] += r[j]
    elif direction == "outgoing":
        for i in range(1, n + 1):
            for j in range(0, n + 1):
                if i != j:
                    c[i, j] += r[i]
    else:
        raise ValueError(f"unknown fold direction {direction!r}")
    return Instance(
        c,
        instance.weights,
        np.zeros(n + 1),
        instance.k,
        name=instance.name,
        duration_limit=instance.duration_limit,
        deadlines=instance.deadlines,
        rig_count=0 if direction == "outgoing" else instance.rig_count,
    )


def make_ktrp(instance: Instance, duration_limit: float = INF) -> Instance:
    """Unit weights, zero service times; optionally attach a route duration
    limit. Zero-weight rig-start vertices, if any, keep weight zero."""
    n = instance.n
    w = np.ones(n + 1)
    w[0] = 0.0
    if instance.rig_count:
        w[1 : instance.rig_count + 1] = 0.0
    return Instance(
        instance.travel,
        w,
        np.zeros(n + 1),
        instance.k,
        name=instance.name,
        duration_limit=duration_limit,
        deadlines=instance.deadlines,
        rig_count=instance.rig_count,
    )


def generate_wlql_weights(instance: Instance, seed: int) -> Instance:
    """Draw client weights i.i.d. uniform on [0.5, 2.0].

    Uses PCG32 on a dedicated stream, so a seed fully determines the draw.
    Zero-weight rig-start vertices keep weight zero.
    """
    gen = Pcg32(seed, stream=WEIGHT_STREAM)
    n = instance.n
    w = np.zeros(n + 1)
    for i in range(1, n + 1):
        w[i] = 0.5 + 1.5 * gen.uniform()
    if instance.rig_count:
        w[1 : instance.rig_count + 1] = 0.0
    return Instance(
        instance.travel,
        w,
        instance.service,
        instance.k,
        name=instance.name,
        duration_limit=instance.duration_limit,
        deadlines=instance.deadlines,
        rig_count=instance.rig_count,
    )


def wrrp_transform(
    rig_count: int,
    raw_travel,
    weights,
    service,
    deadlines=None,
    *,
    name: str = "unnamed",
) -> Instance:
    """Build a multi-start instance on a single artificial depot.

    ``raw_travel`` is an m x m matrix over the m = rig_count + clients real
    locations, ordered rig starts first. The result has vertices 0..m where
    1..rig_count are zero-weight rig starts, each route must begin at a
    distinct rig start, and K = rig_count. Arc costs:

      depot  -> rig start   : 0
      client -> depot       : 0
      any    -> client      : real travel time
      depot  -> client      : forbidden
      rig/depot -> rig start, rig -> depot : forbidden
      client -> rig start   : forbidden

    ``weights``/``service``/``deadlines`` are per real client (length m -
    rig_count).
    """
    t = np.asarray(raw_travel, dtype=float)
    m = t.shape[0]
    if t.shape != (m, m):
        raise InvalidTransformError("raw travel matrix must be square")
    n_clients = m - rig_count
    if rig_count < 1:
        raise InvalidTransformError("need at least one rig start")
    if rig_count >= n_clients:
        raise InvalidTransformError(
            f"{rig_count} rig starts but only {n_clients} clients"
        )
    if len(weights) != n_clients or len(service) != n_clients:
        raise InvalidTransformError("weight/service vectors must cover the clients")
    if deadlines is not None and len(deadlines) != n_clients:
        raise InvalidTransformError("deadline vector must cover the clients")

    c = np.empty((m + 1, m + 1))
    for i in range(m + 1):
        for j in range(m + 1):
            if i == j:
                c[i, j] = 0.0
            elif i == 0 and j <= rig_count:
                c[i, j] = 0.0
            elif i > rig_count and j == 0:
                c[i, j] = 0.0
            elif i >= 1 and j > rig_count:
                c[i, j] = t[i - 1, j - 1]
            else:
                # depot -> client, rig/depot -> rig, rig -> depot,
                # client -> rig: all forbidden
                c[i, j] = INF

    w = np.zeros(m + 1)
    r = np.zeros(m + 1)
    w[rig_count + 1 :] = np.asarray(weights, dtype=float)
    r[rig_count + 1 :] = np.asarray(service, dtype=float)
    dl = None
    if deadlines is not None:
        dl = np.full(m + 1, INF)
        dl[rig_count + 1 :] = np.asarray(deadlines, dtype=float)
    return Instance(
        c, w, r, rig_count, name=name, deadlines=dl, rig_count=rig_count
    )


def scale_weights(instance: Instance, factor: float) -> Instance:
    """New instance with every client weight multiplied by ``factor`` > 0."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    w = np.array(instance.weights) * factor
    w[0] = 0.0
    return Instance(
        instance.travel,
        w,
        instance.service,
        instance.k,
        name=instance.name,
        duration_limit=instance.duration_limit,
        deadlines=instance.deadlines,
        rig_count=instance.rig_count,
    )

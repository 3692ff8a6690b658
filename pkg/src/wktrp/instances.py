"""Instance file formats.

Canonical format (plain text, whitespace-tokenized, ``INF`` allowed
wherever a number is expected)::

    NAME <string>
    N <clients>
    K <routes>
    D <duration limit>          # optional
    DELTA <rig starts>          # optional, for transformed multi-start instances
    WEIGHTS
    <n values>                  # clients 1..n; depot weight is implicit 0
    SERVICE
    <n values>
    DEADLINES                   # optional
    <n values>
    MATRIX
    <(n+1)^2 values, row-major>
    EOF

Also reads TSPLIB-style CVRP files (coordinates; demands and capacity are
discarded, weights become 1 and service 0 — the number of routes comes
from a ``-k<digits>`` suffix in the instance name or an override) and a
rig file layout for multi-start instances (documented at parse_rig).

Distances from coordinates are unrounded double-precision Euclidean; the
classic nearest-integer TSPLIB convention is deliberately not used (the
reference costs this package reproduces are non-integral).
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .model import INF, Instance, Solution, wrrp_transform


class ParseError(ValueError):
    """Raised when an instance or solution file is malformed."""


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "INF"
    return repr(float(v))


def _tofloat(tok: str) -> float:
    if tok.upper() in ("INF", "INFINITY"):
        return INF
    try:
        return float(tok)
    except ValueError as exc:
        raise ParseError(f"expected a number, got {tok!r}") from exc


# ---------------------------------------------------------------------------
# Canonical format
# ---------------------------------------------------------------------------


def write_canonical(instance: Instance, path) -> None:
    n = instance.n
    lines = [f"NAME {instance.name}", f"N {n}", f"K {instance.k}"]
    if math.isfinite(instance.duration_limit):
        lines.append(f"D {_fmt(instance.duration_limit)}")
    if instance.rig_count:
        lines.append(f"DELTA {instance.rig_count}")
    lines.append("WEIGHTS")
    lines.append(" ".join(_fmt(v) for v in instance.weights[1:]))
    lines.append("SERVICE")
    lines.append(" ".join(_fmt(v) for v in instance.service[1:]))
    if instance.deadlines is not None:
        lines.append("DEADLINES")
        lines.append(" ".join(_fmt(v) for v in instance.deadlines[1:]))
    lines.append("MATRIX")
    for i in range(n + 1):
        lines.append(" ".join(_fmt(v) for v in instance.travel[i]))
    lines.append("EOF")
    Path(path).write_text("\n".join(lines) + "\n")


def parse_canonical(path) -> Instance:
    tokens: List[str] = []
    name = "unnamed"
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.split()[0] == "NAME":
            name = line[4:].strip() or "unnamed"
            continue
        tokens.extend(line.split())
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of file")
        tok = tokens[pos]
        pos += 1
        return tok

    def take_values(count: int) -> List[float]:
        return [_tofloat(take()) for _ in range(count)]

    n = k = None
    d = INF
    delta = 0
    weights = service = deadlines = None
    matrix = None
    while True:
        key = take()
        if key == "EOF":
            break
        if key == "N":
            n = int(take())
        elif key == "K":
            k = int(take())
        elif key == "D":
            d = _tofloat(take())
        elif key == "DELTA":
            delta = int(take())
        elif key == "WEIGHTS":
            if n is None:
                raise ParseError("WEIGHTS before N")
            weights = take_values(n)
        elif key == "SERVICE":
            if n is None:
                raise ParseError("SERVICE before N")
            service = take_values(n)
        elif key == "DEADLINES":
            if n is None:
                raise ParseError("DEADLINES before N")
            deadlines = take_values(n)
        elif key == "MATRIX":
            if n is None:
                raise ParseError("MATRIX before N")
            matrix = take_values((n + 1) * (n + 1))
        else:
            raise ParseError(f"unknown section {key!r}")
    if n is None or k is None:
        raise ParseError("missing N or K header")
    if weights is None or service is None or matrix is None:
        raise ParseError("missing WEIGHTS, SERVICE or MATRIX section")
    travel = np.array(matrix).reshape(n + 1, n + 1)
    return Instance(
        travel,
        [0.0] + weights,
        [0.0] + service,
        k,
        name=name,
        duration_limit=d,
        deadlines=None if deadlines is None else [INF] + deadlines,
        rig_count=delta,
    )


# ---------------------------------------------------------------------------
# TSPLIB-style files
# ---------------------------------------------------------------------------


def _euclidean_matrix(coords: Sequence[Tuple[float, float]]) -> np.ndarray:
    m = len(coords)
    out = np.zeros((m, m))
    for i in range(m):
        xi, yi = coords[i]
        for j in range(i + 1, m):
            d = math.hypot(xi - coords[j][0], yi - coords[j][1])
            out[i, j] = d
            out[j, i] = d
    return out


def _read_tsplib_fields(path):
    """Split a TSPLIB file into key: value headers and section line lists."""
    headers = {}
    sections = {}
    current: Optional[str] = None
    for raw in Path(path).read_text().splitlines():
        line = line_stripped = raw.strip()
        if not line or line == "EOF":
            continue
        m = re.match(r"^([A-Z_][A-Z_0-9]*)\s*:\s*(.*)$", line)
        if m:
            headers[m.group(1)] = m.group(2).strip()
            current = None
            continue
        if re.match(r"^[A-Z_][A-Z_0-9]*$", line):
            current = line
            sections[current] = []
            continue
        if current is None:
            raise ParseError(f"stray line outside any section: {line_stripped!r}")
        sections[current].append(line)
    return headers, sections


def parse_tsplib_coords(path):
    """Node coordinates and the unrounded Euclidean travel matrix.

    Returns (coords, matrix) with coords a list of (x, y) in node-id
    order (ids 1..DIMENSION map to list indices 0..DIMENSION-1).
    """
    headers, sections = _read_tsplib_fields(path)
    if "NODE_COORD_SECTION" not in sections:
        raise ParseError("no NODE_COORD_SECTION")
    dim = int(headers["DIMENSION"]) if "DIMENSION" in headers else None
    seen = {}
    for line in sections["NODE_COORD_SECTION"]:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"malformed coordinate line: {line!r}")
        node = int(parts[0])
        if node in seen:
            raise ParseError(f"duplicate node id {node}")
        seen[node] = (float(parts[1]), float(parts[2]))
    if dim is not None and len(seen) != dim:
        raise ParseError(f"expected {dim} coordinates, found {len(seen)}")
    ids = sorted(seen)
    if ids != list(range(1, len(ids) + 1)):
        raise ParseError("node ids must be 1..DIMENSION")
    coords = [seen[i] for i in ids]
    return coords, _euclidean_matrix(coords)


def _routes_from_name(name: str) -> Optional[int]:
    m = re.search(r"-k(\d+)", name)
    return int(m.group(1)) if m else None


def parse_cvrp(path, k: Optional[int] = None) -> Instance:
    """CVRP file as a unit-weight, zero-service instance.

    Demands and capacity are discarded. The route count comes from the
    ``-k<digits>`` suffix of the instance name (or file name), unless
    ``k`` overrides it.
    """
    headers, sections = _read_tsplib_fields(path)
    coords, matrix = parse_tsplib_coords(path)
    if "DEPOT_SECTION" not in sections:
        raise ParseError("missing depot")
    depot_ids = [int(tok) for line in sections["DEPOT_SECTION"] for tok in line.split()]
    depot_ids = [d for d in depot_ids if d != -1]
    if len(depot_ids) != 1:
        raise ParseError(f"expected exactly one depot, got {depot_ids}")
    depot = depot_ids[0]
    name = headers.get("NAME", Path(path).stem)
    if k is None:
        k = _routes_from_name(name) or _routes_from_name(Path(path).stem)
        if k is None:
            raise ParseError(
                f"route count not encoded in name {name!r}; pass an override"
            )
    m = len(coords)
    order = [depot] + [i for i in range(1, m + 1) if i != depot]
    idx = [o - 1 for o in order]
    travel = matrix[np.ix_(idx, idx)]
    n = m - 1
    w = np.ones(n + 1)
    w[0] = 0.0
    return Instance(travel, w, np.zeros(n + 1), k, name=name)


# ---------------------------------------------------------------------------
# Rig files (multi-start instances)
# ---------------------------------------------------------------------------


def parse_rig(path) -> Instance:
    """Multi-start instance file. Layout::

        RIG
        NAME <string>            # optional
        DELTA <rig starts>
        CLIENTS <count>
        RIGS
        <x> <y>                  # one line per rig start
        CLIENT_DATA
        <x> <y> <weight> <service> <deadline>   # one line per client
        EOF

    Deadlines may be ``INF``. Distances are unrounded Euclidean over all
    real locations; the result is the transformed instance with one
    artificial depot, K = DELTA and zero-weight rig-start vertices.
    """
    lines = [
        ln.split("#", 1)[0].strip()
        for ln in Path(path).read_text().splitlines()
    ]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "RIG":
        raise ParseError("not a rig file")
    name = Path(path).stem
    delta = n_clients = None
    rig_coords: List[Tuple[float, float]] = []
    client_rows: List[List[float]] = []
    i = 1
    mode = None
    while i < len(lines):
        line = lines[i]
        i += 1
        if line == "EOF":
            break
        parts = line.split()
        if parts[0] == "NAME":
            name = line[4:].strip()
            mode = None
        elif parts[0] == "DELTA":
            delta = int(parts[1])
            mode = None
        elif parts[0] == "CLIENTS":
            n_clients = int(parts[1])
            mode = None
        elif parts[0] == "RIGS":
            mode = "rigs"
        elif parts[0] == "CLIENT_DATA":
            mode = "clients"
        elif mode == "rigs":
            if len(parts) != 2:
                raise ParseError(f"malformed rig line: {line!r}")
            rig_coords.append((float(parts[0]), float(parts[1])))
        elif mode == "clients":
            if len(parts) != 5:
                raise ParseError(f"malformed client line: {line!r}")
            client_rows.append([_tofloat(p) for p in parts])
        else:
            raise ParseError(f"unexpected line: {line!r}")
    if delta is None or n_clients is None:
        raise ParseError("missing DELTA or CLIENTS header")
    if len(rig_coords) != delta:
        raise ParseError(f"expected {delta} rig lines, got {len(rig_coords)}")
    if len(client_rows) != n_clients:
        raise ParseError(f"expected {n_clients} client lines, got {len(client_rows)}")
    coords = rig_coords + [(row[0], row[1]) for row in client_rows]
    raw = _euclidean_matrix(coords)
    weights = [row[2] for row in client_rows]
    service = [row[3] for row in client_rows]
    deadlines = [row[4] for row in client_rows]
    dl = deadlines if any(math.isfinite(d) for d in deadlines) else None
    return wrrp_transform(delta, raw, weights, service, dl, name=name)


# ---------------------------------------------------------------------------
# Auto-detection and solution files
# ---------------------------------------------------------------------------


def load_instance(path, k: Optional[int] = None) -> Instance:
    """Parse any supported format, sniffing by content."""
    text = Path(path).read_text()
    first = ""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            first = line
            break
    if first == "RIG":
        return parse_rig(path)
    if ":" in first:
        return parse_cvrp(path, k=k)
    if first.startswith("NAME") or first.split()[:1] == ["N"]:
        inst = parse_canonical(path)
        if k is not None and k != inst.k:
            inst = Instance(
                inst.travel,
                inst.weights,
                inst.service,
                k,
                name=inst.name,
                duration_limit=inst.duration_limit,
                deadlines=inst.deadlines,
                rig_count=inst.rig_count,
            )
        return inst
    raise ParseError(f"unrecognized instance format: {path}")


def write_solution(solution: Solution, path, cost: Optional[float] = None) -> None:
    """One route per line, space-separated client ids; '#' comments."""
    lines = []
    if cost is not None:
        lines.append(f"# cost {_fmt(cost)}")
    for route in solution.routes:
        lines.append(" ".join(str(v) for v in route))
    Path(path).write_text("\n".join(lines) + "\n")


def read_solution(path) -> Solution:
    routes = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            routes.append([int(tok) for tok in line.split()])
        except ValueError as exc:
            raise ParseError(f"bad route line: {raw!r}") from exc
    return Solution(routes)

"""File formats: canonical, TSPLIB-style CVRP, rig layouts, solution files."""

import math

import numpy as np
import pytest

from wktrp import (
    INF,
    Instance,
    ParseError,
    Solution,
    evaluate_weighted_latency,
    load_instance,
    parse_canonical,
    parse_cvrp,
    parse_rig,
    read_solution,
    write_canonical,
    write_solution,
)
from wktrp.instances import parse_tsplib_coords
from conftest import INSTANCE_DIR, random_instance, random_partition_solution


def test_canonical_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(60)
    for trial in range(15):
        n = int(rng.integers(2, 12))
        k = int(rng.integers(1, min(4, n) + 1))
        inst = random_instance(
            rng, n, k,
            integer=(trial % 2 == 0),
            inf_frac=0.2 if trial % 3 == 0 else 0.0,
            with_deadlines=(trial % 4 == 0),
            duration_limit=250.0 if trial % 5 == 0 else np.inf,
        )
        path = tmp_path / f"case{trial}.wktrp"
        write_canonical(inst, path)
        back = parse_canonical(path)
        assert back.n == inst.n and back.k == inst.k
        assert np.array_equal(back.travel, inst.travel)
        assert np.array_equal(back.weights, inst.weights)
        assert np.array_equal(back.service, inst.service)
        assert back.duration_limit == inst.duration_limit
        if inst.deadlines is None:
            assert back.deadlines is None
        else:
            assert np.array_equal(back.deadlines, inst.deadlines)


def test_canonical_tolerates_comments_and_inf(tmp_path):
    text = """# hand-written
NAME toy
N 2
K 1
WEIGHTS
1.0 2.0
SERVICE
0.5 0.0   # trailing comment
MATRIX
0.0 3.0 INF
3.0 0.0 4.0
INF 4.0 0.0
EOF
"""
    path = tmp_path / "toy.wktrp"
    path.write_text(text)
    inst = parse_canonical(path)
    assert inst.name == "toy" and inst.n == 2 and inst.k == 1
    assert math.isinf(inst.travel[0, 2]) and inst.travel[1, 2] == 4.0
    assert inst.weights[2] == 2.0 and inst.service[1] == 0.5


def test_canonical_parser_errors(tmp_path):
    cases = {
        "empty": "",
        "no_eof": "NAME x\nN 1\nK 1\nWEIGHTS\n1\nSERVICE\n0\nMATRIX\n0 1\n1 0\n",
        "short_matrix": "N 2\nK 1\nWEIGHTS\n1 1\nSERVICE\n0 0\nMATRIX\n0 1\nEOF\n",
        "bad_token": "N 2\nK 1\nWEIGHTS\n1 spam\nSERVICE\n0 0\nMATRIX\n"
                     + ("0 " * 9).strip() + "\nEOF\n",
        "k_too_big": "N 2\nK 5\nWEIGHTS\n1 1\nSERVICE\n0 0\nMATRIX\n"
                     + " ".join(["0"] * 9) + "\nEOF\n",
    }
    for label, text in cases.items():
        path = tmp_path / f"{label}.wktrp"
        path.write_text(text)
        with pytest.raises((ParseError, ValueError)):
            parse_canonical(path)


def test_euclidean_345_triangle(tmp_path):
    path = tmp_path / "tri.vrp"
    path.write_text(
        "NAME : tri-k1\nTYPE : CVRP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n"
        "NODE_COORD_SECTION\n1 0 0\n2 3 0\n3 3 4\n"
        "DEMAND_SECTION\n1 0\n2 1\n3 1\nDEPOT_SECTION\n1\n-1\nEOF\n"
    )
    coords, c = parse_tsplib_coords(path)
    assert c[0, 1] == 3.0 and c[1, 2] == 4.0 and c[0, 2] == 5.0
    assert np.array_equal(c, c.T)
    # distances stay unrounded doubles: collinear points add up exactly
    path2 = tmp_path / "line.vrp"
    path2.write_text(
        "NAME : line-k1\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n"
        "NODE_COORD_SECTION\n1 0 0\n2 1.5 0\n3 4.25 0\n"
        "DEMAND_SECTION\n1 0\n2 1\n3 1\nDEPOT_SECTION\n1\n-1\nEOF\n"
    )
    _, c2 = parse_tsplib_coords(path2)
    assert c2[0, 1] + c2[1, 2] == c2[0, 2] == 4.25


def test_cvrp_fixture_shapes():
    inst = parse_cvrp(INSTANCE_DIR / "E-n22-k4.vrp")
    assert inst.name.startswith("E-n22-k4")
    assert inst.n == 21 and inst.k == 4
    assert np.all(inst.weights[1:] == 1.0) and inst.weights[0] == 0.0
    assert np.all(inst.service == 0.0)
    assert inst.travel[0, 0] == 0.0 and np.all(inst.travel >= 0.0)

    second = parse_cvrp(INSTANCE_DIR / "P-n16-k8.vrp")
    assert second.n == 15 and second.k == 8

    # CMT1 carries no route count in its name: must be told, or fail loudly
    with pytest.raises((ParseError, ValueError)):
        parse_cvrp(INSTANCE_DIR / "CMT1.vrp")
    cmt = parse_cvrp(INSTANCE_DIR / "CMT1.vrp", k=5)
    assert cmt.n == 50 and cmt.k == 5


def test_cvrp_depot_not_first_is_reordered(tmp_path):
    # depot listed as node 3: vertex 0 must still be the depot
    path = tmp_path / "shuffle-k1.vrp"
    path.write_text(
        "NAME : shuffle-k1\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n"
        "NODE_COORD_SECTION\n1 10 0\n2 20 0\n3 0 0\n"
        "DEMAND_SECTION\n1 1\n2 1\n3 0\nDEPOT_SECTION\n3\n-1\nEOF\n"
    )
    inst = parse_cvrp(path)
    assert inst.travel[0, 1] == 10.0  # depot (0,0) to former node 1
    assert inst.travel[0, 2] == 20.0


def test_cvrp_parse_errors(tmp_path):
    bad_dupe = tmp_path / "dupe-k2.vrp"
    bad_dupe.write_text(
        "NAME : dupe-k2\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n"
        "NODE_COORD_SECTION\n1 0 0\n2 1 1\n2 2 2\n"
        "DEMAND_SECTION\n1 0\n2 1\n3 1\nDEPOT_SECTION\n1\n-1\nEOF\n"
    )
    with pytest.raises(ParseError):
        parse_cvrp(bad_dupe)
    no_depot = tmp_path / "nodepot-k2.vrp"
    no_depot.write_text(
        "NAME : nodepot-k2\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : EUC_2D\n"
        "NODE_COORD_SECTION\n1 0 0\n2 1 1\n"
        "DEMAND_SECTION\n1 1\n2 1\nEOF\n"
    )
    with pytest.raises(ParseError):
        parse_cvrp(no_depot)


def test_rig_fixture_structure():
    inst = parse_rig(INSTANCE_DIR / "example.rig")
    assert inst.name == "two-rigs-six-wells"
    assert inst.rig_count == 2 and inst.k == 2 and inst.n == 8
    assert np.all(inst.weights[1:3] == 0.0)
    assert math.isinf(inst.travel[0, 3])   # depot cannot jump to a client
    assert inst.travel[0, 1] == 0.0        # free start at a rig
    assert inst.deadlines is not None
    assert inst.deadlines[4] == 120.0 and math.isinf(inst.deadlines[3])
    # rig-to-client arcs carry the true Euclidean distance
    assert inst.travel[1, 3] == math.hypot(20 - 10, 15 - 10)


def test_rig_parse_errors(tmp_path):
    path = tmp_path / "bad.rig"
    path.write_text("RIG\nDELTA 1\nRIGS\n0 0\nEOF\n")
    with pytest.raises(ParseError):
        parse_rig(path)
    path.write_text("RIG\nDELTA 1\nCLIENTS 1\nRIGS\n0 0\nCLIENT_DATA\n1 1 1\nEOF\n")
    with pytest.raises(ParseError):
        parse_rig(path)


def test_load_instance_sniffs_all_formats(tmp_path):
    assert load_instance(INSTANCE_DIR / "example.rig").rig_count == 2
    assert load_instance(INSTANCE_DIR / "E-n22-k4.vrp").n == 21
    assert load_instance(INSTANCE_DIR / "demo-w10.wktrp").n == 10
    junk = tmp_path / "junk.txt"
    junk.write_text("hello world\n")
    with pytest.raises((ParseError, ValueError)):
        load_instance(junk)


def test_solution_files_reevaluate_to_logged_cost(tmp_path):
    rng = np.random.default_rng(61)
    for trial in range(10):
        n = int(rng.integers(2, 10))
        k = int(rng.integers(1, min(4, n) + 1))
        inst = random_instance(rng, n, k)
        sol = random_partition_solution(rng, n, k)
        cost = evaluate_weighted_latency(inst, sol)
        path = tmp_path / f"sol{trial}.txt"
        write_solution(sol, path, cost=cost)
        back = read_solution(path)
        assert back.routes == sol.routes
        again = evaluate_weighted_latency(inst, back)
        assert abs(again - cost) <= 1e-9 * max(1.0, abs(cost))
        # the cost comment must round-trip exactly through repr
        logged = [
            ln for ln in path.read_text().splitlines() if ln.startswith("# cost")
        ]
        assert logged and float(logged[0].split()[2]) == cost


def test_read_solution_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 2 spam\n")
    with pytest.raises((ParseError, ValueError)):
        read_solution(path)

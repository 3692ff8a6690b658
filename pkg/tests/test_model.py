"""Objective, feasibility and transform semantics."""

import math

import numpy as np
import pytest

from wktrp import (
    INF,
    Instance,
    InvalidSolutionError,
    InvalidTransformError,
    Solution,
    check_feasibility,
    evaluate_weighted_latency,
    fold_service_times,
    generate_wlql_weights,
    make_ktrp,
    route_duration,
    scale_weights,
    validate_solution,
    wrrp_transform,
)
from conftest import random_instance, random_partition_solution


def chain_instance(travel_legs, services, weights, *, closing=None, k=1):
    """Instance whose only interesting arcs lie along 0 -> 1 -> 2 -> ...;
    every other arc gets a large finite cost."""
    n = len(travel_legs)
    m = n + 1
    c = np.full((m, m), 1000.0)
    np.fill_diagonal(c, 0.0)
    for i, leg in enumerate(travel_legs):
        c[i, i + 1] = leg
    if closing is not None:
        c[n, 0] = closing
    r = np.zeros(m)
    r[1:] = services
    w = np.zeros(m)
    w[1:] = weights
    return Instance(c, w, r, k, name="chain")


def test_single_route_hand_example():
    # legs 5,4,7 with services 2,1,3: completions 7, 12, 22
    inst = chain_instance([5, 4, 7], [2, 1, 3], [2, 1, 1], closing=6)
    sol = Solution([[1, 2, 3]])
    cost = evaluate_weighted_latency(inst, sol)
    assert cost == 2 * 7 + 1 * 12 + 1 * 22 == 48
    assert list(sol.completion[1:]) == [7.0, 12.0, 22.0]
    # the return leg belongs to the duration, never to any latency
    assert route_duration(inst, [1, 2, 3]) == 22 + 6
    assert route_duration(inst, [1, 2, 3], include_return_arc=False) == 22


def test_six_client_chain_totals_34():
    # One repairman, six clients, completions 2,4,5,6,8,9 (services folded
    # into the increments: 2,2,1,1,2,1).
    inst = chain_instance([1, 2, 1, 0, 2, 1], [1, 0, 0, 1, 0, 0], np.ones(6))
    sol = Solution([[1, 2, 3, 4, 5, 6]])
    assert evaluate_weighted_latency(inst, sol) == 34
    assert list(sol.completion[1:]) == [2.0, 4.0, 5.0, 6.0, 8.0, 9.0]


def test_two_repairmen_weighted_example():
    """Two routes; weighted total 91 while the plain latency total is 36."""
    m = 7
    c = np.full((m, m), 500.0)
    np.fill_diagonal(c, 0.0)
    # route one: completions 2, 4, 8; route two: completions 4, 8, 10
    c[0, 1], c[1, 2], c[2, 3] = 2, 2, 4
    c[0, 4], c[4, 5], c[5, 6] = 4, 4, 2
    w = np.array([0.0, 6.0, 3.0, 3.0, 5.0, 1.875, 0.8])
    inst = Instance(c, w, np.zeros(m), 2)
    sol = Solution([[1, 2, 3], [4, 5, 6]])
    assert evaluate_weighted_latency(inst, sol) == 12 + 12 + 24 + 20 + 15 + 8 == 91
    assert evaluate_weighted_latency(make_ktrp(inst), sol) == 36


def test_forbidden_arc_makes_cost_infinite():
    inst = chain_instance([3, 2], [0, 0], [1, 1])
    c = np.array(inst.travel)
    c[1, 2] = INF
    inst2 = Instance(c, inst.weights, inst.service, 1)
    assert math.isinf(evaluate_weighted_latency(inst2, Solution([[1, 2]])))
    assert evaluate_weighted_latency(inst2, Solution([[2, 1]])) < INF


def test_validate_solution_rejects_malformed_routes():
    rng = np.random.default_rng(0)
    inst = random_instance(rng, 5, 2, integer=True)
    validate_solution(inst, Solution([[1, 2, 3], [4, 5]]))
    bad = [
        [[1, 2, 3, 4, 5]],            # wrong route count
        [[1, 2, 3], [4, 5], []],      # wrong route count again
        [[1, 2, 3, 4], [4, 5]],       # duplicate client
        [[1, 2, 3], [4]],             # client missing
        [[1, 2, 3, 4, 5], []],        # empty route
        [[0, 1, 2], [3, 4, 5]],       # depot inside a route
        [[1, 2, 6], [3, 4, 5]],       # vertex out of range
    ]
    for routes in bad:
        with pytest.raises(InvalidSolutionError):
            validate_solution(inst, Solution(routes))


def test_feasibility_report_flags_duration_and_deadlines():
    inst = chain_instance([5, 4, 7], [2, 1, 3], [1, 1, 1], closing=6)
    longer = Instance(
        inst.travel, inst.weights, inst.service, 1, duration_limit=27.0
    )
    report = check_feasibility(longer, Solution([[1, 2, 3]]))
    assert not report.structural_errors
    assert report.duration_violations == [(0, 28.0)]
    assert report.feasible is False
    # without the closing arc the same route fits
    report2 = check_feasibility(
        longer, Solution([[1, 2, 3]]), include_return_arc=False
    )
    assert report2.feasible

    # completions are 7, 12, 22: a deadline met exactly is not a violation
    dl = np.array([INF, 7.0, 11.0, INF])
    dated = Instance(inst.travel, inst.weights, inst.service, 1, deadlines=dl)
    report3 = check_feasibility(dated, Solution([[1, 2, 3]]))
    assert report3.deadline_violations == [(2, 12.0)]


def test_structural_errors_reported_not_raised():
    rng = np.random.default_rng(1)
    inst = random_instance(rng, 4, 2, integer=True)
    report = check_feasibility(inst, Solution([[1, 2], [3]]))
    assert report.structural_errors and not report.feasible


def test_fold_incoming_preserves_cost():
    rng = np.random.default_rng(7)
    for trial in range(30):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, min(3, n) + 1))
        inst = random_instance(rng, n, k)
        sol = random_partition_solution(rng, n, k)
        folded = fold_service_times(inst, "incoming")
        assert np.all(folded.service == 0)
        a = evaluate_weighted_latency(inst, sol)
        b = evaluate_weighted_latency(folded, sol)
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_fold_outgoing_drops_own_service_terms():
    rng = np.random.default_rng(8)
    for trial in range(30):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, min(3, n) + 1))
        inst = random_instance(rng, n, k)
        sol = random_partition_solution(rng, n, k)
        folded = fold_service_times(inst, "outgoing")
        a = evaluate_weighted_latency(inst, sol)
        b = evaluate_weighted_latency(folded, sol)
        drop = float(np.dot(inst.weights[1:], inst.service[1:]))
        assert abs((a - drop) - b) <= 1e-9 * max(1.0, abs(a))


def test_fold_rejects_unknown_direction():
    rng = np.random.default_rng(9)
    inst = random_instance(rng, 3, 1)
    with pytest.raises(ValueError):
        fold_service_times(inst, "sideways")


def test_make_ktrp_and_wlql_weights():
    rng = np.random.default_rng(10)
    inst = random_instance(rng, 6, 2)
    flat = make_ktrp(inst, duration_limit=100.0)
    assert np.all(flat.weights[1:] == 1.0) and flat.weights[0] == 0.0
    assert np.all(flat.service == 0.0)
    assert flat.duration_limit == 100.0

    w1 = generate_wlql_weights(inst, seed=42)
    w2 = generate_wlql_weights(inst, seed=42)
    w3 = generate_wlql_weights(inst, seed=43)
    assert np.array_equal(w1.weights, w2.weights)
    assert not np.array_equal(w1.weights, w3.weights)
    assert np.all(w1.weights[1:] >= 0.5) and np.all(w1.weights[1:] <= 2.0)
    assert w1.weights[0] == 0.0


def test_scale_weights_scales_cost_linearly():
    rng = np.random.default_rng(11)
    inst = random_instance(rng, 7, 2)
    sol = random_partition_solution(rng, 7, 2)
    base = evaluate_weighted_latency(inst, sol)
    for factor in (0.25, 3.0):
        scaled = evaluate_weighted_latency(scale_weights(inst, factor), sol)
        assert abs(scaled - factor * base) <= 1e-9 * max(1.0, abs(scaled))
    with pytest.raises(ValueError):
        scale_weights(inst, 0.0)


def test_wrrp_transform_arc_cases():
    delta, n_cli = 2, 3
    m = delta + n_cli
    raw = np.arange(1, m * m + 1, dtype=float).reshape(m, m)
    np.fill_diagonal(raw, 0.0)
    inst = wrrp_transform(delta, raw, [1.0, 2.0, 3.0], [0.5, 0.0, 1.0],
                          deadlines=[10.0, INF, 20.0])
    assert inst.k == delta and inst.rig_count == delta and inst.n == m
    c = inst.travel
    assert c[0, 1] == 0.0 and c[0, 2] == 0.0          # depot -> rig start
    assert c[3, 0] == 0.0 and c[5, 0] == 0.0          # client -> depot
    assert c[1, 3] == raw[0, 2] and c[4, 5] == raw[3, 4]  # any -> client
    assert math.isinf(c[0, 3])                        # depot -> client
    assert math.isinf(c[1, 2]) and math.isinf(c[1, 0])  # rig -> rig/depot
    assert math.isinf(c[3, 1])                        # client -> rig start
    assert np.all(inst.weights[1:delta + 1] == 0.0)
    assert np.all(inst.service[1:delta + 1] == 0.0)
    assert inst.deadlines[3] == 10.0 and math.isinf(inst.deadlines[4])

    # each route must open at a distinct rig start or the cost is infinite
    good = Solution([[1, 3], [2, 4, 5]])
    assert evaluate_weighted_latency(inst, good) < INF
    bad = Solution([[3, 1], [2, 4, 5]])
    assert math.isinf(evaluate_weighted_latency(inst, bad))


def test_wrrp_transform_input_checks():
    raw = np.zeros((4, 4))
    with pytest.raises(InvalidTransformError):
        wrrp_transform(0, raw, [1, 1, 1, 1], [0, 0, 0, 0])
    with pytest.raises(InvalidTransformError):
        wrrp_transform(2, raw, [1, 1], [0, 0, 0])  # weight vector too short
    with pytest.raises(InvalidTransformError):
        wrrp_transform(3, raw, [1.0], [0.0])  # rigs must leave clients


def test_instance_validation():
    c = np.zeros((3, 3))
    with pytest.raises(ValueError):
        Instance(c, [0, 1, 1], [0, 0, 0], 3)  # k > n
    with pytest.raises(ValueError):
        Instance(c, [1, 1, 1], [0, 0, 0], 1)  # depot weight nonzero
    with pytest.raises(ValueError):
        Instance(np.full((3, 3), -1.0), [0, 1, 1], [0, 0, 0], 1)
    inst = Instance(c, [0, 1, 1], [0, 0, 0], 2)
    with pytest.raises(ValueError):
        inst.travel[0, 1] = 5.0  # instances are immutable

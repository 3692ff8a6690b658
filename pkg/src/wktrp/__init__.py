"""Solver toolkit for weighted-latency routing with multiple repairmen."""

from .cuts import (
    Cut,
    clique_edges,
    cut_violation,
    min_same_route_pairs,
    omega,
    separate_f_activation,
    separate_pigeonhole,
    separate_z_activation,
    tau,
)
from .exact import ExactResult, brute_force_solve, exact_solve
from .formulation import (
    FractionalPoint,
    VariableAssignment,
    assignment_from_solution,
    dump_point,
    load_point,
    objective_from_assignment,
    solution_from_assignment,
    verify_constraints,
)
from .ils import BACKEND, IlsParams, IlsResult, ils_solve, make_engine
from .instances import (
    ParseError,
    load_instance,
    parse_canonical,
    parse_cvrp,
    parse_rig,
    read_solution,
    write_canonical,
    write_solution,
)
from .model import (
    INF,
    FeasibilityReport,
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
from .rng import Pcg32

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Cut",
    "ExactResult",
    "FeasibilityReport",
    "FractionalPoint",
    "INF",
    "IlsParams",
    "IlsResult",
    "Instance",
    "InvalidSolutionError",
    "InvalidTransformError",
    "ParseError",
    "Pcg32",
    "Solution",
    "VariableAssignment",
    "assignment_from_solution",
    "brute_force_solve",
    "check_feasibility",
    "clique_edges",
    "cut_violation",
    "dump_point",
    "evaluate_weighted_latency",
    "exact_solve",
    "fold_service_times",
    "generate_wlql_weights",
    "ils_solve",
    "load_instance",
    "load_point",
    "make_engine",
    "make_ktrp",
    "min_same_route_pairs",
    "objective_from_assignment",
    "omega",
    "parse_canonical",
    "parse_cvrp",
    "parse_rig",
    "read_solution",
    "route_duration",
    "scale_weights",
    "separate_f_activation",
    "separate_pigeonhole",
    "separate_z_activation",
    "solution_from_assignment",
    "tau",
    "validate_solution",
    "verify_constraints",
    "write_canonical",
    "write_solution",
    "wrrp_transform",
]

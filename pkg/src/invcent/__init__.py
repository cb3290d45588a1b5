"""Inverse eigenvector centrality: arc weights realizing a prescribed centrality."""

from .bounds import Bounds, bounds_report, lemma_bounds, objective_bounds
from .graph import (DiGraph, GraphError, SccPartition, giant_scc_subgraph, is_strongly_connected,
                    parse_edge_list, read_edge_list, strongly_connected_components, to_dot)
from .solvers import (PROBLEMS, WeightSolution, cross_objective_matrix, objective_value, solve, solve_all,
                      solve_p1, solve_p2, solve_p3, solve_p4, solve_p5, solve_p5_oracle,
                      solve_p6_closed_form, solve_p6_oracle)
from .spectral import CentralityResult, power_iteration, verify_realization
from .system import (CentralitySpec, InfeasibleError, InverseSystem, big_m_value, build_system,
                     epsilon_max, feasible_point)

__version__ = "0.1.0"

__all__ = [
    "Bounds", "bounds_report", "lemma_bounds", "objective_bounds",
    "DiGraph", "GraphError", "SccPartition", "giant_scc_subgraph", "is_strongly_connected",
    "parse_edge_list", "read_edge_list", "strongly_connected_components", "to_dot",
    "PROBLEMS", "WeightSolution", "cross_objective_matrix", "objective_value", "solve", "solve_all",
    "solve_p1", "solve_p2", "solve_p3", "solve_p4", "solve_p5", "solve_p5_oracle",
    "solve_p6_closed_form", "solve_p6_oracle",
    "CentralityResult", "power_iteration", "verify_realization",
    "CentralitySpec", "InfeasibleError", "InverseSystem", "big_m_value", "build_system",
    "epsilon_max", "feasible_point",
]

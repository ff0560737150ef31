"""
Stationary states of Grover walks on finite graphs with semi-infinite tails.

Typical use::

    from gwalk import complete_graph, stationary_state, comfortability
    g = complete_graph(4, 2)
    comfortability(g, 1.0, [1, 0]).value   # 1.625
"""

from gwalk._accel import BACKEND
from gwalk.errors import (
    ConvergenceError,
    GraphError,
    GWalkError,
    SingularFrequencyError,
    SolverError,
)
from gwalk.graph import (
    SymmetricDigraph,
    bipartite_partition,
    build_graph,
    complete_graph,
    cycle_graph,
    flat_arc,
    flat_vertex,
    load_graph_json,
    matrices,
    path_graph,
    random_connected_graph,
)
from gwalk.laplacian import build_L, j_minus, j_plus, kernel_basis, singular_set
from gwalk.observables import comfortability, outflow, scattering_matrix, transmitting_rate
from gwalk.oracle import build_internal_evolution, iterate_to_stationary, neumann_stationary
from gwalk.stationary import (
    electric_current,
    potential_derivative_check,
    solve_potential,
    solve_potential_singular,
    stationary_at_pm1,
    stationary_state,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConvergenceError",
    "GraphError",
    "GWalkError",
    "SingularFrequencyError",
    "SolverError",
    "SymmetricDigraph",
    "bipartite_partition",
    "build_graph",
    "complete_graph",
    "cycle_graph",
    "flat_arc",
    "flat_vertex",
    "load_graph_json",
    "matrices",
    "path_graph",
    "random_connected_graph",
    "build_L",
    "j_minus",
    "j_plus",
    "kernel_basis",
    "singular_set",
    "comfortability",
    "outflow",
    "scattering_matrix",
    "transmitting_rate",
    "build_internal_evolution",
    "iterate_to_stationary",
    "neumann_stationary",
    "electric_current",
    "potential_derivative_check",
    "solve_potential",
    "solve_potential_singular",
    "stationary_at_pm1",
    "stationary_state",
]

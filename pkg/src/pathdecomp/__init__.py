"""Decompositions of highly edge-connected graphs into paths of a fixed length."""

from .errors import BudgetExhausted, DecompositionError, GraphParseError, InvariantViolation, PreconditionError
from .graph import MultiGraph, dump_graph, edge_connectivity, load_graph, locally_max_cut
from .pathgraph import Path, PathGraph, Tour, euler_tour_nonconflicting
from .pipeline import (Decomposition, PipelineConfig, cut_tour, decompose_24, decompose_eulerian4,
                       euler_tour_no_short_cycle)
from .verify import brute_force_decomposable, verify_decomposition

__all__ = [
    "BudgetExhausted", "DecompositionError", "GraphParseError", "InvariantViolation", "PreconditionError",
    "MultiGraph", "dump_graph", "edge_connectivity", "load_graph", "locally_max_cut",
    "Path", "PathGraph", "Tour", "euler_tour_nonconflicting",
    "Decomposition", "PipelineConfig", "cut_tour", "decompose_24", "decompose_eulerian4",
    "euler_tour_no_short_cycle", "brute_force_decomposable", "verify_decomposition",
]
__version__ = "0.1.0"

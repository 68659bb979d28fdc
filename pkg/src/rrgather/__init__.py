"""Deterministic gathering of oblivious robots on graphs under Round-Robin."""

from .algorithms import NoTerminalOrbitGathering, TerminalOrbitGathering, pick_algorithm
from .canon import automorphism_orbits, canonical_form, is_isomorphic, is_vertex_transitive
from .graph import Graph, GraphError, parse_graph
from .orbits import build_gprime, has_terminal_orbit, is_terminal, select_o1_o2, terminal_report
from .sim import Adversary, ExecutionTrace, run

__version__ = "0.1.0"

__all__ = [
    "Adversary",
    "ExecutionTrace",
    "Graph",
    "GraphError",
    "NoTerminalOrbitGathering",
    "TerminalOrbitGathering",
    "automorphism_orbits",
    "build_gprime",
    "canonical_form",
    "has_terminal_orbit",
    "is_isomorphic",
    "is_terminal",
    "is_vertex_transitive",
    "parse_graph",
    "pick_algorithm",
    "run",
    "select_o1_o2",
    "terminal_report",
]

"""Swarm-guided test sequence generation from state-transition diagrams."""

from .graph import StateGraph, atm_fixture, parse_graph, serialize_graph
from .objectives import CostVariant, ObjectiveVector, RandPolicy
from .optimizers import Algorithm, RunResult, SwarmConfig, run
from .pareto import ParetoArchive, dominates, non_dominated_filter
from .paths import PathSuite, TestSequence, enumerate_all_sequences

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "CostVariant",
    "ObjectiveVector",
    "ParetoArchive",
    "PathSuite",
    "RandPolicy",
    "RunResult",
    "StateGraph",
    "SwarmConfig",
    "TestSequence",
    "atm_fixture",
    "dominates",
    "enumerate_all_sequences",
    "non_dominated_filter",
    "parse_graph",
    "run",
    "serialize_graph",
]

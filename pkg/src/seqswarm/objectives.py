"""Path Priority (maximised) and Oracle Cost (minimised) for test sequences."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .errors import ZeroPriority
from .graph import StateGraph, predicate_nodes
from .paths import PathSuite, TestSequence

RAND_FLOOR = 0.01
RAND_CEIL = 1.0


class RandPolicy(str, enum.Enum):
    """Source of the per-node ``rand()`` factor in the priority formula.

    PAPER is deterministic: ``1/(N - i + 1) - 0.1`` for node ``i``.
    UNIFORM draws a fresh value from the caller's rng.
    Both are clamped to ``[0.01, 1.0]``.
    """

    PAPER = "paper"
    UNIFORM = "uniform"


class CostVariant(str, enum.Enum):
    MAX = "max"          # tc / (Bp * max priority in suite): same for every sequence
    PER_PATH = "perpath"  # tc / (Bp * priority of the sequence itself)


class ObjectiveVector(NamedTuple):
    priority: float
    cost: float


@dataclass(frozen=True)
class PriorityContext:
    tc: int
    branch_count: int
    max_priority: float
    variant: CostVariant = CostVariant.MAX
    algorithm: str = ""
    program: str = ""

    @classmethod
    def for_suite(cls, priorities: Iterable[float], tc: int, g: StateGraph,
                  variant: CostVariant = CostVariant.MAX, algorithm: str = "",
                  program: str = "") -> "PriorityContext":
        return cls(tc, g.branch_count, max(priorities), CostVariant(variant), algorithm, program)


def cyclomatic_term(seq: TestSequence, g: StateGraph) -> int:
    preds = predicate_nodes(g)
    return sum(1 for v in seq.nodes if v in preds) + 1


def rand_term(policy: RandPolicy, node_position: int, n: int, rng=None) -> float:
    if RandPolicy(policy) is RandPolicy.PAPER:
        raw = 1.0 / (n - node_position + 1) - 0.1
    else:
        raw = rng.random()
    return min(max(raw, RAND_FLOOR), RAND_CEIL)


def path_priority(seq: TestSequence, g: StateGraph, policy: RandPolicy = RandPolicy.PAPER,
                  rng=None) -> float:
    """Mean per-node brightness ``100 / (CC * rand)`` along the sequence."""
    policy = RandPolicy(policy)
    cc = cyclomatic_term(seq, g)
    total = 0.0
    for v in seq.nodes:
        total += 100.0 / (cc * rand_term(policy, v, g.n, rng))
    return total / len(seq.nodes)


def oracle_cost(seq_priority: float, ctx: PriorityContext) -> float:
    if CostVariant(ctx.variant) is CostVariant.PER_PATH:
        denom_priority = seq_priority
    else:
        denom_priority = ctx.max_priority
    if not denom_priority > 0 or ctx.branch_count < 1:
        raise ZeroPriority(f"cannot evaluate cost with priority {denom_priority}")
    return ctx.tc / (ctx.branch_count * denom_priority)


def objective_vector(seq: TestSequence, g: StateGraph, ctx: PriorityContext,
                     policy: RandPolicy = RandPolicy.PAPER, rng=None) -> ObjectiveVector:
    f1 = path_priority(seq, g, policy, rng)
    return ObjectiveVector(f1, oracle_cost(f1, ctx))


def evaluate_suite(suite: PathSuite, g: StateGraph, priorities: Mapping[TestSequence, float],
                   variant: CostVariant = CostVariant.MAX) -> list[ObjectiveVector]:
    """Objective vectors for every suite member from precomputed priorities.

    Priorities are passed in (rather than recomputed) so that a stochastic
    rand policy scores each sequence once per run.
    """
    prios = [priorities[s] for s in suite]
    ctx = PriorityContext.for_suite(prios, suite.tc, g, variant)
    return [ObjectiveVector(p, oracle_cost(p, ctx)) for p in prios]


def is_valid_vector(v: ObjectiveVector) -> bool:
    return all(math.isfinite(x) and x > 0 for x in v)

"""Test sequences, guided walks, exhaustive enumeration and edge coverage."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DeadEndAbort, GraphTooLarge, SeqSwarmError
from .graph import Edge, StateGraph

FRESH_EDGE_BONUS = 2.0
GUIDANCE_DECAY = 0.8
GUIDANCE_FLOOR = 0.05
MAX_WALK_ATTEMPTS = 50
ORACLE_MAX_NODES = 20


@dataclass(frozen=True, order=True)
class TestSequence:
    nodes: tuple[int, ...]

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))

    def edges(self) -> tuple[Edge, ...]:
        return tuple(zip(self.nodes, self.nodes[1:]))

    def __str__(self) -> str:
        return ",".join(map(str, self.nodes))

    def __len__(self) -> int:
        return len(self.nodes)

    @classmethod
    def parse(cls, text: str) -> "TestSequence":
        return cls(tuple(int(t) for t in text.split(",")))

    def is_valid(self, g: StateGraph) -> bool:
        ns = self.nodes
        if not ns or ns[0] != g.start or ns[-1] not in g.exits:
            return False
        if len(set(ns)) != len(ns):
            return False
        return all(g.has_edge(a, b) for a, b in self.edges())


class PathSuite:
    """Ordered, duplicate-free collection of test sequences."""

    def __init__(self, sequences: Iterable[TestSequence] = ()):
        self._seqs: list[TestSequence] = []
        self._covered: set[Edge] = set()
        for s in sequences:
            if s not in self._seqs:
                self._seqs.append(s)
                self._covered.update(s.edges())

    @property
    def sequences(self) -> tuple[TestSequence, ...]:
        return tuple(self._seqs)

    @property
    def tc(self) -> int:
        return len(self._seqs)

    def covered_edges(self) -> frozenset[Edge]:
        return frozenset(self._covered)

    def __len__(self):
        return len(self._seqs)

    def __iter__(self):
        return iter(self._seqs)

    def __contains__(self, seq) -> bool:
        return seq in self._seqs

    def __eq__(self, other):
        return isinstance(other, PathSuite) and self._seqs == other._seqs

    def __repr__(self):
        return f"PathSuite([{'; '.join(map(str, self._seqs))}])"


def accept_into_suite(suite: PathSuite, cand: TestSequence) -> PathSuite:
    """Return ``suite`` extended by ``cand`` when it is new and covers a new edge.

    The input suite is returned unchanged (same object) on rejection.
    """
    if cand in suite:
        return suite
    if set(cand.edges()) <= suite.covered_edges():
        return suite
    return PathSuite(suite.sequences + (cand,))


def coverage_complete(suite: PathSuite, g: StateGraph) -> bool:
    return suite.covered_edges() >= set(g.edges)


def decay_guidance(guid: np.ndarray, seq: TestSequence) -> None:
    """In-place decay of the guidance weights along an accepted sequence."""
    for a, b in seq.edges():
        guid[a - 1, b - 1] = max(guid[a - 1, b - 1] * GUIDANCE_DECAY, GUIDANCE_FLOOR)


def walk(g: StateGraph, guid: np.ndarray, covered, rng) -> TestSequence:
    """One agent walk from the start node to an exit.

    ``rng`` only needs a ``random()`` method returning floats in [0, 1), so a
    numpy Generator works, as does a scripted stub in tests. One draw is
    consumed per real choice: a branch among several unvisited successors, or
    the stop-or-continue coin at an exit node that still has uncovered
    outgoing transitions.
    """
    node = g.start
    visited = [node]
    seen = {node}
    while True:
        options = [s for s in g.successors(node) if s not in seen]
        if node in g.exits:
            if not options:
                break
            if all((node, s) in covered for s in g.successors(node)):
                break
            if rng.random() < 0.5:
                break
        elif not options:
            raise DeadEndAbort(f"walk stuck at node {node} after {visited}")

        if len(options) == 1:
            nxt = options[0]
        else:
            weights = [
                guid[node - 1, s - 1] * (1.0 if (node, s) in covered else FRESH_EDGE_BONUS)
                for s in options
            ]
            nxt = _roulette(options, weights, rng)
        visited.append(nxt)
        seen.add(nxt)
        node = nxt
    return TestSequence(tuple(visited))


def _roulette(options: Sequence[int], weights: Sequence[float], rng) -> int:
    total = float(sum(weights))
    if total <= 0.0:
        # all weights vanished; fall back to a uniform pick
        weights = [1.0] * len(options)
        total = float(len(options))
    u = rng.random() * total
    acc = 0.0
    for opt, w in zip(options, weights):
        acc += w
        if u < acc:
            return opt
    return options[-1]


def draw_sequence(g: StateGraph, guid: np.ndarray, covered, rng,
                  max_attempts: int = MAX_WALK_ATTEMPTS) -> TestSequence:
    """``walk`` with the bounded retry budget for dead-end aborts."""
    for _ in range(max_attempts):
        try:
            return walk(g, guid, covered, rng)
        except DeadEndAbort:
            continue
    raise DeadEndAbort(f"no complete walk in {max_attempts} attempts")


def enumerate_all_sequences(g: StateGraph, max_nodes: int = ORACLE_MAX_NODES) -> PathSuite:
    """Every simple start-to-exit path, by exhaustive DFS, in lexicographic order.

    A path is emitted each time the DFS stands on an exit node, so paths that
    stop at an exit with further successors are included alongside their
    continuations.
    """
    if g.n > max_nodes:
        raise GraphTooLarge(f"{g.n} nodes exceeds oracle limit {max_nodes}")
    found: list[tuple[int, ...]] = []
    path = [g.start]
    on_path = {g.start}

    def dfs(v):
        if v in g.exits:
            found.append(tuple(path))
        for w in g.successors(v):
            if w not in on_path:
                path.append(w)
                on_path.add(w)
                dfs(w)
                on_path.discard(w)
                path.pop()

    dfs(g.start)
    return PathSuite(TestSequence(p) for p in sorted(found))


def prune_redundant(suite: PathSuite, keep_score=None) -> PathSuite:
    """Drop sequences whose transitions are all covered by the rest of the suite.

    Candidates for removal are tried lowest ``keep_score`` first (ties by
    later admission first); the result covers the same edges and no member
    can be dropped without losing coverage.
    """
    seqs = list(suite.sequences)
    order = list(range(len(seqs)))
    if keep_score is not None:
        order.sort(key=lambda i: (keep_score(seqs[i]), -i))
    else:
        order.reverse()
    alive = set(range(len(seqs)))
    for i in order:
        rest: set[Edge] = set()
        for j in alive:
            if j != i:
                rest.update(seqs[j].edges())
        if set(seqs[i].edges()) <= rest:
            alive.discard(i)
    return PathSuite(seqs[i] for i in sorted(alive))


def check_sequence(seq: TestSequence, g: StateGraph) -> None:
    if not seq.is_valid(g):
        raise SeqSwarmError(f"{seq} is not a simple start-to-exit path")

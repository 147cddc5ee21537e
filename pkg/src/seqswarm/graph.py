"""State-transition graphs: model, JSON I/O, validation and matrix views.

Nodes are dense integers ``1..N``. Matrices returned here are ``N x N`` numpy
arrays indexed by ``node - 1``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import (
    DanglingEdge,
    EmptyGraph,
    MalformedDocument,
    NoExitReachable,
    UnreachableNode,
)

Edge = tuple[int, int]


@dataclass(frozen=True)
class StateGraph:
    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]
    start: int
    exits: frozenset[int]
    labels: tuple[str, ...] = ()
    _succ: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(set(self.edges))))
        object.__setattr__(self, "exits", frozenset(self.exits))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(v) for v in self.nodes))
        succ: dict[int, tuple[int, ...]] = {v: () for v in self.nodes}
        for a, b in self.edges:
            succ[a] = succ.get(a, ()) + (b,)
        object.__setattr__(self, "_succ", succ)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def branch_count(self) -> int:
        """Number of edges (transitions)."""
        return len(self.edges)

    def successors(self, node: int) -> tuple[int, ...]:
        return self._succ.get(node, ())

    def out_degree(self, node: int) -> int:
        return len(self._succ.get(node, ()))

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._succ.get(a, ())

    def label(self, node: int) -> str:
        return self.labels[node - 1]


def validate(g: StateGraph) -> StateGraph:
    """Check structural invariants, raising a GraphError subclass on failure."""
    if not g.nodes or not g.edges:
        raise EmptyGraph("graph has no nodes or no edges")
    if tuple(g.nodes) != tuple(range(1, g.n + 1)):
        raise MalformedDocument("node ids must be dense 1..N")
    known = set(g.nodes)
    for a, b in g.edges:
        if a not in known or b not in known:
            raise DanglingEdge(f"edge {a}->{b} references an unknown node")
        if a == b:
            raise MalformedDocument(f"self-loop on node {a}")
    if g.start not in known:
        raise DanglingEdge(f"start node {g.start} is not a node")
    if not g.exits:
        raise MalformedDocument("exit set is empty")
    for x in g.exits:
        if x not in known:
            raise DanglingEdge(f"exit node {x} is not a node")

    reached = _reach(g.start, g.successors)
    missing = sorted(known - reached)
    if missing:
        raise UnreachableNode(f"nodes not reachable from start: {missing}")

    pred: dict[int, list[int]] = {v: [] for v in g.nodes}
    for a, b in g.edges:
        pred[b].append(a)
    co_reached: set[int] = set()
    for x in g.exits:
        co_reached |= _reach(x, lambda v: pred[v])
    stuck = sorted(known - co_reached)
    if stuck:
        raise NoExitReachable(f"nodes that cannot reach an exit: {stuck}")
    return g


def _reach(source, neighbours) -> set[int]:
    seen = {source}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in neighbours(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def build_graph(
    edges: Iterable[Edge],
    start: int,
    exits: Iterable[int],
    n: int | None = None,
    labels: Iterable[str] = (),
) -> StateGraph:
    """Construct and validate a graph whose node ids are already 1..N."""
    edges = [(int(a), int(b)) for a, b in edges]
    if len(set(edges)) != len(edges):
        raise MalformedDocument("duplicate edge")
    if n is None:
        n = max((max(e) for e in edges), default=0)
    g = StateGraph(tuple(range(1, n + 1)), tuple(edges), int(start), frozenset(exits), tuple(labels))
    return validate(g)


def parse_graph(document: str | bytes) -> StateGraph:
    """Parse the JSON graph format.

    Node ids in the document may be any JSON scalars; they are renumbered to
    ``1..N`` following their order in ``nodes``.
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("top-level value must be an object")
    for key in ("nodes", "edges", "start", "exits"):
        if key not in doc:
            raise MalformedDocument(f"missing key {key!r}")

    raw_nodes = doc["nodes"]
    if not isinstance(raw_nodes, list) or not isinstance(doc["edges"], list):
        raise MalformedDocument("'nodes' and 'edges' must be lists")
    if not raw_nodes:
        raise EmptyGraph("graph has no nodes")

    ids: dict = {}
    labels = []
    for item in raw_nodes:
        if isinstance(item, dict):
            if "id" not in item:
                raise MalformedDocument("node object without 'id'")
            key, label = item["id"], item.get("label")
        else:
            key, label = item, None
        if isinstance(key, (list, dict)) or key in ids:
            raise MalformedDocument(f"bad or duplicate node id {key!r}")
        ids[key] = len(ids) + 1
        labels.append(str(label) if label is not None else str(key))

    def lookup(key, what):
        try:
            return ids[key]
        except (KeyError, TypeError):
            raise DanglingEdge(f"{what} references unknown node {key!r}") from None

    edges = []
    for e in doc["edges"]:
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise MalformedDocument(f"edge must be a [from, to] pair, got {e!r}")
        edges.append((lookup(e[0], "edge"), lookup(e[1], "edge")))
    if not edges:
        raise EmptyGraph("graph has no edges")
    if not isinstance(doc["exits"], list):
        raise MalformedDocument("'exits' must be a list")
    start = lookup(doc["start"], "start")
    exits = [lookup(x, "exit") for x in doc["exits"]]
    return build_graph(edges, start, exits, n=len(ids), labels=labels)


def serialize_graph(g: StateGraph) -> str:
    doc = {
        "nodes": [{"id": v, "label": g.label(v)} for v in g.nodes],
        "edges": [list(e) for e in g.edges],
        "start": g.start,
        "exits": sorted(g.exits),
    }
    return json.dumps(doc, indent=2)


def load_graph(source: str) -> StateGraph:
    """Load from a file path, or return the builtin fixture for ``"atm"``."""
    if source == "atm":
        return atm_fixture()
    with open(source, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def predicate_nodes(g: StateGraph) -> frozenset[int]:
    """Decision nodes, i.e. nodes with more than one outgoing transition."""
    return frozenset(v for v in g.nodes if g.out_degree(v) > 1)


def adjacency_matrix(g: StateGraph) -> np.ndarray:
    adj = np.zeros((g.n, g.n), dtype=bool)
    for a, b in g.edges:
        adj[a - 1, b - 1] = True
    return adj


def init_guidance(g: StateGraph) -> np.ndarray:
    return adjacency_matrix(g).astype(float)


def edges_from_adjacency(adj: np.ndarray) -> list[Edge]:
    rows, cols = np.nonzero(adj)
    return [(int(r) + 1, int(c) + 1) for r, c in zip(rows, cols)]


ATM_EDGES: tuple[Edge, ...] = (
    (1, 2), (2, 3), (2, 4), (2, 7), (3, 4), (3, 5), (3, 7),
    (4, 7), (4, 8), (5, 6), (5, 7), (6, 7), (7, 8),
)

ATM_LABELS = (
    "Idle / card inserted",
    "PIN verified, awaiting request",
    "Transaction details sent",
    "Amount entered",
    "Transaction approved",
    "Cash and receipt dispensed",
    "Transaction complete, another transaction?",
    "Card ejected",
)


def atm_fixture() -> StateGraph:
    """The 8-state ATM one-transaction diagram, exits at states 7 and 8."""
    return build_graph(ATM_EDGES, start=1, exits=(7, 8), n=8, labels=ATM_LABELS)

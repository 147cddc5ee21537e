import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seqswarm.errors import (
    DanglingEdge,
    EmptyGraph,
    MalformedDocument,
    NoExitReachable,
    UnreachableNode,
)
from seqswarm.graph import (
    ATM_EDGES,
    adjacency_matrix,
    atm_fixture,
    edges_from_adjacency,
    init_guidance,
    load_graph,
    parse_graph,
    predicate_nodes,
    serialize_graph,
)
from seqswarm.paths import TestSequence

from .conftest import TABLE2_PATHS, random_graph


def doc(nodes, edges, start, exits):
    return json.dumps({"nodes": nodes, "edges": edges, "start": start, "exits": exits})


def test_atm_shape(atm):
    assert atm.n == 8
    assert atm.branch_count == 13
    assert atm.start == 1
    assert atm.exits == {7, 8}
    assert predicate_nodes(atm) == {2, 3, 4, 5}


def test_table2_paths_valid_on_fixture(atm):
    for p in TABLE2_PATHS:
        assert TestSequence.parse(p).is_valid(atm), p


def test_fixture_edges_are_union_of_table2_paths():
    union = set()
    for p in TABLE2_PATHS:
        union |= set(TestSequence.parse(p).edges())
    assert union == set(ATM_EDGES)


def test_parse_atm_document_roundtrip(atm):
    g = parse_graph(serialize_graph(atm))
    assert g == atm
    assert g.labels == atm.labels


def test_serializer_key_order(atm):
    assert list(json.loads(serialize_graph(atm))) == ["nodes", "edges", "start", "exits"]


def test_parser_is_key_order_insensitive():
    text = json.dumps({"exits": [2], "start": 1, "edges": [[1, 2]], "nodes": [{"id": 1}, {"id": 2}]})
    g = parse_graph(text)
    assert g.edges == ((1, 2),) and g.exits == {2}


def test_single_edge_document():
    g = parse_graph(doc([{"id": 1}, {"id": 2}], [[1, 2]], 1, [2]))
    assert g.n == 2 and g.edges == ((1, 2),)


def test_renumbering_preserves_input_order():
    g = parse_graph(doc([{"id": "idle", "label": "Idle"}, {"id": 40}, {"id": 7}],
                        [["idle", 40], [40, 7]], "idle", [7]))
    assert g.nodes == (1, 2, 3)
    assert g.edges == ((1, 2), (2, 3))
    assert g.labels == ("Idle", "40", "7")


def test_bare_node_ids_accepted():
    g = parse_graph(doc([5, 6], [[5, 6]], 5, [6]))
    assert g.edges == ((1, 2),)


def test_dangling_edge():
    nodes = [{"id": i} for i in range(1, 9)]
    with pytest.raises(DanglingEdge):
        parse_graph(doc(nodes, [[1, 2], [3, 9]], 1, [2]))


@pytest.mark.parametrize("text, exc", [
    ("{not json", MalformedDocument),
    ("[1, 2]", MalformedDocument),
    (json.dumps({"nodes": [], "edges": [], "start": 1, "exits": [1]}), EmptyGraph),
    (doc([{"id": 1}, {"id": 2}], [], 1, [2]), EmptyGraph),
    (doc([{"id": 1}, {"id": 2}], [[1, 2]], 1, []), MalformedDocument),
    (doc([{"id": 1}, {"id": 2}], [[1, 1], [1, 2]], 1, [2]), MalformedDocument),
    (doc([{"id": 1}, {"id": 2}], [[1, 2], [1, 2]], 1, [2]), MalformedDocument),
    (doc([{"id": 1}, {"id": 1}], [[1, 2]], 1, [2]), MalformedDocument),
    (doc([{"id": 1}, {"id": 2}, {"id": 3}], [[1, 2]], 1, [2]), UnreachableNode),
    (doc([{"id": 1}, {"id": 2}, {"id": 3}], [[1, 2], [1, 3]], 1, [2]), NoExitReachable),
    (doc([{"id": 1}, {"id": 2}], [[1, 2]], 1, [9]), DanglingEdge),
    (json.dumps({"nodes": [{"id": 1}], "edges": []}), MalformedDocument),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_graph(text)


def test_predicate_nodes_small(chain, star):
    assert predicate_nodes(chain) == frozenset()
    assert predicate_nodes(star) == {1}


def test_adjacency(atm):
    adj = adjacency_matrix(atm)
    assert adj.shape == (8, 8) and adj.dtype == bool
    assert adj.sum() == 13
    assert sorted(edges_from_adjacency(adj)) == sorted(ATM_EDGES)
    out_deg = adj.sum(axis=1)
    in_deg = adj.sum(axis=0)
    for v in atm.nodes:
        assert out_deg[v - 1] == atm.out_degree(v)
        assert in_deg[v - 1] == sum(1 for a, b in atm.edges if b == v)


def test_adjacency_single_edge():
    g = parse_graph(doc([1, 2], [[1, 2]], 1, [2]))
    adj = adjacency_matrix(g)
    assert adj[0, 1] and adj.sum() == 1


def test_init_guidance(atm):
    guid = init_guidance(atm)
    assert np.count_nonzero(guid == 1.0) == 13
    assert ((guid > 0) == adjacency_matrix(atm)).all()


def test_load_graph_builtin_and_file(tmp_path, atm):
    assert load_graph("atm") == atm
    f = tmp_path / "g.json"
    f.write_text(serialize_graph(atm))
    assert load_graph(str(f)) == atm


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_graph_properties_on_random_graphs(seed):
    g = random_graph(np.random.default_rng(seed))
    adj = adjacency_matrix(g)
    assert len(predicate_nodes(g)) == int((adj.sum(axis=1) >= 2).sum())
    assert ((init_guidance(g) > 0) == adj).all()
    assert parse_graph(serialize_graph(g)) == g

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lampar.core import AxiomSchema, TermError
from lampar.properties import communication_pairs
from lampar.topology import (
    TopologyGraph,
    all_reflexive_graphs,
    extract_axiom,
    format_schema,
    nu_header,
    outlinked,
    ring_schema,
    schema_to_graph,
    validate_graph,
)

EXAMPLE = TopologyGraph.build(4, {(1, 2), (2, 1), (1, 3), (2, 3), (4, 1)})


def test_example_graph_axiom():
    s = extract_axiom(EXAMPLE)
    assert s.outlinks == ((2, 4), (1,), (1, 2), None)
    assert format_schema(s) == r"(A1 -> A1 /\ A2 /\ A4) \/ (A2 -> A2 /\ A1) \/ (A3 -> A3 /\ A1 /\ A2) \/ (A4 -> A4 /\ Bot)"
    assert nu_header(s) == "nu a : {1: A1 ~ [2, 4]; 2: A2 ~ [1]; 3: A3 ~ [1, 2]; 4: A4 ~ []} ."


def test_only_self_loops_give_falsity():
    s = extract_axiom(TopologyGraph.build(2, set()))
    assert s.outlinks == (None, None)


def test_outlinked_follows_edges():
    s = extract_axiom(EXAMPLE)
    assert outlinked(s, 4, 1)
    assert not outlinked(s, 1, 4)
    with pytest.raises(TermError):
        outlinked(s, 2, 2)


def test_ring_schema_is_a_ring():
    assert schema_to_graph(ring_schema(3)) == TopologyGraph.build(3, {(1, 2), (2, 3), (3, 1)})


def test_validation_reports_problems():
    g = TopologyGraph(2, frozenset({(1, 1), (1, 3)}))
    kinds = sorted(d.kind for d in validate_graph(g))
    assert kinds == ["missing-self-loop", "out-of-range"]
    assert validate_graph(EXAMPLE) == []
    assert [d.kind for d in validate_graph(TopologyGraph(0, frozenset()))] == ["empty"]


def test_extract_rejects_invalid_graphs():
    with pytest.raises(TermError):
        extract_axiom(TopologyGraph(2, frozenset({(1, 2)})))


def test_graph_counts():
    assert [sum(1 for _ in all_reflexive_graphs(k)) for k in (1, 2, 3)] == [1, 4, 64]


def test_example_communications_match_edges():
    assert communication_pairs(EXAMPLE) == {(1, 2), (2, 1), (1, 3), (2, 3), (4, 1)}


@st.composite
def graphs(draw):
    k = draw(st.integers(1, 7))
    pairs = [(s, d) for s in range(1, k + 1) for d in range(1, k + 1) if s != d]
    chosen = draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    return TopologyGraph.build(k, chosen)


@settings(max_examples=200, deadline=None)
@given(graphs())
def test_round_trip_on_larger_graphs(g):
    assert schema_to_graph(extract_axiom(g)) == g


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_communication_iff_edge_on_larger_graphs(g):
    assert communication_pairs(g) == {(s, d) for s, d in g.edges if s != d}


def test_schema_to_graph_is_reflexive():
    g = schema_to_graph(AxiomSchema.of(None, [1], [1, 2]))
    assert {(n, n) for n in (1, 2, 3)} <= g.edges

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from invcent import (DiGraph, GraphError, giant_scc_subgraph, is_strongly_connected, parse_edge_list,
                     strongly_connected_components, to_dot)

from oracles import brute_sccs, brute_strongly_connected


def test_parse_four_node_example():
    g = parse_edge_list("1 2\n2 3\n3 4\n4 1\n4 2")
    assert g.n == 4 and g.m == 5
    assert g.arcs == ((1, 2), (2, 3), (3, 4), (4, 1), (4, 2))
    assert g.back_star(2) == (1, 4)
    assert np.all(g.weights == 1.0)


def test_parse_reorders_row_major_and_keeps_weights():
    g = parse_edge_list("# comment\n3 1 0.5\n\n1 3 2\n1 2\n2 3 1.5\n")
    assert g.arcs == ((1, 2), (1, 3), (2, 3), (3, 1))
    assert list(g.weights) == [1.0, 2.0, 1.5, 0.5]


@pytest.mark.parametrize("text, match", [
    ("", "empty"),
    ("# nothing\n", "empty"),
    ("1 2\n1 2", "duplicate"),
    ("1 1", "self-loop"),
    ("1 2\n2 x", "line 2"),
    ("1 2 3 4", "line 1"),
    ("0 1", "1-based"),
])
def test_parse_errors(text, match):
    with pytest.raises(GraphError, match=match):
        parse_edge_list(text)


def test_from_arcs_rejects_duplicates():
    with pytest.raises(GraphError):
        DiGraph.from_arcs([(1, 2), (2, 1), (1, 2)])


def test_scc_examples(graph4, graph8):
    assert strongly_connected_components(graph4).components == (frozenset({1, 2, 3, 4}),)
    assert len(strongly_connected_components(graph8)) == 1
    bridged = parse_edge_list("1 2\n2 1\n3 4\n4 3\n2 3")
    part = strongly_connected_components(bridged)
    assert part.components == (frozenset({1, 2}), frozenset({3, 4}))
    assert part.component_of == {1: 0, 2: 0, 3: 1, 4: 1}
    assert part.giant_index == 0  # tie broken by smallest node id


def test_is_strongly_connected_examples(graph8):
    assert is_strongly_connected(graph8)
    assert is_strongly_connected(parse_edge_list("1 2\n2 1"))
    assert not is_strongly_connected(parse_edge_list("1 2\n2 3"))


def test_giant_scc_identity_on_scc(graph8):
    sub, relabel = giant_scc_subgraph(graph8)
    assert sub.arcs == graph8.arcs
    assert relabel == {i: i for i in range(1, 9)}


def test_giant_scc_drops_pendant():
    sub, relabel = giant_scc_subgraph(parse_edge_list("1 2\n2 3\n3 1\n3 4"))
    assert sub.n == 3 and sub.arcs == ((1, 2), (2, 3), (3, 1))
    assert relabel == {1: 1, 2: 2, 3: 3}


def test_giant_scc_picks_larger_component():
    # {1,2} 2-cycle, {3,4,5} 3-cycle, linked by 2 -> 3
    g = parse_edge_list("1 2\n2 1\n2 3\n3 4\n4 5\n5 3")
    assert [set(cm) for cm in brute_sccs(g)] == [{1, 2}, {3, 4, 5}]
    sub, relabel = giant_scc_subgraph(g)
    assert relabel == {3: 1, 4: 2, 5: 3}
    assert sub.arcs == ((1, 2), (2, 3), (3, 1))


def test_giant_scc_needs_two_nodes():
    with pytest.raises(GraphError):
        giant_scc_subgraph(parse_edge_list("1 2\n2 3"))


def test_deep_path_has_no_recursion_limit():
    n = 5000
    g = DiGraph.from_arcs([(i, i + 1) for i in range(1, n)] + [(n, 1)])
    assert is_strongly_connected(g)


def test_dot_export(graph4):
    text = to_dot(graph4, [0.5, 1, 1, 1, 2.25], highlight_tol=1e-6)
    assert text.startswith("digraph {")
    assert '1 -> 2 [label="0.5000", color=red];' in text
    assert '2 -> 3 [label="1.0000"];' in text


@st.composite
def digraphs(draw):
    n = draw(st.integers(1, 8))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return DiGraph.from_arcs(chosen, n=n)


@settings(max_examples=200, deadline=None)
@given(digraphs())
def test_scc_matches_reachability(g):
    part = strongly_connected_components(g)
    assert list(part.components) == brute_sccs(g)
    assert set().union(*part.components) == set(range(1, g.n + 1))
    assert sum(len(cm) for cm in part.components) == g.n
    assert is_strongly_connected(g) == brute_strongly_connected(g)


@settings(max_examples=100, deadline=None)
@given(digraphs())
def test_arc_order_is_row_major(g):
    assert list(g.arcs) == sorted(g.arcs)
    for j in range(1, g.n + 1):
        assert set(g.back_star(j)) == {t for t, h in g.arcs if h == j}

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from lbx.errors import DuplicateIdentifier, ImproperColoring, MissingOrder, ParseError, UnknownNode
from lbx.graph_core import (
    Edge,
    build_graph,
    decode_graph,
    degree,
    encode_graph,
    is_simple,
    is_tree_ignoring_loops,
    loops_at,
    make_graph,
    validate,
)
from lbx.covers import unfold_loop

from gen import random_ec_graph


def base(delta):
    return make_graph("EC", [(0, 0, c) for c in range(1, delta + 1)], nodes=[0])


def test_smallest_ec_graph():
    g = build_graph({"model": "EC", "nodes": [0, 1], "edges": [{"u": 0, "v": 1, "color": 1}]})
    assert g.max_degree == 1


def test_two_loops_same_color_rejected():
    with pytest.raises(ImproperColoring):
        make_graph("EC", [(0, 0, 1), (0, 0, 1)])


def test_po_out_colors_distinct():
    with pytest.raises(ImproperColoring):
        make_graph("PO", [(0, 1, 2), (0, 2, 2)])


def test_po_in_and_out_may_share_color():
    g = make_graph("PO", [(0, 1, 1), (2, 0, 1)])
    assert degree(g, 0) == 2


def test_degree_conventions():
    # EC loops count once, a PO loop counts twice (head and tail)
    assert degree(make_graph("EC", [(0, 0, 1), (0, 0, 2)]), 0) == 2
    assert degree(make_graph("PO", [(0, 0, 1), (1, 0, 2)]), 0) == 3
    assert degree(make_graph("EC", [], nodes=[0]), 0) == 0


def test_loops_at():
    assert loops_at(base(3), 0) == [1, 2, 3]
    g = random_ec_graph(random.Random(0), 6, 3)
    assert all(loops_at(g, v) == [] for v in g.nodes)
    GG, _ = unfold_loop(base(3), 0 + 1)  # eid 1 is the color-2 loop
    assert [loops_at(GG, v) for v in GG.nodes] == [[1, 3], [1, 3]]


def test_tree_ignoring_loops():
    assert is_tree_ignoring_loops(base(4))
    cycle = make_graph("EC", [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 2)])
    assert not is_tree_ignoring_loops(cycle)


def test_id_and_oi_validation():
    with pytest.raises(DuplicateIdentifier):
        make_graph("ID", [(0, 1, 1)], labels={0: 5, 1: 5})
    with pytest.raises(MissingOrder):
        make_graph("OI", [(0, 1, 1)], order=[0])
    assert make_graph("OI", [(0, 1, 1)], order=[1, 0]).rank == {1: 0, 0: 1}


def test_edge_to_absent_node():
    with pytest.raises(UnknownNode):
        make_graph("EC", [Edge(0, 0, 7, 1)], nodes=[0])
    doc = {"model": "EC", "k": 1, "nodes": [{"id": 0}], "edges": [{"u": 0, "v": 7, "color": 1}]}
    with pytest.raises(ParseError) as info:
        decode_graph(json.dumps(doc))
    assert "absent node" in str(info.value)


def test_decode_reports_location():
    with pytest.raises(ParseError) as info:
        decode_graph('{"model": "EC", "k": 1,\n "nodes": [}')
    assert "line 2" in str(info.value)


def test_base_graph_document():
    doc = {"model": "EC", "k": 3, "nodes": [{"id": 0}],
           "edges": [{"u": 0, "v": 0, "color": c, "directed": False} for c in (1, 2, 3)]}
    g = decode_graph(json.dumps(doc))
    assert degree(g, 0) == 3


def test_validate_lists_every_problem():
    g = make_graph("EC", [(0, 1, 1)])
    assert validate(g) == []


def test_simple():
    assert is_simple(make_graph("PO", [(0, 1, 1), (1, 0, 1)]))  # antiparallel arcs are fine
    assert not is_simple(make_graph("EC", [(0, 1, 1), (0, 1, 2)]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8), st.integers(1, 4), st.booleans())
def test_round_trip(seed, n, k, loops):
    g = random_ec_graph(random.Random(seed), n, k, loops=loops)
    h = decode_graph(encode_graph(g))
    assert h == g
    assert encode_graph(h) == encode_graph(g)

import random

import pytest
from hypothesis import given, settings, strategies as st

from lbx.covers import (
    CoveringMap,
    factor_graph,
    loopiness,
    random_simple_lift,
    universal_cover_ball,
    unfold_loop,
    verify_covering,
)
from lbx.errors import Disconnected, InfeasibleLift, NotALoop
from lbx.graph_core import Edge, degree, is_simple, loops_at, make_graph
from lbx.locality import canonical_code, neighborhood

from gen import non_backtracking_walks, random_ec_graph, random_loopy_base


def base(delta):
    return make_graph("EC", [(0, 0, c) for c in range(1, delta + 1)], nodes=[0])


CYCLE4 = make_graph("EC", [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 2)])


def test_unfold_fold_map_is_covering():
    GG, m = unfold_loop(base(3), 1)
    assert verify_covering(m) == []


def test_degree_mismatch_detected():
    path = make_graph("EC", [(0, 1, 1), (1, 2, 2)])
    k2 = make_graph("EC", [(0, 1, 1)])
    m = CoveringMap(k2, path, {0: 0, 1: 1}, {0: 0})
    kinds = {k for k, _ in verify_covering(m)}
    assert "DegreeMismatch" in kinds


def test_cycle_covers_double_loop():
    target = make_graph("EC", [(0, 0, 1), (0, 0, 2)])
    m = CoveringMap(CYCLE4, target, {v: 0 for v in range(4)}, {0: 0, 1: 1, 2: 0, 3: 1})
    assert verify_covering(m) == []


def test_cover_ball_of_tree_is_the_tree():
    tree = make_graph("EC", [(0, 1, 1), (1, 2, 2), (1, 3, 3), (3, 4, 1)])
    for v in tree.nodes:
        for r in range(4):
            assert canonical_code(universal_cover_ball(tree, v, r)) == canonical_code(neighborhood(tree, v, r))


def test_cover_ball_of_cycle_is_path():
    ball = universal_cover_ball(CYCLE4, 0, 2).materialize()
    path = make_graph("EC", [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 4, 2)])
    assert len(ball.graph.nodes) == 5
    assert canonical_code(ball) == canonical_code(neighborhood(path, 2, 2))


def test_cover_ball_of_loop_is_an_edge():
    ball = universal_cover_ball(make_graph("EC", [(0, 0, 1)]), 0, 1).materialize()
    assert len(ball.graph.nodes) == 2 and [e.color for e in ball.graph.edges] == [1]


def test_cover_ball_disconnected():
    g = make_graph("EC", [(0, 1, 1)], nodes=[0, 1, 2])
    with pytest.raises(Disconnected):
        universal_cover_ball(g, 0, 1)


@pytest.mark.parametrize("seed", range(20))
def test_cover_ball_size_matches_walk_count(seed):
    rng = random.Random(seed)
    g = random_loopy_base(rng, rng.randint(1, 3), 4, 4)
    r = rng.randint(0, 4)
    assert len(universal_cover_ball(g, 0, r).nodes()) == non_backtracking_walks(g, 0, r)


def test_factor_graph_examples():
    F, m = factor_graph(CYCLE4)
    assert len(F.nodes) == 1 and loops_at(F, F.nodes[0]) == [1, 2]
    assert verify_covering(m) == []
    F, m = factor_graph(make_graph("EC", [(0, 1, 1)]))
    assert len(F.nodes) == 1 and loops_at(F, F.nodes[0]) == [1]


def test_factor_graph_fig3_ec():
    # 4-cycle with alternating colors: every node has degree 2 and collapses to one node with two loops
    F, _ = factor_graph(CYCLE4)
    assert [degree(F, v) for v in F.nodes] == [2]


def test_factor_graph_fig3_po():
    # a directed color-1 cycle with a color-2 pendant arc out of every cycle node
    edges = [(i, (i + 1) % 3, 1) for i in range(3)] + [(i, 3 + i, 2) for i in range(3)]
    F, m = factor_graph(make_graph("PO", edges))
    assert verify_covering(m) == []
    assert len(F.nodes) == 2
    hub = m.node_map[0]
    assert degree(F, hub) == 3
    assert [e.color for e in F.edges if e.is_loop] == [1]


def test_loopiness_examples():
    assert loopiness(base(5)) == 5
    assert loopiness(make_graph("EC", [(0, 1, 1)])) == 1
    assert loopiness(make_graph("EC", [(0, 1, 1), (1, 2, 2)])) == 0


def test_unfold_examples():
    GG, m = unfold_loop(base(3), 1)
    assert len(GG.nodes) == 2
    assert [loops_at(GG, v) for v in GG.nodes] == [[1, 3], [1, 3]]
    joins = [e for e in GG.edges if not e.is_loop]
    assert len(joins) == 1 and joins[0].color == 2
    K2, _ = unfold_loop(make_graph("EC", [(0, 0, 1)]), 0)
    assert is_simple(K2) and len(K2.edges) == 1
    with pytest.raises(NotALoop):
        unfold_loop(make_graph("EC", [(0, 1, 1), (1, 1, 2)]), 0)


def test_simple_lift_examples():
    H, m = random_simple_lift(make_graph("EC", [(0, 0, 1)]), 2, seed=0)
    assert len(H.nodes) == 2 and len(H.edges) == 1
    H, m = random_simple_lift(base(3), 4, seed=3)
    assert is_simple(H) and verify_covering(m) == []
    assert len(H.edges) == 6 and all(degree(H, v) == 3 for v in H.nodes)  # K4
    with pytest.raises(InfeasibleLift):
        random_simple_lift(base(3), 2, seed=0)


def test_simple_lift_deterministic():
    a = random_simple_lift(base(3), 4, seed=11)
    b = random_simple_lift(base(3), 4, seed=11)
    assert a[0] == b[0] and a[1].node_map == b[1].node_map


def test_lift_has_edge_between_preimages_of_looped_node():
    H, m = random_simple_lift(base(2), 4, seed=5)
    assert any(m.node_map[e.u] == m.node_map[e.v] for e in H.edges)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_random_lifts_verify(seed):
    rng = random.Random(seed)
    g = random_loopy_base(rng, rng.randint(1, 3), 4, 4)
    loops = max(len(loops_at(g, v)) for v in g.nodes)
    copies = loops + 1 + (loops + 1) % 2
    H, m = random_simple_lift(g, copies, seed)
    assert is_simple(H)
    assert verify_covering(m) == []
    assert len(H.nodes) == copies * len(g.nodes)
    for v in H.nodes:
        code_h = canonical_code(universal_cover_ball(H, v, 3))
        code_g = canonical_code(universal_cover_ball(g, m.node_map[v], 3))
        assert code_h == code_g


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_factor_graph_idempotent(seed):
    g = random_ec_graph(random.Random(seed), 6, 3, loops=True, connected=True)
    F, m = factor_graph(g)
    assert verify_covering(m) == []
    F2, m2 = factor_graph(F)
    assert len(F2.nodes) == len(F.nodes) and len(F2.edges) == len(F.edges)
    assert verify_covering(m2) == []


def test_po_directed_loop_lift():
    g = make_graph("PO", [(0, 0, 1), (0, 0, 2)])
    H, m = random_simple_lift(g, 3, seed=1)
    assert is_simple(H) and verify_covering(m) == []
    assert all(degree(H, v) == 4 for v in H.nodes)


def test_covering_map_doc_round_trip():
    from lbx.covers import covering_from_doc
    GG, m = unfold_loop(base(3), 1)
    again = covering_from_doc(GG, base(3), m.doc())
    assert again.node_map == m.node_map and again.edge_map == m.edge_map


def test_bad_edge_map_reported():
    GG, m = unfold_loop(base(2), 0)
    bad = CoveringMap(GG, base(2), m.node_map, {**m.edge_map, 0: 1})
    assert verify_covering(bad)


def test_edge_record_lift_of_parallel_edges():
    g = make_graph("EC", [Edge(0, 0, 1, 1), Edge(1, 0, 1, 2)])
    with pytest.raises(InfeasibleLift):
        random_simple_lift(g, 1, 0)
    H, m = random_simple_lift(g, 2, 0)
    assert is_simple(H) and verify_covering(m) == []


def test_loops_and_edges_fold_together():
    # every node sees one color-1 and one color-2 edge: a 3-lift of the bouquet
    path = make_graph("EC", [(0, 0, 1), (0, 1, 2), (1, 2, 1), (2, 2, 2)])
    F, m = factor_graph(path)
    assert F.nodes == (0,) and loops_at(F, 0) == [1, 2]
    assert verify_covering(m) == []

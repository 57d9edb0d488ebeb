import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from lbx.algo_zoo import greedy_by_color, halving_greedy, id_greedy, resolve, truncate, uniform_regular
from lbx.errors import NotTruncatable, UnknownAlgorithm, ViewTooShallow
from lbx.fracmatch import check_maximal_fm
from lbx.graph_core import make_graph, remove_edge, with_model
from lbx.locality import CoverView, assemble_fm, evaluate
from lbx.simulations import double_graph

from gen import random_ec_graph, sequential_greedy

G0 = make_graph("EC", [(0, 0, c) for c in (1, 2, 3)], k=3)


def test_greedy_small_examples():
    assert assemble_fm(greedy_by_color(1), make_graph("EC", [(0, 1, 1)])).weights == {0: 1}
    path = make_graph("EC", [(0, 1, 1), (1, 2, 2)])
    assert assemble_fm(greedy_by_color(2), path).weights == sequential_greedy(path) == {0: 1, 1: 0}


def test_greedy_rejects_shallow_view():
    with pytest.raises(ViewTooShallow):
        greedy_by_color(3)(CoverView(G0, 0, 2))


def test_uniform_examples():
    cycle = make_graph("EC", [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 2)])
    rep = check_maximal_fm(cycle, assemble_fm(uniform_regular(2), cycle))
    assert rep.ok and rep.saturated == {0, 1, 2, 3}
    k2 = make_graph("EC", [(0, 1, 1)])
    y = assemble_fm(uniform_regular(2), k2)
    assert y.weights == {0: F(1, 2)} and not check_maximal_fm(k2, y).maximal
    star = make_graph("EC", [(0, 1, 1), (0, 2, 2), (0, 3, 3)])
    rep = check_maximal_fm(star, assemble_fm(uniform_regular(2), star))
    assert ("Infeasible", 0) in rep.violations


def test_truncation_examples():
    t = truncate(greedy_by_color(3), 1)
    assert [w for _, w in evaluate(t, G0, 0).items] == [1, 0, 0]
    h0 = remove_edge(G0, 0)
    out = evaluate(t, h0, 0)
    assert out.total() == 0
    with pytest.raises(NotTruncatable):
        truncate(greedy_by_color(3), 3)
    with pytest.raises(NotTruncatable):
        truncate(uniform_regular(3), 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 9), st.integers(1, 5), st.booleans())
def test_greedy_matches_oracle(seed, n, k, loops):
    g = random_ec_graph(random.Random(seed), n, k, loops=loops)
    y = assemble_fm(greedy_by_color(k), g)
    assert y.weights == sequential_greedy(g)
    assert check_maximal_fm(g, y).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_greedy_ignores_identifiers(seed):
    rng = random.Random(seed)
    g = random_ec_graph(rng, 7, 3)
    labels = dict(zip(g.nodes, rng.sample(range(1000), len(g.nodes))))
    as_id = with_model(g, "ID", labels=labels)
    a = assemble_fm(greedy_by_color(3), g).weights
    b = assemble_fm(id_greedy(3), as_id).weights
    # id-greedy halves only directed slots, so on undirected ID graphs it equals EC greedy
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_halving_reproduces_greedy_on_doubled_graph(seed):
    g = random_ec_graph(random.Random(seed), 7, 4, loops=True)
    ec = assemble_fm(greedy_by_color(4), g).weights
    po = assemble_fm(halving_greedy(4), double_graph(g)).weights
    for e in g.edges:
        back = po[2 * e.eid] * 2 if e.is_loop else po[2 * e.eid] + po[2 * e.eid + 1]
        assert back == ec[e.eid]


def test_halving_feasible_on_arbitrary_po():
    rng = random.Random(4)
    for _ in range(20):
        edges, used = [], set()
        for _ in range(12):
            u, v, c = rng.randrange(6), rng.randrange(6), rng.randint(1, 3)
            if (u, c, "o") in used or (v, c, "i") in used:
                continue
            used |= {(u, c, "o"), (v, c, "i")}
            edges.append((u, v, c))
        g = make_graph("PO", edges, nodes=range(6), k=3)
        assert check_maximal_fm(g, assemble_fm(halving_greedy(3), g)).feasible


def test_registry():
    assert resolve("greedy:k=8").name == "greedy:k=8"
    assert resolve("uniform:d=3").name == "uniform:d=3"
    assert resolve("trunc:greedy:k=8:t=3").runtime(8, 8) == 3
    assert resolve("chain:k=3").model == "EC"
    with pytest.raises(UnknownAlgorithm):
        resolve("bogus:k=1")
    with pytest.raises(UnknownAlgorithm):
        resolve("greedy:k=0")

import json

import pytest

from lbx.adversary import (
    FailureWitness,
    LowerBoundCertificate,
    adversary_step,
    base_case,
    certificate_from_doc,
    mix,
    run_adversary,
    verify_certificate,
    verify_pair,
)
from lbx.algo_zoo import greedy_by_color, truncate, uniform_regular, zero_algorithm
from lbx.errors import ColorMismatch, GuardrailExceeded, NotALoop, PaletteTooSmall
from lbx.fracmatch import check_maximal_fm
from lbx.graph_core import degree, is_simple, is_tree_ignoring_loops, loops_at, make_graph, remove_edge, shift_nodes


def test_base_case_delta3():
    pair = base_case(greedy_by_color(3), 3)
    assert [w for _, w in pair.out_g.items] == [1, 0, 0]
    assert loops_at(pair.H, 0) == [2, 3]
    assert [w for _, w in pair.out_h.items] == [1, 0]
    assert pair.c == 2


def test_base_case_delta2():
    pair = base_case(greedy_by_color(2), 2)
    assert [w for _, w in pair.out_g.items] == [1, 0]
    assert [w for _, w in pair.out_h.items] == [1]
    assert pair.c == 2


def test_base_case_zero_algorithm():
    w = base_case(zero_algorithm(), 3)
    assert isinstance(w, FailureWitness)
    assert is_simple(w.graph)
    assert w.violation["kind"] == "UnsaturatedEdge"
    assert w.violation["y_u"] == w.violation["y_v"] == "0"


def test_base_case_palette():
    with pytest.raises(PaletteTooSmall):
        base_case(greedy_by_color(2), 3)


def test_mix_example():
    G = make_graph("EC", [(0, 0, c) for c in (1, 2, 3)], k=3)
    H = shift_nodes(make_graph("EC", [(0, 0, c) for c in (2, 3)], k=3), 1)
    GH = mix(G, 1, H, 0)
    assert loops_at(GH, 0) == [1, 3] and loops_at(GH, 1) == [3]
    assert [(e.u, e.v, e.color) for e in GH.edges if not e.is_loop] == [(0, 1, 2)]
    assert degree(GH, 0) == degree(G, 0) and degree(GH, 1) == degree(H, 1)
    with pytest.raises(ColorMismatch):
        mix(G, 0, H, 0)
    with pytest.raises(NotALoop):
        mix(GH, 1, H, 0)  # eid 1 is now the joining edge


def test_step_zero_delta3():
    A = greedy_by_color(3)
    pair = base_case(A, 3)
    nxt = adversary_step(A, pair)
    assert nxt.branch == "H"
    assert nxt.g == 0 and nxt.h == 1  # h, and its copy inside the mixed graph
    assert nxt.c == 3
    assert len(nxt.G.nodes) == 2 * len(pair.H.nodes)
    assert len(nxt.H.nodes) == len(pair.G.nodes) + len(pair.H.nodes)
    assert is_tree_ignoring_loops(nxt.H)


@pytest.mark.parametrize("delta", [2, 3, 4, 5, 6])
def test_greedy_certificates(delta):
    cert = run_adversary(greedy_by_color(delta), delta)
    assert isinstance(cert, LowerBoundCertificate)
    assert len(cert.pairs) == delta - 1 and cert.min_runtime == delta - 1
    for p in cert.pairs:
        assert all(p.checks.values())
        assert len(p.G.nodes) <= 2 ** p.i and len(p.H.nodes) <= 2 ** p.i


def test_truncated_greedy_fails():
    w = run_adversary(truncate(greedy_by_color(3), 1), 3)
    assert isinstance(w, FailureWitness)
    assert is_simple(w.graph)
    a, b = w.violation["preimage_of"]
    assert a == b
    assert not check_maximal_fm(w.graph, w.fm).maximal


def test_uniform_on_loops_saturates_then_fails_later():
    # uniform(Δ) saturates G0 but not H0 (one loop fewer)
    w = run_adversary(uniform_regular(3), 3)
    assert isinstance(w, FailureWitness)


def test_verify_pair_negative_controls():
    A = greedy_by_color(4)
    cert = run_adversary(A, 4)
    p = cert.pairs[1]
    tampered = type(p)(**{**p.__dict__, "c": 1})
    assert not verify_pair(A, tampered, 4)["P1_outputs"]
    too_few = type(p)(**{**p.__dict__, "G": remove_edge(p.G, p.G.edges[0].eid)})
    assert not all(verify_pair(A, too_few, 4).values())
    assert not verify_pair(A, p, 6)["P2_loops"]


def test_certificate_round_trip_and_determinism():
    A = greedy_by_color(5)
    a = run_adversary(A, 5).encode()
    b = run_adversary(greedy_by_color(5), 5).encode()
    assert a == b
    cert = certificate_from_doc(json.loads(a))
    assert all(all(checks.values()) for _, checks in verify_certificate(A, cert))


def test_guardrail(monkeypatch):
    with pytest.raises(GuardrailExceeded):
        run_adversary(greedy_by_color(15), 15)
    monkeypatch.setenv("LBX_MAX_DELTA", "3")
    with pytest.raises(GuardrailExceeded):
        run_adversary(greedy_by_color(4), 4)

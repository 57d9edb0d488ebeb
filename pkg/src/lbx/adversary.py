"""The unfold-and-mix adversary and its certificates.

Starting from a single node with Delta loops, each step unfolds a loop in
both graphs of the current pair, mixes them across the loop color, and
follows a chain of weight disagreements to a new loop.  Every pair records
two nodes whose radius-i views agree while the algorithm's outputs differ,
which certifies that the algorithm needs more than i rounds.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .covers import CoveringMap, random_simple_lift, universal_cover_ball, unfold_loop
from .errors import (
    ColorMismatch,
    GuardrailExceeded,
    InfeasibleLift,
    InternalInvariantBroken,
    ModelMismatch,
    NoContinuation,
    NotALoop,
    PaletteTooSmall,
    ParseError,
)
from .fracmatch import FractionalMatching, check_maximal_fm, fm_doc, fm_from_doc, propagation_walk
from .graph_core import (
    LOOP,
    UNDIRECTED,
    ColoredMultigraph,
    Edge,
    graph_doc,
    graph_from_doc,
    is_tree_ignoring_loops,
    loop_count,
    loops_at,
    make_graph,
    remove_edge,
    shift_nodes,
)
from .locality import LocalAlgorithm, LocalOutput, assemble_fm, canonical_code, evaluate

DEFAULT_MAX_DELTA = 14


@dataclass
class WitnessPair:
    i: int
    G: ColoredMultigraph
    H: ColoredMultigraph
    g: int
    h: int
    c: int
    out_g: LocalOutput
    out_h: LocalOutput
    branch: str = "base"
    checks: dict = field(default_factory=dict)

    def doc(self) -> dict:
        return {
            "i": self.i, "G": graph_doc(self.G), "H": graph_doc(self.H),
            "g": self.g, "h": self.h, "c": self.c,
            "out_g": self.out_g.doc(), "out_h": self.out_h.doc(),
            "checks": dict(self.checks), "branch": self.branch,
        }

    @classmethod
    def from_doc(cls, d) -> "WitnessPair":
        try:
            return cls(int(d["i"]), graph_from_doc(d["G"]), graph_from_doc(d["H"]), d["g"], d["h"], int(d["c"]),
                       LocalOutput.from_doc(d["out_g"]), LocalOutput.from_doc(d["out_h"]),
                       d.get("branch", ""), dict(d.get("checks", {})))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed witness pair: {exc!r}", "$.pairs[]") from None


@dataclass
class LowerBoundCertificate:
    algorithm: str
    delta: int
    pairs: list

    @property
    def min_runtime(self) -> int:
        return len(self.pairs)

    def doc(self) -> dict:
        return {"algorithm": self.algorithm, "delta": self.delta,
                "pairs": [p.doc() for p in self.pairs],
                "conclusion": {"min_runtime": self.min_runtime}}

    def encode(self) -> str:
        return json.dumps(self.doc(), indent=2) + "\n"


@dataclass
class FailureWitness:
    graph: ColoredMultigraph
    covering: CoveringMap
    fm: FractionalMatching
    violation: dict
    source: str = ""

    def doc(self) -> dict:
        return {"graph": graph_doc(self.graph), "fm": fm_doc(self.fm), "violation": self.violation,
                "covering": self.covering.doc(), "multigraph": graph_doc(self.covering.target),
                "source": self.source}

    def encode(self) -> str:
        return json.dumps(self.doc(), indent=2) + "\n"


def certificate_from_doc(doc) -> LowerBoundCertificate:
    try:
        return LowerBoundCertificate(doc["algorithm"], int(doc["delta"]),
                                     [WitnessPair.from_doc(p) for p in doc["pairs"]])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed certificate: {exc!r}", "$") from None


# -- failure witnesses -----------------------------------------------------

def _edge_position(g: ColoredMultigraph, eid) -> int:
    return [e.eid for e in g.edges].index(eid)


def failure_witness(A: LocalAlgorithm, M: ColoredMultigraph, seed=0, source: str = "") -> FailureWitness:
    """Lift ``M`` to a simple graph and record where ``A``'s output breaks."""
    loops = max((loop_count(M, v) for v in M.nodes), default=0)
    copies = max(2, loops + 1)
    copies += copies % 2
    last = None
    for n in range(copies, copies + 64, 2):
        try:
            H, cover = random_simple_lift(M, n, seed)
            break
        except InfeasibleLift as exc:
            last = exc
    else:
        raise InfeasibleLift(str(last))
    y = assemble_fm(A, H)
    report = check_maximal_fm(H, y)
    candidates = []
    for kind, x in report.violations:
        if kind == "UnsaturatedEdge":
            e = H.edge_by_id[x]
            same = cover.node_map[e.u] == cover.node_map[e.v]
            candidates.append((0 if same else 1, kind, x))
        else:
            candidates.append((2, kind, x))
    if not candidates:
        raise InternalInvariantBroken("lift of an unsaturated multigraph produced a maximal FM")
    _, kind, x = min(candidates)
    if kind == "UnsaturatedEdge":
        e = H.edge_by_id[x]
        violation = {"kind": kind, "edge": _edge_position(H, x), "u": e.u, "v": e.v, "color": e.color,
                     "y_u": str(y.node_weight(e.u)), "y_v": str(y.node_weight(e.v)),
                     "preimage_of": [cover.node_map[e.u], cover.node_map[e.v]]}
    else:
        violation = {"kind": kind, "node": x, "y": str(y.node_weight(x)), "preimage_of": [cover.node_map[x]]}
    return FailureWitness(H, cover, y, violation, source)


def verify_failure(A: LocalAlgorithm, w_doc) -> bool:
    """Re-check a failure witness document from scratch."""
    g = graph_from_doc(w_doc["graph"])
    from .graph_core import is_simple
    if not is_simple(g):
        return False
    y = assemble_fm(A, g)
    if y != fm_from_doc(g, w_doc["fm"]):
        return False
    report = check_maximal_fm(g, y)
    v = w_doc["violation"]
    if v["kind"] == "UnsaturatedEdge":
        eid = g.edges[v["edge"]].eid
        return ("UnsaturatedEdge", eid) in report.violations
    return ("Infeasible", v["node"]) in report.violations


# -- the construction ------------------------------------------------------

def _loop_eid(g: ColoredMultigraph, v, color) -> int:
    slot = g.incidence[v].get((color, LOOP))
    if slot is None:
        raise NotALoop(f"node {v} has no loop of color {color}")
    return slot[0]


def base_graph(delta: int) -> ColoredMultigraph:
    return make_graph("EC", [(0, 0, c) for c in range(1, delta + 1)], nodes=[0], k=delta)


def _saturated_fm(A, M):
    """Assembled FM of ``A`` on ``M`` and whether it saturates every node feasibly."""
    y = assemble_fm(A, M)
    rep = check_maximal_fm(M, y)
    return y, rep.feasible and rep.saturated == set(M.nodes)


def base_case(A: LocalAlgorithm, delta: int):
    if A.model != "EC":
        raise ModelMismatch("the adversary targets EC algorithms")
    if delta < 2:
        raise ValueError("delta must be at least 2")
    if A.palette is not None and A.palette < delta:
        raise PaletteTooSmall(f"{A.name} handles {A.palette} colors, need {delta}")
    G0 = base_graph(delta)
    out_g = evaluate(A, G0, 0)
    if out_g.total() != 1:
        return failure_witness(A, G0, source="G0")
    e_color = min(c for (c, d), w in out_g.items if w != 0)
    H0 = remove_edge(G0, _loop_eid(G0, 0, e_color))
    out_h = evaluate(A, H0, 0)
    if out_h.total() != 1:
        return failure_witness(A, H0, source="H0")
    common = [c for c in loops_at(H0, 0) if out_g[(c, LOOP)] != out_h[(c, LOOP)]]
    if not common:
        raise InternalInvariantBroken("base graphs saturated without a differing common loop")
    return WitnessPair(0, G0, H0, 0, 0, min(common), out_g, out_h, "base")


def mix(G: ColoredMultigraph, e: int, H: ColoredMultigraph, f: int) -> ColoredMultigraph:
    """``(G - e)`` and ``(H - f)`` side by side, joined by an edge of the loops' color.

    Node ids of both inputs are kept (they must be disjoint); H's eids are
    shifted past G's and the joining edge reuses ``e``'s eid.
    """
    ge, hf = G.edge_by_id.get(e), H.edge_by_id.get(f)
    if ge is None or not ge.is_loop or hf is None or not hf.is_loop:
        raise NotALoop("mix needs a loop in each graph")
    if ge.color != hf.color:
        raise ColorMismatch(f"loop colors differ: {ge.color} vs {hf.color}")
    if G.node_set & H.node_set:
        raise ValueError("mix needs disjoint node ids")
    shift = max(G.edge_by_id) + 1
    edges = [x for x in G.edges if x.eid != e]
    edges += [Edge(x.eid + shift, x.u, x.v, x.color, False) for x in H.edges if x.eid != f]
    edges.append(Edge(e, ge.u, hf.u, ge.color, False))
    return make_graph("EC", edges, nodes=list(G.nodes) + list(H.nodes), k=max(G.k, H.k))


def adversary_step(A: LocalAlgorithm, pair: WitnessPair):
    G, H, c = pair.G, pair.H, pair.c
    e = _loop_eid(G, pair.g, c)
    f = _loop_eid(H, pair.h, c)
    off = max(G.nodes) + 1
    Hs = shift_nodes(H, off)
    GG, _ = unfold_loop(G, e)
    HH, _ = unfold_loop(H, f)
    GH = mix(G, e, Hs, f)
    eshift = max(G.edge_by_id) + 1

    fms = {}
    for name, M in (("GG", GG), ("HH", HH), ("GH", GH)):
        y, ok = _saturated_fm(A, M)
        if not ok:
            return failure_witness(A, M, source=f"step {pair.i}: {name}")
        fms[name] = y
    w_G = fms["GG"][e]
    w_H = fms["HH"][f]
    w = fms["GH"][e]

    if w != w_G:
        branch, W = "G", remove_edge(G, e)
        y = {x.eid: fms["GG"][x.eid] for x in W.edges}
        y2 = {x.eid: fms["GH"][x.eid] for x in W.edges}
        start, virtual = pair.g, (w_G, w)
    elif w != w_H:
        branch, W = "H", remove_edge(H, f)
        y = {x.eid: fms["HH"][x.eid] for x in W.edges}
        y2 = {x.eid: fms["GH"][x.eid + eshift] for x in W.edges}
        start, virtual = pair.h, (w_H, w)
    else:
        raise InternalInvariantBroken(f"mixed weight {w} equals both {w_G} and {w_H}")
    try:
        g_star, e_star = propagation_walk(W, y, y2, start, c, virtual_weights=virtual)
    except NoContinuation as exc:
        raise InternalInvariantBroken(f"propagation stuck on saturated graphs: {exc}") from exc
    c_next = W.edge_by_id[e_star].color
    if branch == "G":
        newG, newH, g_new, h_new = GG, GH, g_star, g_star
    else:
        newG, newH, g_new, h_new = HH, GH, g_star, g_star + off
    return WitnessPair(pair.i + 1, newG, newH, g_new, h_new, c_next,
                       evaluate(A, newG, g_new), evaluate(A, newH, h_new), branch)


def verify_pair(A: LocalAlgorithm, pair: WitnessPair, delta: int) -> dict:
    """Recompute every property of a witness pair from scratch; returns ``{check: bool}``."""
    G, H, i = pair.G, pair.H, pair.i
    checks = {}
    try:
        checks["P1_views"] = (canonical_code(universal_cover_ball(G, pair.g, i))
                              == canonical_code(universal_cover_ball(H, pair.h, i)))
    except Exception:  # noqa: BLE001 - a malformed pair simply fails the check
        checks["P1_views"] = False
    slot = (pair.c, LOOP)
    try:
        out_g, out_h = evaluate(A, G, pair.g), evaluate(A, H, pair.h)
        present = slot in out_g.as_dict() and slot in out_h.as_dict()
        checks["P1_outputs"] = present and out_g[slot] != out_h[slot]
        checks["recorded_outputs"] = out_g == pair.out_g and out_h == pair.out_h
    except Exception:  # noqa: BLE001
        checks["P1_outputs"] = checks["recorded_outputs"] = False
    need = delta - 1 - i
    checks["P2_loops"] = all(loop_count(M, v) >= need for M in (G, H) for v in M.nodes)
    checks["P3_trees"] = is_tree_ignoring_loops(G) and is_tree_ignoring_loops(H)
    checks["max_degree"] = G.max_degree <= delta and H.max_degree <= delta
    return checks


def max_delta_limit(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("LBX_MAX_DELTA")
    return int(env) if env else DEFAULT_MAX_DELTA


def run_adversary(A: LocalAlgorithm, delta: int, max_delta: int | None = None):
    """Certificate that ``A`` needs more than ``delta - 2`` rounds, or a failure witness."""
    limit = max_delta_limit(max_delta)
    if delta > limit:
        raise GuardrailExceeded(f"delta {delta} exceeds the limit {limit} (graphs grow like 2^delta)")
    pair = base_case(A, delta)
    pairs = []
    while True:
        if isinstance(pair, FailureWitness):
            return pair
        pair.checks = verify_pair(A, pair, delta)
        if not all(pair.checks.values()):
            failed = [k for k, ok in pair.checks.items() if not ok]
            raise InternalInvariantBroken(f"pair {pair.i} failed {failed}")
        pairs.append(pair)
        if pair.i >= delta - 2:
            break
        pair = adversary_step(A, pair)
    return LowerBoundCertificate(A.name, delta, pairs)


def verify_certificate(A: LocalAlgorithm, cert: LowerBoundCertificate) -> list:
    """Re-run ``verify_pair`` on every pair; returns one ``(i, checks)`` entry per pair."""
    return [(p.i, verify_pair(A, p, cert.delta)) for p in cert.pairs]

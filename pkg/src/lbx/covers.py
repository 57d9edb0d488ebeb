"""Covering maps, lifts, universal-cover balls, factor graphs and loopiness."""
from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass

from .errors import Disconnected, InfeasibleLift, ModelMismatch, NotALoop, ParseError
from .graph_core import (
    IN,
    LOOP,
    OUT,
    ColoredMultigraph,
    Edge,
    degree,
    is_connected,
    loop_count,
    make_graph,
)
from .locality import CoverView


@dataclass(frozen=True)
class CoveringMap:
    source: ColoredMultigraph
    target: ColoredMultigraph
    node_map: dict
    edge_map: dict

    def doc(self) -> dict:
        return {"nodes": {str(k): v for k, v in sorted(self.node_map.items())},
                "edges": {str(k): v for k, v in sorted(self.edge_map.items())}}

    def encode(self) -> str:
        return json.dumps(self.doc(), indent=2) + "\n"


def covering_from_doc(source: ColoredMultigraph, target: ColoredMultigraph, doc) -> CoveringMap:
    try:
        nodes = {int(k): int(v) for k, v in doc["nodes"].items()}
        edges = {int(k): int(v) for k, v in doc["edges"].items()}
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"bad covering map document: {exc}", "$") from None
    return CoveringMap(source, target, nodes, edges)


def verify_covering(m: CoveringMap) -> list:
    """Return the list of violations ``(kind, where)``; empty means a covering map."""
    H, G = m.source, m.target
    out = []
    if H.model != G.model:
        return [("ModelMismatch", f"{H.model} vs {G.model}")]
    for v in H.nodes:
        if v not in m.node_map or m.node_map[v] not in G.node_set:
            out.append(("NodeMap", v))
    for e in H.edges:
        if e.eid not in m.edge_map or m.edge_map[e.eid] not in G.edge_by_id:
            out.append(("EdgeMap", e.eid))
    if out:
        return out
    for e in H.edges:
        f = G.edge_by_id[m.edge_map[e.eid]]
        a, b = m.node_map[e.u], m.node_map[e.v]
        if f.color != e.color:
            out.append(("ColorMismatch", e.eid))
        if f.directed:
            ok = (a, b) == (f.u, f.v)
        else:
            ok = {a, b} == {f.u, f.v}
        if not ok:
            out.append(("NotHomomorphism", e.eid))
    if set(m.node_map.values()) != G.node_set:
        out.append(("NotOnto", sorted(G.node_set - set(m.node_map.values()))))
    if set(m.edge_map.values()) != set(G.edge_by_id):
        out.append(("NotOnto", sorted(set(G.edge_by_id) - set(m.edge_map.values()))))
    for v in H.nodes:
        x = m.node_map[v]
        if degree(H, v) != degree(G, x):
            out.append(("DegreeMismatch", v))
            continue
        # local bijection: incident slots of v map onto incident slots of x
        image = Counter()
        for (color, d), (eid, _) in H.incidence[v].items():
            f = G.edge_by_id[m.edge_map[eid]]
            if f.directed:
                image[(f.eid, d)] += 1
            else:
                image[(f.eid, None)] += 1
        expected = Counter()
        for (color, d), (eid, _) in G.incidence[x].items():
            expected[(eid, d if d in (OUT, IN) else None)] += 1
        if image != expected:
            out.append(("NotLocallyBijective", v))
    return out


def universal_cover_ball(g: ColoredMultigraph, v, r: int) -> CoverView:
    if not is_connected(g):
        raise Disconnected("universal cover requested for a disconnected graph")
    return CoverView(g, v, r)


# -- factor graphs ---------------------------------------------------------

def _slot_key(slot: tuple) -> tuple:
    # an EC loop and an edge of the same color are interchangeable under a covering
    color, d = slot
    return (color, "undirected") if d == LOOP else slot


def _refine(g: ColoredMultigraph) -> dict:
    cls = {v: 0 for v in g.nodes}
    while True:
        sig = {v: (cls[v], tuple(sorted((_slot_key(s), cls[w]) for s, (_, w) in g.incidence[v].items())))
               for v in g.nodes}
        first = {}
        for v in g.nodes:  # classes numbered by their smallest member
            first.setdefault(sig[v], len(first))
        new = {v: first[sig[v]] for v in g.nodes}
        if len(first) == len(set(cls.values())):
            return new
        cls = new


def factor_graph(g: ColoredMultigraph) -> tuple:
    """Quotient of ``g`` by its coarsest equitable color partition.

    Returns ``(F, m)`` where ``m`` is the covering map ``g -> F``.
    """
    if g.model not in ("EC", "PO"):
        raise ModelMismatch("factor graphs are computed for EC and PO graphs")
    if not is_connected(g):
        raise Disconnected("factor graph of a disconnected graph")
    cls = _refine(g)
    reps = {}
    for v in g.nodes:
        reps.setdefault(cls[v], v)
    edges, key_to_eid = [], {}
    for c, rep in sorted(reps.items()):
        for (color, d), (eid, w) in g.incidence[rep].items():
            if d == IN:
                continue  # directed edges are created from their tail
            if d != OUT and cls[w] == c:
                d = LOOP
            key = (c, color, d)
            if d == OUT or d == LOOP:
                a, b = c, cls[w]
            else:
                a, b = c, cls[w]
                rev = (b, color, d)
                if rev in key_to_eid:
                    key_to_eid[key] = key_to_eid[rev]
                    continue
            key_to_eid[key] = len(edges)
            edges.append(Edge(len(edges), a, b, color, g.model == "PO"))
    F = make_graph(g.model, edges, nodes=sorted(reps), k=g.k)
    edge_map = {}
    for e in g.edges:
        if e.directed:
            key = (cls[e.u], e.color, OUT)
        elif cls[e.u] == cls[e.v]:
            key = (cls[e.u], e.color, LOOP)
        else:
            key = (cls[e.u], e.color, "undirected")
        edge_map[e.eid] = key_to_eid[key]
    return F, CoveringMap(g, F, dict(cls), edge_map)


def loopiness(g: ColoredMultigraph) -> int:
    F, _ = factor_graph(g)
    return min(loop_count(F, v) for v in F.nodes)


def is_loopy(g: ColoredMultigraph) -> bool:
    return loopiness(g) >= 1


# -- lifts -----------------------------------------------------------------

def unfold_loop(g: ColoredMultigraph, eid: int) -> tuple:
    """Two disjoint copies of ``g - e`` joined by an edge of ``e``'s color.

    The first copy keeps the node ids and eids of ``g`` (the joining edge
    reuses ``e``'s eid); the second copy is shifted past both ranges.
    """
    if g.model != "EC":
        raise ModelMismatch("loop unfolding is defined for EC graphs")
    e = g.edge_by_id.get(eid)
    if e is None or not e.is_loop:
        raise NotALoop(f"edge {eid} is not a loop")
    shift = max(g.nodes) + 1
    eshift = max(g.edge_by_id) + 1
    edges, node_map, edge_map = [], {}, {}
    for f in g.edges:
        if f.eid == eid:
            continue
        edges.append(f)
        edges.append(Edge(f.eid + eshift, f.u + shift, f.v + shift, f.color, False))
        edge_map[f.eid] = edge_map[f.eid + eshift] = f.eid
    edges.append(Edge(eid, e.u, e.u + shift, e.color, False))
    edge_map[eid] = eid
    for v in g.nodes:
        node_map[v] = node_map[v + shift] = v
    GG = make_graph("EC", edges, nodes=list(g.nodes) + [v + shift for v in g.nodes], k=g.k)
    return GG, CoveringMap(GG, g, node_map, edge_map)


def _one_factorization(n: int) -> list:
    """Round-robin 1-factorization of K_n (n even): n-1 perfect matchings."""
    rounds = []
    others = list(range(1, n))
    for r in range(n - 1):
        ring = [0] + others[r:] + others[:r]
        rounds.append([(ring[i], ring[n - 1 - i]) for i in range(n // 2)])
    return rounds


def random_simple_lift(g: ColoredMultigraph, copies: int, seed=0) -> tuple:
    """A simple ``copies``-fold lift of ``g`` with a seed-deterministic layout.

    Lifted node ``(v, i)`` gets id ``pos(v) * copies + i``.  Undirected loops
    at a node become distinct perfect matchings of a 1-factorization of the
    complete graph on its copies; directed loops become distinct cyclic
    shifts; parallel edges between two nodes get distinct shifted
    permutations.  Everything is conjugated by random permutations.
    """
    if g.model not in ("EC", "PO"):
        raise ModelMismatch("lifts are built for EC and PO graphs")
    if copies < 2:
        raise InfeasibleLift("need at least 2 copies")
    rng = random.Random(seed)
    pos = {v: i for i, v in enumerate(g.nodes)}
    perm = {v: rng.sample(range(copies), copies) for v in g.nodes}

    def nid(v, i):
        return pos[v] * copies + perm[v][i]

    loops_by_node, parallel = {}, {}
    for e in g.edges:
        if e.is_loop:
            loops_by_node.setdefault(e.u, []).append(e)
        else:
            key = (e.u, e.v) if e.directed else tuple(sorted((e.u, e.v)))
            parallel.setdefault(key, []).append(e)

    edges, node_map, edge_map = [], {}, {}

    def add(a, b, color, directed, source_eid):
        eid = len(edges)
        edges.append(Edge(eid, a, b, color, directed))
        edge_map[eid] = source_eid

    for v, loops in sorted(loops_by_node.items()):
        und = [e for e in loops if not e.directed]
        dirl = [e for e in loops if e.directed]
        if und:
            if copies % 2 or len(und) > copies - 1:
                raise InfeasibleLift(f"node {v}: {len(und)} undirected loops need an even copy count > {len(und)}")
            rounds = _one_factorization(copies)
            picks = rng.sample(range(copies - 1), len(und))
            for e, r in zip(und, picks):
                for i, j in rounds[r]:
                    add(nid(v, i), nid(v, j), e.color, False, e.eid)
        if dirl:
            # a 2-cycle i->j->i would create antiparallel arcs; keep shifts distinct mod copies
            shifts = [s for s in range(1, copies)]
            if len(dirl) > len(shifts):
                raise InfeasibleLift(f"node {v}: {len(dirl)} directed loops need > {len(dirl)} copies")
            chosen = rng.sample(shifts, len(dirl))
            for e, s in zip(dirl, chosen):
                for i in range(copies):
                    add(nid(v, i), nid(v, (i + s) % copies), e.color, True, e.eid)
    for key, group in sorted(parallel.items()):
        if len(group) > copies:
            raise InfeasibleLift(f"{len(group)} parallel edges between {key} need more copies")
        chosen = rng.sample(range(copies), len(group))
        for e, s in zip(group, chosen):
            for i in range(copies):
                add(nid(e.u, i), nid(e.v, (i + s) % copies), e.color, e.directed, e.eid)
    for v in g.nodes:
        for i in range(copies):
            node_map[nid(v, i)] = v
    H = make_graph(g.model, edges, nodes=sorted(node_map), k=g.k)
    from .graph_core import is_simple
    if not is_simple(H):
        raise InfeasibleLift("could not avoid parallel edges with this many copies")
    return H, CoveringMap(H, g, node_map, edge_map)


def simple_lift(g: ColoredMultigraph, seed=0, max_copies: int = 64) -> tuple:
    """The smallest feasible simple lift found by ``random_simple_lift``."""
    last = None
    for copies in range(2, max_copies + 1):
        try:
            return random_simple_lift(g, copies, seed)
        except InfeasibleLift as exc:
            last = exc
    raise InfeasibleLift(str(last))

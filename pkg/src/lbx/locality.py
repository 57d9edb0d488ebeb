"""Views, canonical codes, local algorithms and their evaluation.

A *view* is the only thing a local algorithm ever sees.  Two kinds exist:

``BallView``
    a materialized radius-t ball of a concrete graph (used for ID/OI graphs,
    and for explicit neighborhoods of multigraphs);
``CoverView``
    a lazily expanded radius-t ball of the universal cover of an EC/PO graph.
    Its nodes are non-backtracking walks from the root, so it is always
    tree-shaped and identical for a graph and all of its lifts.

Both expose the same navigation surface (``slots``/``step``), so algorithms
are written once against it.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .errors import InconsistentOutputs, InvalidOutput, ModelMismatch, UnknownNode
from .graph_core import (
    IN,
    LOOP,
    OUT,
    UNDIRECTED,
    ColoredMultigraph,
    Edge,
    is_tree,
    make_graph,
    reverse_slot,
)
from .fracmatch import FractionalMatching

EXHAUSTIVE_LIMIT = 200_000


def _hash(obj) -> bytes:
    return hashlib.blake2b(repr(obj).encode(), digest_size=16).digest()


# -- views -----------------------------------------------------------------

class BallView:
    """A materialized view: ``graph`` restricted to the ball, plus its root."""

    def __init__(self, graph: ColoredMultigraph, root, radius: int):
        if root not in graph.node_set:
            raise UnknownNode(f"root {root} not in view graph")
        self.graph = graph
        self.root = root
        self.radius = radius
        self.model = graph.model

    def slots(self, node) -> tuple:
        return tuple(self.graph.slots(node))

    def step(self, node, slot):
        return self.graph.slots(node)[slot][1]

    def label(self, node):
        return self.graph.label(node)

    def rank(self, node):
        r = self.graph.rank
        return None if r is None else r[node]

    def memo_key(self, node):
        return node

    def digest_memo(self) -> dict:
        return {}

    @property
    def is_tree(self) -> bool:
        return is_tree(self.graph)

    def nodes(self):
        return self.graph.nodes

    def materialize(self) -> "BallView":
        return self

    def __repr__(self):
        return f"BallView({self.model}, root={self.root}, radius={self.radius}, n={len(self.graph.nodes)})"


def _view_slot(base_slot):
    color, d = base_slot
    return (color, UNDIRECTED) if d == LOOP else base_slot


class CoverView:
    """Radius-``radius`` ball of the universal cover of ``graph`` at ``base_root``.

    A node is a flat tuple ``(x0, s1, x1, s2, x2, ...)`` recording the walk:
    base nodes interleaved with the base slot used to leave the previous node.
    """

    def __init__(self, graph: ColoredMultigraph, base_root, radius: int):
        if graph.model not in ("EC", "PO"):
            raise ModelMismatch("universal covers are defined for EC and PO graphs")
        graph.slots(base_root)
        self.graph = graph
        self.base_root = base_root
        self.radius = radius
        self.model = graph.model
        self.root = (base_root,)

    @staticmethod
    def base(node):
        return node[-1]

    @staticmethod
    def depth(node) -> int:
        return len(node) // 2

    @staticmethod
    def _arrival(node):
        return reverse_slot(node[-2]) if len(node) > 1 else None

    def _base_slot(self, node, slot):
        table = self.graph.incidence[node[-1]]
        if slot in table:
            return slot
        color, d = slot
        if d == UNDIRECTED and (color, LOOP) in table:
            return (color, LOOP)
        raise KeyError(slot)

    def slots(self, node) -> tuple:
        depth = len(node) // 2
        if depth < self.radius:
            return tuple(sorted(_view_slot(s) for s in self.graph.incidence[node[-1]]))
        if depth == 0:
            return ()
        return (_view_slot(self._arrival(node)),)

    def step(self, node, slot):
        base_slot = self._base_slot(node, slot)
        if len(node) > 1 and base_slot == self._arrival(node):
            return node[:-2]
        if len(node) // 2 >= self.radius:
            raise KeyError(slot)
        _, other = self.graph.incidence[node[-1]][base_slot]
        return node + (base_slot, other)

    def label(self, node):
        return None

    def rank(self, node):
        return None

    def memo_key(self, node):
        return (node[-1], self._arrival(node), self.radius - len(node) // 2)

    def digest_memo(self) -> dict:
        return self.graph.scratch.setdefault("cover-digest", {})

    is_tree = True

    def nodes(self):
        out, frontier = [self.root], [self.root]
        while frontier:
            nxt = []
            for x in frontier:
                arrival = self._arrival(x)
                if len(x) // 2 >= self.radius:
                    continue
                for s in self.graph.incidence[x[-1]]:
                    if s != arrival:
                        nxt.append(self.step(x, _view_slot(s)))
            out.extend(nxt)
            frontier = nxt
        return out

    def materialize(self) -> BallView:
        """Materialize as a ``BallView`` whose node ids are BFS positions (root = 0)."""
        walks = self.nodes()
        index = {w: i for i, w in enumerate(walks)}
        edges = []
        directed = self.model == "PO"
        for w in walks[1:]:
            parent = w[:-2]
            color, d = w[-2]
            if d == IN:
                u, v = index[w], index[parent]
            else:
                u, v = index[parent], index[w]
            edges.append(Edge(len(edges), u, v, color, directed))
        g = make_graph(self.model, edges, nodes=range(len(walks)), k=self.graph.k)
        return BallView(g, 0, self.radius)

    def __repr__(self):
        return f"CoverView({self.model}, base_root={self.base_root}, radius={self.radius})"


def neighborhood(g: ColoredMultigraph, v, t: int) -> BallView:
    """The radius-t ball: nodes within distance t, edges within distance t.

    The distance of an edge is one more than the distance of its nearer
    endpoint, so loops sit at distance 1 from their node.
    """
    g.slots(v)
    dist = {v: 0}
    frontier = [v]
    while frontier:
        nxt = []
        for x in frontier:
            if dist[x] >= t:
                continue
            for _, w in g.incidence[x].values():
                if w not in dist:
                    dist[w] = dist[x] + 1
                    nxt.append(w)
        frontier = nxt
    edges = [e for e in g.edges
             if e.u in dist and e.v in dist and min(dist[e.u], dist[e.v]) + 1 <= t]
    labels = {x: g.labels[x] for x in dist} if g.labels is not None else None
    order = [x for x in g.order if x in dist] if g.order is not None else None
    sub = make_graph(g.model, edges, nodes=dist, k=g.k, labels=labels, order=order)
    return BallView(sub, v, t)


# -- canonical codes -------------------------------------------------------

def _tree_digest(view, node, arrival, memo) -> bytes:
    key = view.memo_key(node)
    if arrival is not None or not isinstance(view, CoverView):
        cached = memo.get((key, arrival))
        if cached is not None:
            return cached
    children = []
    for s in view.slots(node):
        if s == arrival:
            continue
        child = view.step(node, s)
        children.append((s, _tree_digest(view, child, reverse_slot(s), memo)))
    children.sort()
    digest = _hash(tuple(children))
    memo[(key, arrival)] = digest
    return digest


def _edge_entries(g: ColoredMultigraph, pos: dict) -> list:
    out = []
    for e in g.edges:
        a, b = pos[e.u], pos[e.v]
        if e.directed:
            out.append((a, b, e.color, 1))
        else:
            out.append((min(a, b), max(a, b), e.color, 0))
    out.sort()
    return out


def _refined_cells(view: BallView) -> list:
    g = view.graph
    dist = {view.root: 0}
    frontier = [view.root]
    while frontier:
        nxt = []
        for x in frontier:
            for _, w in g.incidence[x].values():
                if w not in dist:
                    dist[w] = dist[x] + 1
                    nxt.append(w)
        frontier = nxt
    color = {x: (x != view.root, dist.get(x, -1), tuple(g.incidence[x])) for x in g.nodes}
    while True:
        sig = {x: (color[x], tuple(sorted((s, color[w]) for s, (_, w) in g.incidence[x].items())))
               for x in g.nodes}
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {x: ranks[sig[x]] for x in g.nodes}
        if len(set(new.values())) == len(set(color.values())):
            color = new
            break
        color = new
    cells = {}
    for x in g.nodes:
        cells.setdefault(color[x], []).append(x)
    return [cells[c] for c in sorted(cells)]


def _exhaustive_code(view: BallView) -> bytes:
    cells = _refined_cells(view)
    count = 1
    for cell in cells:
        for i in range(2, len(cell) + 1):
            count *= i
    if count > EXHAUSTIVE_LIMIT:
        raise ValueError(f"view too large for exhaustive canonization ({count} orderings)")
    best = None
    for choice in itertools.product(*(itertools.permutations(c) for c in cells)):
        seq = [x for part in choice for x in part]
        pos = {x: i for i, x in enumerate(seq)}
        enc = (len(seq), tuple(_edge_entries(view.graph, pos)))
        if best is None or enc < best:
            best = enc
    return _hash(best)


def canonical_code(view) -> bytes:
    """Isomorphism-invariant code of a rooted, model-decorated view.

    OI views are canonized through their order, ID views through their
    literal labels, tree-shaped EC/PO views by sorted child digests, and any
    other (small) view by exhaustive search over refined node orderings.
    """
    head = f"{view.model}|{view.radius}|".encode()
    if view.model == "OI" and view.rank(view.root) is not None:
        g = view.graph
        pos = {x: g.rank[x] for x in g.nodes}
        return head + _hash(("order", pos[view.root], len(pos), tuple(_edge_entries(g, pos))))
    if view.model == "ID":
        g = view.graph
        ordered = sorted(g.nodes, key=g.label)
        pos = {x: i for i, x in enumerate(ordered)}
        labels = tuple(g.label(x) for x in ordered)
        return head + _hash(("labels", pos[view.root], labels, tuple(_edge_entries(g, pos))))
    if view.is_tree:
        return head + _tree_digest(view, view.root, None, view.digest_memo())
    return head + b"x" + _exhaustive_code(view)


# -- outputs and algorithms ------------------------------------------------

@dataclass(frozen=True)
class LocalOutput:
    """Weights a node reports for its incident edge slots."""

    items: tuple  # sorted ((color, dir), Fraction) pairs

    @classmethod
    def of(cls, mapping) -> "LocalOutput":
        return cls(tuple(sorted((tuple(k), Fraction(v)) for k, v in dict(mapping).items())))

    def as_dict(self) -> dict:
        return dict(self.items)

    def __getitem__(self, slot):
        return self.as_dict()[slot]

    def get(self, slot, default=None):
        return self.as_dict().get(slot, default)

    def slots(self) -> list:
        return [s for s, _ in self.items]

    def total(self) -> Fraction:
        return sum((w for _, w in self.items), Fraction(0))

    def by_color(self) -> dict:
        """Color -> weight; only meaningful for undirected slot sets."""
        return {c: w for (c, _), w in self.items}

    def doc(self) -> dict:
        return {"slots": [{"color": c, "dir": d, "w": _frac_str(w)} for (c, d), w in self.items]}

    @classmethod
    def from_doc(cls, doc) -> "LocalOutput":
        return cls.of({(s["color"], s["dir"]): Fraction(s["w"]) for s in doc["slots"]})


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(eq=False)
class LocalAlgorithm:
    """A view function with a declared runtime ``t = runtime(delta, k)``.

    Calls are memoized on the view's canonical code, so the output is a
    function of the isomorphism type of the view by construction.
    """

    name: str
    model: str
    output_fn: Callable[[Any], Any]
    runtime: Callable[[int, int], int]
    palette: int | None = None
    output_kind: str = "fm"
    memoize: bool = True
    _memo: dict = field(default_factory=dict, repr=False)

    def __call__(self, view):
        if view.model != self.model and not (self.model in ("OI", "ID") and view.model in ("OI", "ID")):
            raise ModelMismatch(f"{self.name} is a {self.model} algorithm, view is {view.model}")
        if not self.memoize:
            return self._checked(view)
        code = canonical_code(view)
        if code not in self._memo:
            self._memo[code] = self._checked(view)
        return self._memo[code]

    def _checked(self, view):
        out = self.output_fn(view)
        if self.output_kind != "fm":
            return out
        if not isinstance(out, LocalOutput):
            out = LocalOutput.of(out)
        expected = sorted(view.slots(view.root))
        if out.slots() != expected:
            raise InvalidOutput(f"{self.name}: output slots {out.slots()} != root slots {expected}")
        for slot, w in out.items:
            if not 0 <= w <= 1:
                raise InvalidOutput(f"{self.name}: weight {w} on slot {slot} outside [0, 1]")
        return out

    def t(self, delta: int, k: int) -> int:
        return self.runtime(delta, k)

    def __repr__(self):
        return f"LocalAlgorithm({self.name!r}, {self.model})"


def const_runtime(t: int) -> Callable[[int, int], int]:
    return lambda delta, k: t


def view_for(A: LocalAlgorithm, g: ColoredMultigraph, v):
    """The view ``A`` receives at node ``v`` of ``g``."""
    t = A.runtime(g.max_degree, g.k)
    if g.model in ("EC", "PO"):
        return CoverView(g, v, t)
    return neighborhood(g, v, t)


def evaluate(A: LocalAlgorithm, g: ColoredMultigraph, v):
    """Output of ``A`` at ``v``, keyed by the slots of ``v`` in ``g``.

    On EC/PO (multi)graphs the algorithm runs on the universal-cover ball, so
    a loop at ``v`` is seen as an ordinary edge and its weight is routed back
    to the loop slot.
    """
    if A.model != g.model and not (A.model in ("OI", "ID") and g.model in ("OI", "ID")):
        raise ModelMismatch(f"{A.name} is a {A.model} algorithm, graph is {g.model}")
    g.slots(v)
    out = A(view_for(A, g, v))
    if A.output_kind != "fm" or g.model != "EC":
        return out
    table = g.incidence[v]
    routed = {}
    for (color, d), w in out.items:
        routed[(color, LOOP) if (color, LOOP) in table else (color, d)] = w
    return LocalOutput.of(routed)


def edge_weight_at(out: LocalOutput, g: ColoredMultigraph, e: Edge, end) -> list:
    """The weights node ``end`` reports for edge ``e`` (two entries for a directed loop)."""
    if e.directed:
        if e.is_loop:
            return [out[(e.color, OUT)], out[(e.color, IN)]]
        return [out[(e.color, OUT if end == e.u else IN)]]
    return [out[(e.color, LOOP if e.is_loop else UNDIRECTED)]]


def assemble_fm(A: LocalAlgorithm, g: ColoredMultigraph, nodes=None) -> FractionalMatching:
    """Run ``A`` everywhere and glue the per-node reports into one FM.

    Raises ``InconsistentOutputs`` when the two ends of an edge disagree.
    """
    outputs = {v: evaluate(A, g, v) for v in g.nodes}
    return fm_from_outputs(g, outputs)


def fm_from_outputs(g: ColoredMultigraph, outputs: dict) -> FractionalMatching:
    weights = {}
    for e in g.edges:
        reported = edge_weight_at(outputs[e.u], g, e, e.u)
        if not e.is_loop:
            reported += edge_weight_at(outputs[e.v], g, e, e.v)
        if len(set(reported)) != 1:
            raise InconsistentOutputs(e.eid, reported)
        weights[e.eid] = reported[0]
    return FractionalMatching(g, weights)

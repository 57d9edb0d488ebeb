"""Colored multigraphs in the EC, PO, OI and ID flavours.

A graph is an immutable value.  Edges carry a stable ``eid``; a loop is an
edge with ``u == v``.  Every node exposes *slots*, one per incident edge end,
keyed by ``(color, dir)`` where ``dir`` is one of ``undirected``, ``loop``,
``out`` or ``in``.  Proper coloring makes slot keys unique per node, which is
what lets local algorithms address their outputs by slot.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    DuplicateIdentifier,
    ImproperColoring,
    MissingOrder,
    ParseError,
    UnknownNode,
    ValidationError,
)

MODELS = ("EC", "PO", "OI", "ID")
MAX_K = 64

UNDIRECTED, LOOP, OUT, IN = "undirected", "loop", "out", "in"

Slot = tuple  # (color, dir)


def reverse_slot(slot: Slot) -> Slot:
    color, d = slot
    if d == OUT:
        return (color, IN)
    if d == IN:
        return (color, OUT)
    return slot


@dataclass(frozen=True)
class Edge:
    eid: int
    u: int
    v: int
    color: int
    directed: bool = False

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclass(frozen=True, eq=False)
class ColoredMultigraph:
    model: str
    nodes: tuple
    edges: tuple
    k: int
    labels: Mapping | None = None
    order: tuple | None = None

    def _key(self):
        labels = tuple(sorted(self.labels.items())) if self.labels is not None else None
        return (self.model, self.k, self.nodes, self.edges, labels, self.order)

    def __eq__(self, other):
        if not isinstance(other, ColoredMultigraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash((self.model, self.k, self.nodes, self.edges))

    def __repr__(self):
        return f"ColoredMultigraph({self.model}, n={len(self.nodes)}, m={len(self.edges)}, k={self.k})"

    # -- indices -----------------------------------------------------------

    @cached_property
    def node_set(self) -> frozenset:
        return frozenset(self.nodes)

    @cached_property
    def edge_by_id(self) -> dict:
        return {e.eid: e for e in self.edges}

    @cached_property
    def incidence(self) -> dict:
        """node -> {slot: (eid, other endpoint)}, slots sorted."""
        table = {v: [] for v in self.nodes}
        for e in self.edges:
            if e.directed:
                table[e.u].append(((e.color, OUT), e.eid, e.v))
                table[e.v].append(((e.color, IN), e.eid, e.u))
            elif e.is_loop:
                table[e.u].append(((e.color, LOOP), e.eid, e.u))
            else:
                table[e.u].append(((e.color, UNDIRECTED), e.eid, e.v))
                table[e.v].append(((e.color, UNDIRECTED), e.eid, e.u))
        return {v: {s: (eid, w) for s, eid, w in sorted(entries)} for v, entries in table.items()}

    @cached_property
    def rank(self) -> dict | None:
        if self.order is None:
            return None
        return {v: i for i, v in enumerate(self.order)}

    @cached_property
    def max_degree(self) -> int:
        return max((degree(self, v) for v in self.nodes), default=0)

    @cached_property
    def scratch(self) -> dict:
        # per-graph memo space for derived data (e.g. cover-view digests)
        return {}

    def slots(self, v: int) -> dict:
        try:
            return self.incidence[v]
        except KeyError:
            raise UnknownNode(f"node {v} not in graph") from None

    def label(self, v: int):
        return None if self.labels is None else self.labels.get(v)


# -- construction and validation -------------------------------------------

def validate(g: ColoredMultigraph) -> list:
    """Return a list of ``(kind, message)`` rule violations (empty when valid)."""
    problems = []
    if g.model not in MODELS:
        problems.append(("Model", f"unknown model {g.model!r}"))
        return problems
    if not 1 <= g.k <= MAX_K:
        problems.append(("Palette", f"k={g.k} outside 1..{MAX_K}"))
    if len(set(g.nodes)) != len(g.nodes):
        problems.append(("DuplicateNode", "node ids repeat"))
    seen_eids = set()
    nodes = set(g.nodes)
    for e in g.edges:
        if e.eid in seen_eids:
            problems.append(("DuplicateEdge", f"eid {e.eid} repeats"))
        seen_eids.add(e.eid)
        if e.u not in nodes or e.v not in nodes:
            problems.append(("UnknownNode", f"edge {e.eid} references absent node"))
        if not 1 <= e.color <= g.k:
            problems.append(("Palette", f"edge {e.eid} color {e.color} outside 1..{g.k}"))
    if g.model == "EC" and any(e.directed for e in g.edges):
        problems.append(("Orientation", "EC edges must be undirected"))
    if g.model == "PO" and not all(e.directed for e in g.edges):
        problems.append(("Orientation", "PO edges must be directed"))
    if g.model in ("OI", "ID") and len({e.directed for e in g.edges}) > 1:
        problems.append(("Orientation", "edges must be uniformly directed or undirected"))
    if any(kind == "UnknownNode" for kind, _ in problems):
        return problems

    used = defaultdict(list)
    for e in g.edges:
        if e.directed:
            used[(e.u, e.color, OUT)].append(e.eid)
            used[(e.v, e.color, IN)].append(e.eid)
        else:
            used[(e.u, e.color, None)].append(e.eid)
            if not e.is_loop:
                used[(e.v, e.color, None)].append(e.eid)
    for (v, color, d), eids in sorted(used.items(), key=lambda kv: (kv[0][0], kv[0][1], str(kv[0][2]))):
        if len(eids) > 1:
            where = {OUT: "outgoing ", IN: "incoming "}.get(d, "")
            problems.append(("ImproperColoring", f"node {v} has {len(eids)} {where}edges of color {color}"))

    if g.model == "ID":
        if g.labels is None or set(g.labels) != nodes:
            problems.append(("MissingLabel", "ID graphs need a label on every node"))
        else:
            values = list(g.labels.values())
            if len(set(values)) != len(values):
                problems.append(("DuplicateIdentifier", "node labels are not unique"))
            if any(not isinstance(x, int) or x < 0 for x in values):
                problems.append(("DuplicateIdentifier", "labels must be natural numbers"))
    if g.model == "OI":
        if g.order is None or sorted(g.order) != sorted(nodes) or len(set(g.order)) != len(g.order):
            problems.append(("MissingOrder", "OI graphs need a total order listing every node once"))
    if len(nodes) and max(degree(g, v) for v in nodes) > MAX_K:
        problems.append(("Palette", f"degree exceeds {MAX_K}"))
    return problems


_ERROR_FOR_KIND = {
    "ImproperColoring": ImproperColoring,
    "DuplicateIdentifier": DuplicateIdentifier,
    "MissingOrder": MissingOrder,
    "UnknownNode": UnknownNode,
}


def check(g: ColoredMultigraph) -> ColoredMultigraph:
    problems = validate(g)
    if problems:
        kind = problems[0][0]
        cls = _ERROR_FOR_KIND.get(kind, ValidationError)
        if cls is UnknownNode:
            raise UnknownNode(problems[0][1])
        raise cls([f"{k}: {msg}" for k, msg in problems])
    return g


def make_graph(
    model: str,
    edges: Iterable,
    nodes: Iterable | None = None,
    k: int | None = None,
    labels: Mapping | None = None,
    order: Iterable | None = None,
) -> ColoredMultigraph:
    """Build and validate a graph.

    ``edges`` holds ``(u, v, color)`` triples, or ``Edge`` records when the
    caller wants to fix the eids.  Directedness follows the model (PO edges are
    directed, EC edges are not); OI/ID edges are undirected unless ``Edge``
    records say otherwise.
    """
    recs = []
    for i, e in enumerate(edges):
        if isinstance(e, Edge):
            recs.append(e)
        else:
            u, v, color = e
            recs.append(Edge(i, u, v, color, model == "PO"))
    recs.sort(key=lambda e: e.eid)
    node_ids = set(nodes) if nodes is not None else set()
    if nodes is None:
        for e in recs:
            node_ids.update((e.u, e.v))
    if k is None:
        k = max((e.color for e in recs), default=1)
    g = ColoredMultigraph(
        model=model,
        nodes=tuple(sorted(node_ids)),
        edges=tuple(recs),
        k=k,
        labels=dict(labels) if labels is not None else None,
        order=tuple(order) if order is not None else None,
    )
    return check(g)


def build_graph(doc: Mapping) -> ColoredMultigraph:
    """Build a graph from a raw description shaped like the JSON document."""
    model = doc["model"]
    nodes = [n["id"] if isinstance(n, Mapping) else n for n in doc.get("nodes", [])]
    labels = None
    if any(isinstance(n, Mapping) and n.get("label") is not None for n in doc.get("nodes", [])):
        labels = {n["id"]: n["label"] for n in doc["nodes"] if n.get("label") is not None}
    edges = []
    for i, e in enumerate(doc.get("edges", [])):
        directed = e.get("directed", model == "PO")
        edges.append(Edge(e.get("eid", i), e["u"], e["v"], e["color"], bool(directed)))
    return make_graph(model, edges, nodes=nodes, k=doc.get("k"), labels=labels, order=doc.get("order"))


# -- basic queries ---------------------------------------------------------

def degree(g: ColoredMultigraph, v: int) -> int:
    """Non-loop edges count 1, an undirected loop 1, a directed loop 2."""
    return len(g.slots(v))


def loops_at(g: ColoredMultigraph, v: int) -> list:
    g.slots(v)
    return sorted(e.color for e in g.edges if e.is_loop and e.u == v)


def loop_count(g: ColoredMultigraph, v: int) -> int:
    return len(loops_at(g, v))


def components(g: ColoredMultigraph, ignore_loops: bool = False) -> list:
    seen, comps = set(), []
    for start in g.nodes:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            x = stack.pop()
            comp.append(x)
            for _, w in g.incidence[x].values():
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: ColoredMultigraph) -> bool:
    return len(components(g)) == 1


def is_tree_ignoring_loops(g: ColoredMultigraph) -> bool:
    non_loops = sum(1 for e in g.edges if not e.is_loop)
    return len(g.nodes) >= 1 and is_connected(g) and non_loops == len(g.nodes) - 1


def is_tree(g: ColoredMultigraph) -> bool:
    return not any(e.is_loop for e in g.edges) and is_tree_ignoring_loops(g)


def is_simple(g: ColoredMultigraph) -> bool:
    pairs = set()
    for e in g.edges:
        if e.is_loop:
            return False
        key = (e.u, e.v) if e.directed else frozenset((e.u, e.v))
        if key in pairs:
            return False
        pairs.add(key)
    return True


def relabel(g: ColoredMultigraph, node_map: Mapping, eid_offset: int = 0) -> ColoredMultigraph:
    """Rename nodes through ``node_map`` and shift every eid by ``eid_offset``."""
    edges = [Edge(e.eid + eid_offset, node_map[e.u], node_map[e.v], e.color, e.directed) for e in g.edges]
    labels = {node_map[v]: x for v, x in g.labels.items()} if g.labels is not None else None
    order = [node_map[v] for v in g.order] if g.order is not None else None
    return make_graph(g.model, edges, nodes=[node_map[v] for v in g.nodes], k=g.k, labels=labels, order=order)


def shift_nodes(g: ColoredMultigraph, offset: int, eid_offset: int = 0) -> ColoredMultigraph:
    return relabel(g, {v: v + offset for v in g.nodes}, eid_offset)


def remove_edge(g: ColoredMultigraph, eid: int) -> ColoredMultigraph:
    return make_graph(g.model, [e for e in g.edges if e.eid != eid], nodes=g.nodes, k=g.k,
                      labels=g.labels, order=g.order)


def with_model(g: ColoredMultigraph, model: str, labels=None, order=None) -> ColoredMultigraph:
    return make_graph(model, g.edges, nodes=g.nodes, k=g.k, labels=labels, order=order)


# -- serialization ---------------------------------------------------------

def graph_doc(g: ColoredMultigraph) -> dict:
    doc = {"model": g.model, "k": g.k}
    nodes = []
    for v in g.nodes:
        entry = {"id": v}
        if g.labels is not None and v in g.labels:
            entry["label"] = g.labels[v]
        nodes.append(entry)
    doc["nodes"] = nodes
    if g.order is not None:
        doc["order"] = list(g.order)
    doc["edges"] = [
        {"u": e.u, "v": e.v, "color": e.color, "directed": e.directed}
        for e in sorted(g.edges, key=lambda e: e.eid)
    ]
    return doc


def encode_graph(g: ColoredMultigraph) -> str:
    return json.dumps(graph_doc(g), indent=2) + "\n"


def _require(obj, key, kind, where):
    if not isinstance(obj, Mapping) or key not in obj:
        raise ParseError(f"missing key {key!r}", where)
    value = obj[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ParseError(f"{key!r} must be an integer", where)
    if kind is not int and not isinstance(value, kind):
        raise ParseError(f"{key!r} has the wrong type", where)
    return value


def graph_from_doc(doc) -> ColoredMultigraph:
    if not isinstance(doc, Mapping):
        raise ParseError("graph document must be an object", "$")
    model = _require(doc, "model", str, "$")
    if model not in MODELS:
        raise ParseError(f"unknown model {model!r}", "$.model")
    k = _require(doc, "k", int, "$")
    raw_nodes = _require(doc, "nodes", list, "$")
    nodes, labels = [], {}
    for i, n in enumerate(raw_nodes):
        where = f"$.nodes[{i}]"
        nodes.append(_require(n, "id", int, where))
        if n.get("label") is not None:
            labels[n["id"]] = _require(n, "label", int, where)
    order = doc.get("order")
    if order is not None and not (isinstance(order, list) and all(isinstance(x, int) for x in order)):
        raise ParseError("order must be a list of node ids", "$.order")
    node_set = set(nodes)
    edges = []
    for i, e in enumerate(_require(doc, "edges", list, "$")):
        where = f"$.edges[{i}]"
        u = _require(e, "u", int, where)
        v = _require(e, "v", int, where)
        color = _require(e, "color", int, where)
        directed = e.get("directed", model == "PO")
        if not isinstance(directed, bool):
            raise ParseError("'directed' must be a boolean", where)
        for end in (u, v):
            if end not in node_set:
                raise ParseError(f"edge references absent node {end}", where)
        edges.append(Edge(i, u, v, color, directed))
    return make_graph(model, edges, nodes=nodes, k=k, labels=labels or None, order=order)


def decode_graph(text: str) -> ColoredMultigraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return graph_from_doc(doc)

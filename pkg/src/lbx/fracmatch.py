"""Exact fractional matchings, the maximality verifier and the propagation walk."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import InvalidOutput, NoContinuation, ParseError, UnknownNode
from .graph_core import ColoredMultigraph

ONE = Fraction(1)
ZERO = Fraction(0)


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, eq=False)
class FractionalMatching:
    """Edge weights ``eid -> Fraction`` on a fixed graph.

    Feasibility is *not* an invariant here: infeasible weightings are
    legitimate inputs to the verifier.  Only the range [0, 1] is enforced.
    """

    graph: ColoredMultigraph
    weights: Mapping

    def __post_init__(self):
        w = {eid: Fraction(x) for eid, x in dict(self.weights).items()}
        missing = set(self.graph.edge_by_id) - set(w)
        extra = set(w) - set(self.graph.edge_by_id)
        if missing or extra:
            raise InvalidOutput(f"weights missing for {sorted(missing)}, unknown eids {sorted(extra)}")
        for eid, x in w.items():
            if not ZERO <= x <= ONE:
                raise InvalidOutput(f"weight {x} of edge {eid} outside [0, 1]")
        object.__setattr__(self, "weights", w)

    def __getitem__(self, eid) -> Fraction:
        return self.weights[eid]

    def __eq__(self, other):
        return (isinstance(other, FractionalMatching) and self.graph == other.graph
                and self.weights == other.weights)

    def __hash__(self):
        return hash(tuple(sorted(self.weights.items())))

    def node_weight(self, v) -> Fraction:
        return node_weight(self.graph, self, v)


def _w(y, eid) -> Fraction:
    return y.weights[eid] if isinstance(y, FractionalMatching) else Fraction(y[eid])


def node_weight(g: ColoredMultigraph, y, v) -> Fraction:
    """y[v]: an undirected loop counts once, a directed loop twice (head and tail)."""
    if v not in g.node_set:
        raise UnknownNode(f"node {v} not in graph")
    return sum((_w(y, eid) for eid, _ in g.incidence[v].values()), ZERO)


@dataclass
class MaximalityReport:
    feasible: bool
    saturated: set = field(default_factory=set)
    violations: list = field(default_factory=list)  # (kind, node-or-eid)

    @property
    def maximal(self) -> bool:
        return not any(kind == "UnsaturatedEdge" for kind, _ in self.violations)

    @property
    def ok(self) -> bool:
        return self.feasible and self.maximal

    def first(self, kind: str):
        return next((x for k, x in self.violations if k == kind), None)

    def doc(self) -> dict:
        return {
            "feasible": self.feasible,
            "maximal": self.maximal,
            "saturated": sorted(self.saturated),
            "violations": [{"kind": k, "at": x} for k, x in self.violations],
        }


def check_maximal_fm(g: ColoredMultigraph, y) -> MaximalityReport:
    totals = {v: node_weight(g, y, v) for v in g.nodes}
    violations = [("Infeasible", v) for v in g.nodes if totals[v] > ONE]
    saturated = {v for v in g.nodes if totals[v] == ONE}
    for e in g.edges:
        if e.u not in saturated and e.v not in saturated:
            violations.append(("UnsaturatedEdge", e.eid))
    feasible = not any(k == "Infeasible" for k, _ in violations)
    return MaximalityReport(feasible, saturated, violations)


def disagreement_edges(g: ColoredMultigraph, y, y2) -> set:
    return {e.eid for e in g.edges if _w(y, e.eid) != _w(y2, e.eid)}


def disagreement_subgraph(g: ColoredMultigraph, y, y2) -> tuple:
    """(eids, nodes) of the subgraph induced by the disagreeing edges."""
    eids = disagreement_edges(g, y, y2)
    nodes = set()
    for eid in eids:
        e = g.edge_by_id[eid]
        nodes.update((e.u, e.v))
    return eids, nodes


def propagation_walk(g: ColoredMultigraph, y, y2, start, virtual_color: int,
                     virtual_weights: tuple | None = None) -> tuple:
    """Follow disagreements from ``start`` until a loop is reached.

    The walk enters ``start`` through a color-``virtual_color`` edge on which
    the two matchings disagree.  If that edge belongs to ``g`` it is the
    arrival edge; otherwise it lies outside ``g`` and ``virtual_weights``
    (its weight under ``y`` and ``y2``) can be supplied so that saturation of
    ``start`` is checked too.  At every node the next edge is the disagreeing
    edge other than the arrival edge with the lowest color, then lowest eid.

    Returns ``(g_star, e_star)`` where ``e_star`` is a loop at ``g_star``.
    """
    if start not in g.node_set:
        raise UnknownNode(f"node {start} not in graph")
    arrival = None
    slot = g.incidence[start]
    for (color, d), (eid, _) in slot.items():
        if color == virtual_color and d != "out":
            arrival = eid
            break
    x, visited = start, set()
    while True:
        if x in visited:
            raise NoContinuation(x, "walk revisited a node; graph is not a tree ignoring loops")
        visited.add(x)
        wy, wy2 = node_weight(g, y, x), node_weight(g, y2, x)
        if x == start and arrival is None:
            if virtual_weights is not None:
                wy, wy2 = wy + Fraction(virtual_weights[0]), wy2 + Fraction(virtual_weights[1])
            else:
                wy = wy2 = ONE
        if wy != ONE or wy2 != ONE:
            raise NoContinuation(x, f"node not saturated in both matchings ({wy}, {wy2})")
        candidates = sorted(
            (color, eid)
            for (color, _), (eid, _) in g.incidence[x].items()
            if eid != arrival and _w(y, eid) != _w(y2, eid)
        )
        if not candidates:
            raise NoContinuation(x, "no other disagreeing edge")
        _, eid = candidates[0]
        e = g.edge_by_id[eid]
        if e.is_loop:
            return x, eid
        x, arrival = e.other(x), eid


# -- serialization ---------------------------------------------------------

def fm_doc(y: FractionalMatching) -> dict:
    """Weights keyed by the edge's position in the graph document (sorted by eid)."""
    return {"weights": {str(i): frac_str(y.weights[e.eid]) for i, e in enumerate(y.graph.edges)}}


def encode_fm(y: FractionalMatching) -> str:
    return json.dumps(fm_doc(y), indent=2) + "\n"


def fm_from_doc(g: ColoredMultigraph, doc) -> FractionalMatching:
    if not isinstance(doc, dict) or not isinstance(doc.get("weights"), dict):
        raise ParseError("FM document must be an object with a 'weights' object", "$.weights")
    weights = {}
    raw = doc["weights"]
    for i, e in enumerate(g.edges):
        key = str(i)
        if key not in raw:
            raise ParseError(f"missing weight for edge {i}", f"$.weights.{key}")
        try:
            weights[e.eid] = Fraction(raw[key])
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise ParseError(f"bad weight {raw[key]!r}: {exc}", f"$.weights.{key}") from None
    extra = set(raw) - {str(i) for i in range(len(g.edges))}
    if extra:
        raise ParseError(f"weights for unknown edges {sorted(extra)}", "$.weights")
    try:
        return FractionalMatching(g, weights)
    except InvalidOutput as exc:
        raise ParseError(str(exc), "$.weights") from None


def decode_fm(g: ColoredMultigraph, text: str) -> FractionalMatching:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return fm_from_doc(g, doc)

"""Simulations between models and the finite checks around identifiers.

* ``ec_to_po``: run a PO algorithm on the doubled graph (each EC edge
  becomes two antiparallel arcs) and add the two arc weights back up.
* ``po_to_oi``: order a PO cover view canonically and hand it to an OI
  algorithm.
* ``saturation_indicator``, ``sparse_subset``, ``ramsey_search`` and
  ``check_order_invariance``: the desk-scale pieces of the OI -> ID step.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .canon_order import order_view
from .errors import GuardrailExceeded, InsufficientIdentifiers, ModelMismatch
from .graph_core import IN, OUT, ColoredMultigraph, Edge, make_graph, with_model
from .locality import BallView, CoverView, LocalAlgorithm, LocalOutput, neighborhood

RAMSEY_MAX_PATTERN = 3
RAMSEY_MAX_UNIVERSE = 24


# -- EC -> PO --------------------------------------------------------------

def double_graph(g: ColoredMultigraph) -> ColoredMultigraph:
    """EC edge ``e={u,v}`` -> arcs ``2e: u->v`` and ``2e+1: v->u``; an EC loop -> one directed loop ``2e``."""
    if g.model != "EC":
        raise ModelMismatch("only EC graphs are doubled")
    arcs = []
    for e in g.edges:
        arcs.append(Edge(2 * e.eid, e.u, e.v, e.color, True))
        if not e.is_loop:
            arcs.append(Edge(2 * e.eid + 1, e.v, e.u, e.color, True))
    return make_graph("PO", arcs, nodes=g.nodes, k=g.k)


def ec_to_po(A_po: LocalAlgorithm) -> LocalAlgorithm:
    """EC algorithm simulating ``A_po`` on the doubled graph."""
    if A_po.model != "PO":
        raise ModelMismatch(f"{A_po.name} is not a PO algorithm")

    def fn(view):
        ball = view.materialize()
        doubled = double_graph(ball.graph)
        out = A_po(CoverView(doubled, ball.root, view.radius))
        return LocalOutput.of({(c, d): out[(c, OUT)] + out[(c, IN)] for c, d in view.slots(view.root)})

    return LocalAlgorithm(f"ec<-{A_po.name}", "EC", fn,
                          lambda delta, k: A_po.runtime(2 * delta, k), palette=A_po.palette)


# -- PO -> OI --------------------------------------------------------------

def po_to_oi(A_oi: LocalAlgorithm) -> LocalAlgorithm:
    """PO algorithm that runs ``A_oi`` on the canonically ordered view."""
    if A_oi.model != "OI":
        raise ModelMismatch(f"{A_oi.name} is not an OI algorithm")

    def fn(view):
        return A_oi(order_view(view))

    return LocalAlgorithm(f"po<-{A_oi.name}", "PO", fn, A_oi.runtime,
                          palette=A_oi.palette, output_kind=A_oi.output_kind)


# -- OI -> ID pieces -------------------------------------------------------

def saturation_indicator(A: LocalAlgorithm) -> LocalAlgorithm:
    """1 if ``A`` saturates the root of the view, else 0."""
    if A.model != "ID":
        raise ModelMismatch(f"{A.name} is not an ID algorithm")

    def fn(view):
        return 1 if A(view).total() == 1 else 0

    return LocalAlgorithm(f"sat[{A.name}]", "ID", fn, A.runtime, palette=A.palette, output_kind="value")


def sparse_subset(I, m: int) -> list:
    """Every (m+1)-th element of ``I``, starting with the first."""
    I = sorted(I)
    if not I:
        raise ValueError("identifier set must be nonempty")
    return I[:: m + 1]


def ball_size_bound(delta: int, r: int) -> int:
    """Maximum number of nodes within distance ``r`` in a simple graph of max degree ``delta``."""
    if delta <= 1 or r == 0:
        return 1 + min(delta, 1) * min(r, 1)
    return 1 + delta * sum((delta - 1) ** i for i in range(r))


def gap_for_runtime(delta: int, t: int) -> int:
    """The spacing ``m``: size of a (2t+1)-ball, counted on simple graphs."""
    return ball_size_bound(delta, 2 * t + 1)


def _pattern_output(A: LocalAlgorithm, pattern: ColoredMultigraph, root, labels: dict):
    g = make_graph("ID", pattern.edges, nodes=pattern.nodes, k=pattern.k, labels=labels)
    t = A.runtime(g.max_degree, g.k)
    return A(neighborhood(g, root, t))


def _coloring(A, pattern, root):
    nodes = list(pattern.nodes)
    perms = list(itertools.permutations(range(len(nodes))))

    def color(subset: tuple):
        # one output per order type: perm[i] is the rank of node i's identifier
        return tuple(_pattern_output(A, pattern, root, {v: subset[p[i]] for i, v in enumerate(nodes)})
                     for p in perms)

    return color


def _color_key(color: tuple) -> tuple:
    # numeric outputs sort numerically; structured outputs by their items
    return tuple((0, x, ()) if isinstance(x, (int, Fraction)) else (1, 0, getattr(x, "items", repr(x)))
                 for x in color)


def ramsey_search(A: LocalAlgorithm, pattern: ColoredMultigraph, universe, q: int, root=None):
    """Smallest q-subset of ``universe`` on which ``A`` is order-invariant on ``pattern``.

    Every p-subset (p = pattern size) is colored by the table
    "order type -> output".  A q-subset works iff all its p-subsets share a
    color.  Color classes are tried in increasing order of the color and,
    within a class, subsets in lexicographic order; the first hit is
    returned, or ``None``.
    """
    universe = sorted(set(universe))
    p = len(pattern.nodes)
    if p > RAMSEY_MAX_PATTERN or len(universe) > RAMSEY_MAX_UNIVERSE or q > len(universe) or q < 0:
        raise GuardrailExceeded(
            f"ramsey search limited to patterns of <= {RAMSEY_MAX_PATTERN} nodes, "
            f"universes of <= {RAMSEY_MAX_UNIVERSE} identifiers and q <= |universe|")
    if root is None:
        root = pattern.nodes[0]
    if q < p:
        return universe[:q]
    color = _coloring(A, pattern, root)
    table = {s: color(s) for s in itertools.combinations(universe, p)}

    def extend(chosen: list, start: int, target):
        if len(chosen) == q:
            return list(chosen)
        for i in range(start, len(universe)):
            x = universe[i]
            if len(universe) - i < q - len(chosen):
                break
            if all(table[s + (x,)] == target for s in itertools.combinations(chosen, p - 1)):
                found = extend(chosen + [x], i + 1, target)
                if found:
                    return found
        return None

    for target in sorted(set(table.values()), key=_color_key):
        found = extend([], 0, target)
        if found:
            return found
    return None


def verify_order_invariance_on(A: LocalAlgorithm, pattern: ColoredMultigraph, subset, root=None) -> list:
    """Brute force: every injective assignment from ``subset``; return outputs that disagree within an order type."""
    if root is None:
        root = pattern.nodes[0]
    nodes = list(pattern.nodes)
    seen, bad = {}, []
    for values in itertools.permutations(sorted(subset), len(nodes)):
        labels = dict(zip(nodes, values))
        order_type = tuple(sorted(range(len(nodes)), key=lambda i: values[i]))
        out = _pattern_output(A, pattern, root, labels)
        if order_type in seen and seen[order_type][1] != out:
            bad.append({"order_type": order_type, "labels": labels, "output": str(out),
                        "expected": str(seen[order_type][1]), "with": seen[order_type][0]})
        seen.setdefault(order_type, (labels, out))
    return bad


@dataclass
class CheckReport:
    check: str
    status: str = "pass"
    counterexample: dict | None = None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def doc(self) -> dict:
        d = {"check": self.check, "status": self.status, "counterexample": self.counterexample}
        if self.stats:
            d["stats"] = self.stats
        return d


def _id_view(ordered: BallView, seq, values) -> BallView:
    labels = dict(zip(seq, values))
    g = with_model(ordered.graph, "ID", labels=labels)
    return BallView(g, ordered.root, ordered.radius)


def _describe(out) -> object:
    return out.doc() if isinstance(out, LocalOutput) else str(out)


def check_order_invariance(A: LocalAlgorithm, g: ColoredMultigraph, J, trials: int = 20, seed=0) -> CheckReport:
    """Sampled saturation and order-invariance checks for an ID algorithm.

    For each trial, a node of ``g`` is picked, its canonically ordered cover
    ball is built and labeled by random order-preserving assignments from
    ``J``.  Single-node moves inside gaps are compared first, then a chain of
    single-node moves between two arbitrary assignments.
    """
    if g.model != "PO":
        raise ModelMismatch("order invariance is checked on PO graphs")
    J = sorted(set(J))
    rng = random.Random(seed)
    t = A.runtime(g.max_degree, g.k)
    report = CheckReport("order-invariance")
    views = {}
    compared = 0

    def run(ordered, seq, values):
        return A(_id_view(ordered, seq, values))

    def fail(kind, v, seq, a, b, out_a, out_b=None):
        report.status = "fail"
        report.counterexample = {
            "kind": kind, "node": v,
            "assignment_1": dict(zip(map(str, seq), a)),
            "output_1": _describe(out_a),
        }
        if b is not None:
            report.counterexample["assignment_2"] = dict(zip(map(str, seq), b))
            report.counterexample["output_2"] = _describe(out_b)
        return report

    for _ in range(trials):
        v = rng.choice(g.nodes)
        if v not in views:
            ordered = order_view(CoverView(g, v, t))
            views[v] = (ordered, list(ordered.graph.order))
        ordered, seq = views[v]
        n = len(seq)
        if len(J) < n:
            raise InsufficientIdentifiers(f"need {n} identifiers, J has {len(J)}")
        phi1 = sorted(rng.sample(J, n))
        phi2 = sorted(rng.sample(J, n))
        out1 = run(ordered, seq, phi1)
        if A.output_kind == "fm" and out1.total() != 1:
            return fail("unsaturated", v, seq, phi1, None, out1)
        # single-node move within a gap
        i = rng.randrange(n)
        lo = phi1[i - 1] if i > 0 else -1
        hi = phi1[i + 1] if i + 1 < n else J[-1] + 1
        room = [x for x in J if lo < x < hi and x != phi1[i]]
        if room:
            moved = list(phi1)
            moved[i] = rng.choice(room)
            out_m = run(ordered, seq, moved)
            compared += 1
            if out_m != out1:
                return fail("order-dependent", v, seq, phi1, moved, out1, out_m)
        # chain phi1 -> phi2 by single-node moves that keep the order
        cur, cur_out = list(phi1), out1
        ups = [j for j in range(n) if phi2[j] > phi1[j]]
        downs = [j for j in range(n) if phi2[j] < phi1[j]]
        for j in sorted(ups, reverse=True) + sorted(downs):
            nxt = list(cur)
            nxt[j] = phi2[j]
            nxt_out = run(ordered, seq, nxt)
            compared += 1
            if A.output_kind == "fm" and nxt_out.total() != 1:
                return fail("unsaturated", v, seq, nxt, None, nxt_out)
            if nxt_out != cur_out:
                return fail("order-dependent", v, seq, cur, nxt, cur_out, nxt_out)
            cur, cur_out = nxt, nxt_out
    report.stats = {"trials": trials, "comparisons": compared, "runtime": t}
    return report

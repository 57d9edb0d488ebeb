"""Canonical linear order on the nodes of PO-trees.

Every node orders its incident edges (outgoing by color, then incoming by
color) and every edge orders its endpoints (tail before head).  The signed
value of the path ``x ~> y`` adds +1/-1 for each edge and each interior node
depending on whether the path goes "forward" in those local orders, and
``x < y`` iff that value is positive.  The order only depends on colors and
orientations, so it is the same in every color-respecting embedding.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cmp_to_key

from .errors import ModelMismatch, NotATree, UnknownNode
from .graph_core import IN, OUT, ColoredMultigraph, is_tree, make_graph, with_model
from .locality import BallView, CoverView, canonical_code, neighborhood

LESS, EQUAL, GREATER = -1, 0, 1


class TreeIndex:
    """Parent pointers and depths of a tree, rooted at its smallest node."""

    def __init__(self, g: ColoredMultigraph):
        if not is_tree(g):
            raise NotATree("canonical order needs a tree")
        root = g.nodes[0]
        self.graph = g
        self.parent = {root: None}
        self.up_edge = {root: None}
        self.depth = {root: 0}
        stack = [root]
        while stack:
            x = stack.pop()
            for _, (eid, w) in g.incidence[x].items():
                if w not in self.parent:
                    self.parent[w] = x
                    self.up_edge[w] = g.edge_by_id[eid]
                    self.depth[w] = self.depth[x] + 1
                    stack.append(w)

    @classmethod
    def of(cls, g: ColoredMultigraph) -> "TreeIndex":
        idx = g.scratch.get("tree-index")
        if idx is None:
            idx = g.scratch["tree-index"] = cls(g)
        return idx

    def path(self, x, y) -> tuple:
        """Nodes and edges of the unique path from ``x`` to ``y``."""
        for z in (x, y):
            if z not in self.depth:
                raise UnknownNode(f"node {z} not in tree")
        left, right = [x], [y]
        left_e, right_e = [], []
        a, b = x, y
        while self.depth[a] > self.depth[b]:
            left_e.append(self.up_edge[a])
            a = self.parent[a]
            left.append(a)
        while self.depth[b] > self.depth[a]:
            right_e.append(self.up_edge[b])
            b = self.parent[b]
            right.append(b)
        while a != b:
            left_e.append(self.up_edge[a])
            a = self.parent[a]
            left.append(a)
            right_e.append(self.up_edge[b])
            b = self.parent[b]
            right.append(b)
        nodes = left + right[-2::-1]
        edges = left_e + right_e[::-1]
        return nodes, edges


def _edge_rank(e, v) -> tuple:
    # outgoing edges first (by color), then incoming (by color)
    return (0, e.color) if e.u == v else (1, e.color)


def _as_tree(tree):
    """(graph, node translator) for a PO tree graph or tree-shaped PO view."""
    if isinstance(tree, CoverView):
        walks = tree.nodes()
        index = {w: i for i, w in enumerate(walks)}
        return tree.materialize().graph, index.__getitem__
    if isinstance(tree, BallView):
        tree = tree.graph
    if not isinstance(tree, ColoredMultigraph):
        raise TypeError(f"cannot order {type(tree).__name__}")
    if not all(e.directed for e in tree.edges):
        raise ModelMismatch("canonical order is defined on oriented trees")
    return tree, (lambda x: x)


def _path_value(idx: TreeIndex, x, y) -> int:
    if x == y:
        if x not in idx.depth:
            raise UnknownNode(f"node {x} not in tree")
        return 0
    nodes, edges = idx.path(x, y)
    value = 0
    for i, e in enumerate(edges):
        value += 1 if e.u == nodes[i] else -1
    for i in range(1, len(nodes) - 1):
        v = nodes[i]
        value += 1 if _edge_rank(edges[i - 1], v) < _edge_rank(edges[i], v) else -1
    return value


def path_value(tree, x, y) -> int:
    g, tr = _as_tree(tree)
    return _path_value(TreeIndex.of(g), tr(x), tr(y))


def canonical_compare(tree, x, y) -> int:
    """``LESS`` iff ``x`` precedes ``y`` (positive path value)."""
    v = path_value(tree, x, y)
    return LESS if v > 0 else GREATER if v < 0 else EQUAL


def canonical_sorted(g: ColoredMultigraph, nodes=None) -> list:
    idx = TreeIndex.of(g)

    def cmp(a, b):
        v = _path_value(idx, a, b)
        return -1 if v > 0 else 1 if v < 0 else 0

    return sorted(g.nodes if nodes is None else nodes, key=cmp_to_key(cmp))


def order_view(view) -> BallView:
    """Materialize a tree-shaped PO view and decorate it with the canonical order."""
    if view.model != "PO":
        raise ModelMismatch("order_view expects a PO view")
    ball = view.materialize()
    g = ball.graph
    if not is_tree(g):
        raise NotATree("only tree-shaped views can be ordered")
    order = canonical_sorted(g)
    return BallView(with_model(g, "OI", order=order), ball.root, ball.radius)


def regular_tree_ball(d: int, radius: int) -> BallView:
    """Radius-``radius`` ball of the 2d-regular d-colored PO-tree."""
    loops = make_graph("PO", [(0, 0, c) for c in range(1, d + 1)], nodes=[0], k=d)
    return CoverView(loops, 0, radius).materialize()


@dataclass
class HomogeneityReport:
    d: int
    r: int
    trials: int
    ok: bool
    violation: dict | None = None
    checked: list = field(default_factory=list)

    def doc(self) -> dict:
        return {"check": "homogeneity", "status": "pass" if self.ok else "fail",
                "d": self.d, "r": self.r, "trials": self.trials, "counterexample": self.violation}


def check_homogeneity(d: int, r: int, trials: int = 20, seed=0, tamper: bool = False) -> HomogeneityReport:
    """Compare ordered radius-r balls around random interior nodes of the tree.

    With ``tamper`` the order of the center's first two neighbours is
    swapped and the center takes part in the first sampled pair, so the
    check must fail (a negative control).
    """
    if d < 1 or r < 0:
        raise ValueError("need d >= 1 and r >= 0")
    ball = regular_tree_ball(d, r + 2)
    g = ball.graph
    order = canonical_sorted(g)
    if tamper:
        a, b = sorted(w for _, (_, w) in g.incidence[0].items())[:2]
        i, j = order.index(a), order.index(b)
        order[i], order[j] = order[j], order[i]
    ordered = with_model(g, "OI", order=order)
    depth = TreeIndex.of(g).depth
    interior = sorted(v for v in g.nodes if depth[v] <= 2)
    rng = random.Random(seed)
    pairs = [(rng.choice(interior), rng.choice(interior)) for _ in range(trials)]
    if tamper and pairs:
        pairs[0] = (0, next(v for v in interior if depth[v] == 2))
    codes = {}
    report = HomogeneityReport(d, r, trials, ok=True)
    for u, w in pairs:
        for x in (u, w):
            if x not in codes:
                codes[x] = canonical_code(neighborhood(ordered, x, r))
        report.checked.append((u, w))
        if codes[u] != codes[w]:
            report.ok = False
            report.violation = {"u": u, "w": w, "radius": r}
            break
    return report

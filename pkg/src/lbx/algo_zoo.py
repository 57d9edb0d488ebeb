"""Bundled local algorithms and the ``AlgorithmId`` registry."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable

from .errors import NotTruncatable, UnknownAlgorithm, ViewTooShallow
from .graph_core import IN, OUT
from .locality import LocalAlgorithm, LocalOutput, const_runtime

HALF = Fraction(1, 2)


def _share_undirected(slot) -> Fraction:
    return Fraction(1)


def _share_halving(slot) -> Fraction:
    return HALF if slot[1] in (OUT, IN) else Fraction(1)


def greedy_weights(view, share: Callable = _share_undirected, max_color: int | None = None) -> dict:
    """Color-by-color greedy, evaluated recursively on a view.

    The weight of a color-c slot ``s`` at ``x`` leading to ``z`` is
    ``share(s) * min(res(x, c), res(z, c))`` where ``res(x, c)`` is one
    minus the weight ``x`` already took on colors below ``c``.  A color-c
    computation only looks c hops deep, so radius ``k`` suffices.
    """
    memo: dict = {}

    def residual(x, c):
        total = Fraction(0)
        for s in view.slots(x):
            if s[0] < c:
                total += weight(x, s)
        return 1 - total

    def weight(x, s):
        key = (view.memo_key(x), s)
        val = memo.get(key)
        if val is None:
            c = s[0]
            if max_color is not None and c > max_color:
                val = Fraction(0)
            else:
                z = view.step(x, s)
                val = share(s) * min(residual(x, c), residual(z, c))
            memo[key] = val
        return val

    return {s: weight(view.root, s) for s in view.slots(view.root)}


def _needs(view, depth: int, name: str):
    if view.radius < depth:
        raise ViewTooShallow(f"{name} needs radius {depth}, view has {view.radius}")


def greedy_by_color(k: int) -> LocalAlgorithm:
    """EC greedy maximal FM; runtime ``k``."""
    if k < 1:
        raise ValueError("k must be positive")
    name = f"greedy:k={k}"

    def fn(view):
        _needs(view, k, name)
        return LocalOutput.of(greedy_weights(view))

    return LocalAlgorithm(name, "EC", fn, const_runtime(k), palette=k)


def halving_greedy(k: int) -> LocalAlgorithm:
    """PO greedy that splits each color's budget evenly between an edge's two arcs.

    Every directed edge of color c gets ``min(res(tail), res(head)) / 2``.
    Always feasible; on the doubled image of an EC graph it reproduces EC
    greedy (antiparallel halves sum to the EC weight), hence is maximal there.
    """
    name = f"pogreedy:k={k}"

    def fn(view):
        _needs(view, k, name)
        return LocalOutput.of(greedy_weights(view, share=_share_halving))

    return LocalAlgorithm(name, "PO", fn, const_runtime(k), palette=k)


def uniform_regular(d: int) -> LocalAlgorithm:
    """``1/d`` on every slot; a maximal FM exactly on d-regular graphs."""
    if d < 1:
        raise ValueError("d must be positive")
    w = Fraction(1, d)

    def fn(view):
        return LocalOutput.of({s: w for s in view.slots(view.root)})

    return LocalAlgorithm(f"uniform:d={d}", "EC", fn, const_runtime(1))


def zero_algorithm(model: str = "EC") -> LocalAlgorithm:
    def fn(view):
        return LocalOutput.of({s: 0 for s in view.slots(view.root)})

    return LocalAlgorithm("zero" if model == "EC" else f"zero:{model}", model, fn, const_runtime(1))


def truncate(A: LocalAlgorithm, t: int) -> LocalAlgorithm:
    """Greedy restricted to colors ``<= t``; larger colors get weight 0."""
    m = re.fullmatch(r"greedy:k=(\d+)", A.name)
    if m is None:
        raise NotTruncatable(f"only greedy_by_color can be truncated, not {A.name}")
    k = int(m.group(1))
    if not 1 <= t < k:
        raise NotTruncatable(f"truncation depth {t} must lie in 1..{k - 1}")
    name = f"trunc:greedy:k={k}:t={t}"

    def fn(view):
        _needs(view, t, name)
        return LocalOutput.of(greedy_weights(view, max_color=t))

    return LocalAlgorithm(name, "EC", fn, const_runtime(t), palette=k)


def label_blind(A: LocalAlgorithm, model: str, name: str | None = None) -> LocalAlgorithm:
    """Run an anonymous algorithm on OI/ID views, ignoring order and labels."""
    return LocalAlgorithm(name or f"{model.lower()}[{A.name}]", model, A.output_fn, A.runtime,
                          palette=A.palette, output_kind=A.output_kind)


def oi_greedy(k: int) -> LocalAlgorithm:
    """Order-ignoring greedy for OI views (halving on directed views)."""
    return label_blind(halving_greedy(k), "OI", name=f"oi-greedy:k={k}")


def id_greedy(k: int) -> LocalAlgorithm:
    return label_blind(halving_greedy(k), "ID", name=f"id-greedy:k={k}")


def parity_algorithm() -> LocalAlgorithm:
    """ID algorithm whose output is the root identifier mod 2."""
    def fn(view):
        return Fraction(view.label(view.root) % 2)

    return LocalAlgorithm("parity", "ID", fn, const_runtime(0), output_kind="value")


# -- registry --------------------------------------------------------------

def _chain(k: int) -> LocalAlgorithm:
    from .simulations import ec_to_po, po_to_oi
    A = ec_to_po(po_to_oi(oi_greedy(k)))
    A.name = f"chain:k={k}"
    return A


_PATTERNS = [
    (r"greedy:k=(\d+)", lambda m: greedy_by_color(int(m[1]))),
    (r"uniform:d=(\d+)", lambda m: uniform_regular(int(m[1]))),
    (r"trunc:greedy:k=(\d+):t=(\d+)", lambda m: truncate(greedy_by_color(int(m[1])), int(m[2]))),
    (r"pogreedy:k=(\d+)", lambda m: halving_greedy(int(m[1]))),
    (r"oi-greedy:k=(\d+)", lambda m: oi_greedy(int(m[1]))),
    (r"id-greedy:k=(\d+)", lambda m: id_greedy(int(m[1]))),
    (r"chain:k=(\d+)", lambda m: _chain(int(m[1]))),
    (r"zero", lambda m: zero_algorithm("EC")),
    (r"parity", lambda m: parity_algorithm()),
]

ALGORITHM_IDS = ("greedy:k=K", "uniform:d=D", "trunc:greedy:k=K:t=T", "pogreedy:k=K",
                 "oi-greedy:k=K", "id-greedy:k=K", "chain:k=K", "zero", "parity")


def resolve(algorithm_id: str) -> LocalAlgorithm:
    """Turn an ``AlgorithmId`` string such as ``"greedy:k=8"`` into an algorithm."""
    for pattern, build in _PATTERNS:
        m = re.fullmatch(pattern, algorithm_id.strip())
        if m:
            try:
                return build(m)
            except ValueError as exc:
                raise UnknownAlgorithm(f"{algorithm_id}: {exc}") from None
    raise UnknownAlgorithm(f"unknown algorithm {algorithm_id!r}; known forms: {', '.join(ALGORITHM_IDS)}")

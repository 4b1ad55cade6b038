"""Confusion graph over source realizations and the clique lower bound.

Two realizations are confusable when some user must tell them apart: they
differ on the user's must-decode sources while agreeing on its side
information. Any mechanism meeting the perfect-decoding constraints sends
confusable realizations to disjoint output sets, which is what makes
``log2 omega`` of the subgraph with ``x_P`` fixed a lower bound on leakage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .system import SystemSpec

DEFAULT_MAX_VERTICES = 2 ** 20


class GraphTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionGraph:
    adjacency: np.ndarray

    @property
    def vertex_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def vertices(self) -> np.ndarray:
        return np.arange(self.vertex_count)

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def to_dot(self, spec: SystemSpec | None = None) -> str:
        def name(v):
            if spec is None:
                return str(v)
            return "".join(str(c) for c in spec.sources.unpack(v))

        lines = ["graph confusion {"]
        lines += [f'  {v} [label="{name(v)}"];' for v in range(self.vertex_count)]
        lines += [f"  {a} -- {b};" for a, b in self.edges()]
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class InducedSubgraph:
    """Subgraph on realizations extending a fixed ``x_S``.

    ``vertices`` holds packed indices into the parent graph; ``adjacency``
    is indexed by position in ``vertices``.
    """

    fixed_set: frozenset[int]
    fixed_value: tuple[int, ...]
    vertices: np.ndarray
    adjacency: np.ndarray

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)


def confusable(spec: SystemSpec, x1: Sequence[int], x2: Sequence[int]) -> bool:
    for u in spec.users:
        if (any(x1[j] != x2[j] for j in u.must_decode)
                and all(x1[j] == x2[j] for j in u.side_info)):
            return True
    return False


def build(spec: SystemSpec, max_vertices: int = DEFAULT_MAX_VERTICES) -> ConfusionGraph:
    size = spec.sources.size
    if size > max_vertices:
        raise GraphTooLarge(f"system too large: {size} realizations exceeds cap {max_vertices}")
    adj = np.zeros((size, size), dtype=bool)
    for u in spec.users:
        if not u.must_decode:
            continue
        a = spec.sources.subset_index(u.side_info)
        w = spec.sources.subset_index(u.must_decode)
        adj |= (a[:, None] == a[None, :]) & (w[:, None] != w[None, :])
    adj.setflags(write=False)
    return ConfusionGraph(adj)


def induced(spec: SystemSpec, graph: ConfusionGraph, S, x_S: Sequence[int]) -> InducedSubgraph:
    S = frozenset(S)
    x_S = tuple(int(v) for v in x_S)
    if len(x_S) != len(S):
        raise ValueError("x_S must give one symbol per source in S")
    target = int(np.ravel_multi_index(x_S, spec.sources.sizes(S))) if S else 0
    verts = np.flatnonzero(spec.sources.subset_index(S) == target)
    sub = graph.adjacency[np.ix_(verts, verts)]
    return InducedSubgraph(S, x_S, verts, sub)


def _bitsets(adjacency: np.ndarray) -> list[int]:
    out = []
    for row in adjacency:
        bits = 0
        for j in np.flatnonzero(row):
            bits |= 1 << int(j)
        out.append(bits)
    return out


def _color_order(candidates: int, adj: list[int]) -> tuple[list[int], list[int]]:
    """Greedy sequential coloring; returns vertices and their color bounds."""
    order: list[int] = []
    bounds: list[int] = []
    uncolored = candidates
    color = 0
    while uncolored:
        color += 1
        avail = uncolored
        while avail:
            v = (avail & -avail).bit_length() - 1
            avail &= ~(1 << v) & ~adj[v]
            uncolored &= ~(1 << v)
            order.append(v)
            bounds.append(color)
    return order, bounds


def max_clique_size(adjacency: np.ndarray) -> int:
    """Exact clique number by branch and bound with greedy-coloring bounds."""
    size = adjacency.shape[0]
    if size == 0:
        return 0
    adj = _bitsets(np.asarray(adjacency, dtype=bool) & ~np.eye(size, dtype=bool))
    best = 1

    def expand(depth: int, candidates: int) -> None:
        nonlocal best
        order, bounds = _color_order(candidates, adj)
        for v, c in zip(reversed(order), reversed(bounds)):
            if depth + c <= best:
                return
            nxt = candidates & adj[v]
            if nxt:
                expand(depth + 1, nxt)
            elif depth + 1 > best:
                best = depth + 1
            candidates &= ~(1 << v)

    expand(0, (1 << size) - 1)
    return best


def clique_number(graph) -> int:
    """Clique number of a :class:`ConfusionGraph` or :class:`InducedSubgraph`."""
    return max_clique_size(graph.adjacency)


def theorem1_bound(spec: SystemSpec, graph: ConfusionGraph | None = None) -> float:
    """``log2 omega`` of the subgraph with ``x_P`` fixed to all-first-symbols."""
    graph = build(spec) if graph is None else graph
    sub = induced(spec, graph, spec.P, (0,) * len(spec.P))
    return math.log2(clique_number(sub))


def lemma1_holds(spec: SystemSpec, mech, graph: ConfusionGraph | None = None) -> bool:
    """True iff no cell of the deterministic mechanism holds a confusable pair."""
    graph = build(spec) if graph is None else graph
    adj = graph.adjacency
    for cell in mech.cells:
        idx = np.asarray(cell)
        if adj[np.ix_(idx, idx)].any():
            return False
    return True

"""Catalog of simple directed graphs up to isomorphism.

A digraph on ``n`` vertices is coded as an ``n(n-1)``-bit integer, one bit
per ordered pair ``(i, j)``, ``i != j``, in row-major order. The canonical
code of a graph is the minimum code over all vertex relabelings.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

import numpy as np

MAX_CATALOG_N = 5
_CHUNK = 10


def arc_list(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def decode(code: int, n: int) -> frozenset[tuple[int, int]]:
    """Arcs ``(tail, head)`` of the coded digraph (0-based vertices)."""
    return frozenset(a for k, a in enumerate(arc_list(n)) if code >> k & 1)


def encode(arcs, n: int) -> int:
    pos = {a: k for k, a in enumerate(arc_list(n))}
    return sum(1 << pos[a] for a in arcs)


def _canonical_codes(n: int) -> np.ndarray:
    arcs = arc_list(n)
    nbits = len(arcs)
    if nbits == 0:
        return np.zeros(1, dtype=np.int64)
    pos = {a: k for k, a in enumerate(arcs)}
    codes = np.arange(1 << nbits, dtype=np.int64)
    chunks = [(lo, min(lo + _CHUNK, nbits)) for lo in range(0, nbits, _CHUNK)]
    best = codes.copy()
    for perm in permutations(range(n)):
        target = np.array([pos[(perm[i], perm[j])] for i, j in arcs], dtype=np.int64)
        image = np.zeros_like(codes)
        for lo, hi in chunks:
            # permuted image of every value of this chunk of bits
            vals = np.arange(1 << (hi - lo), dtype=np.int64)
            table = np.zeros_like(vals)
            for b in range(hi - lo):
                table |= ((vals >> b) & 1) << target[lo + b]
            image |= table[(codes >> lo) & ((1 << (hi - lo)) - 1)]
        np.minimum(best, image, out=best)
    return np.unique(best)


@lru_cache(maxsize=None)
def catalog_codes(n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_CATALOG_N:
        raise ValueError(f"catalog too large: n={n} exceeds {MAX_CATALOG_N}")
    return tuple(int(c) for c in _canonical_codes(n))


def generate_digraph_catalog(n: int = 5) -> list[frozenset[tuple[int, int]]]:
    """All nonisomorphic simple digraphs on ``n`` vertices, by canonical code."""
    return [decode(c, n) for c in catalog_codes(n)]


def in_neighborhoods(arcs, n: int) -> list[frozenset[int]]:
    """``A_i = {j : (j, i) is an arc}`` for each vertex ``i``."""
    return [frozenset(j for j, i2 in arcs if i2 == i) for i in range(n)]

"""Exact discrete probability over products of independent finite sources.

All information quantities are in bits. Realizations of ``n`` sources are
enumerated in mixed-radix order with source 0 as the most significant digit,
which is also numpy's C order for an array of shape ``(a_0, ..., a_{n-1})``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
CMI_SLACK = 1e-9


class DistributionError(ValueError):
    """Raised for malformed or unnormalized distributions."""


@dataclass(frozen=True)
class SourceDistribution:
    """One finite source with full support."""

    pmf: tuple[float, ...]

    def __post_init__(self):
        p = np.asarray(self.pmf, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DistributionError("pmf must be a non-empty vector")
        if np.any(p <= 0):
            raise DistributionError("every source must have full support")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise DistributionError(f"pmf sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "pmf", tuple(float(v) for v in p))

    @classmethod
    def bernoulli(cls, p: float) -> "SourceDistribution":
        """Binary source with ``P(X=1) = p``."""
        return cls((1.0 - p, p))

    @classmethod
    def uniform(cls, k: int) -> "SourceDistribution":
        return cls(tuple([1.0 / k] * k))

    @property
    def alphabet_size(self) -> int:
        return len(self.pmf)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.pmf)


@dataclass(frozen=True)
class ProductDistribution:
    """Independent sources ``X_0, ..., X_{n-1}``."""

    sources: tuple[SourceDistribution, ...]

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        if not self.sources:
            raise DistributionError("need at least one source")

    @property
    def n(self) -> int:
        return len(self.sources)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s.alphabet_size for s in self.sources)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def sizes(self, subset: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.sources[i].alphabet_size for i in sorted(subset))

    def pack(self, coords: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(coords), self.shape))

    def unpack(self, index: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(index, self.shape))

    def coordinates(self) -> np.ndarray:
        """All realizations as an ``(size, n)`` integer array in packed order."""
        grids = np.indices(self.shape).reshape(self.n, -1)
        return grids.T.copy()

    def subset_index(self, subset: Iterable[int]) -> np.ndarray:
        """Packed index of ``x_S`` for every full realization.

        Coordinates of ``S`` are taken in increasing source order, so the
        result indexes the mixed-radix enumeration of the sub-alphabet.
        """
        subset = sorted(subset)
        if not subset:
            return np.zeros(self.size, dtype=np.int64)
        coords = self.coordinates()[:, subset]
        return np.ravel_multi_index(tuple(coords.T), self.sizes(subset)).astype(np.int64)

    def joint_table(self) -> np.ndarray:
        """Joint pmf with one axis per source."""
        table = np.ones(())
        for s in self.sources:
            table = np.multiply.outer(table, s.array)
        return table

    def pmf_flat(self) -> np.ndarray:
        return self.joint_table().reshape(-1)

    def marginal(self, subset: Iterable[int]) -> np.ndarray:
        """Flat pmf of ``X_S`` (sources in increasing order)."""
        table = np.ones(())
        for i in sorted(subset):
            table = np.multiply.outer(table, self.sources[i].array)
        return table.reshape(-1)

    def entropy(self, subset: Iterable[int]) -> float:
        return entropy(self.marginal(subset))

    def min_entropy(self, subset: Iterable[int]) -> float:
        return min_entropy(self.marginal(subset))


@dataclass(frozen=True)
class Joint:
    """A joint pmf over named discrete variables, one array axis per name."""

    table: np.ndarray
    names: tuple[Hashable, ...]

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        names = tuple(self.names)
        if table.ndim != len(names):
            raise DistributionError(
                f"table has {table.ndim} axes but {len(names)} names were given"
            )
        if len(set(names)) != len(names):
            raise DistributionError("variable names must be unique")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "names", names)

    def axis(self, name: Hashable) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DistributionError(f"unknown variable {name!r}") from None


def _check_normalized(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise DistributionError("negative probability")
    if abs(p.sum() - 1.0) > CMI_SLACK:
        raise DistributionError(f"distribution sums to {p.sum()!r}, not 1")
    return p


def _as_array(dist) -> np.ndarray:
    return dist.table if isinstance(dist, Joint) else np.asarray(dist, dtype=float)


def entropy(dist) -> float:
    """Shannon entropy in bits of a pmf (any shape) or a :class:`Joint`.

    Zero-probability points contribute nothing. A zero-dimensional table
    (the empty variable set) has entropy 0.
    """
    p = _check_normalized(_as_array(dist)).reshape(-1)
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def min_entropy(dist) -> float:
    """Renyi entropy of order infinity, ``-log2 max p``, in bits."""
    p = _check_normalized(_as_array(dist))
    return float(max(0.0, -np.log2(p.max())))


def marginalize(joint: Joint, keep: Iterable[Hashable]) -> Joint:
    """Sum out every variable not in ``keep``; kept variables keep their order."""
    keep = set(keep)
    axes = [joint.axis(k) for k in keep]
    drop = tuple(a for a in range(len(joint.names)) if a not in axes)
    names = tuple(nm for a, nm in enumerate(joint.names) if a not in drop)
    return Joint(joint.table.sum(axis=drop), names)


def _grouped(joint: Joint, groups: Sequence[Sequence[Hashable]]) -> np.ndarray:
    """Marginal over ``groups`` with each group flattened into a single axis."""
    flat = [name for g in groups for name in g]
    if len(set(flat)) != len(flat):
        raise DistributionError("variable groups must be disjoint")
    m = marginalize(joint, flat)
    order = [m.axis(name) for name in flat]
    t = np.transpose(m.table, order)
    shape = []
    pos = 0
    for g in groups:
        shape.append(int(np.prod(t.shape[pos:pos + len(g)], dtype=int)))
        pos += len(g)
    return t.reshape(shape)


def conditional_mutual_information(
    joint: Joint,
    v: Sequence[Hashable],
    y: Sequence[Hashable],
    z: Sequence[Hashable] = (),
) -> float:
    """``I(V; Y | Z)`` in bits by direct summation over the joint table.

    Computed as ``H(V|Z) - H(V|Y,Z)``. Results within ``-1e-9`` of zero are
    clamped to zero; anything more negative signals a bug and raises.
    """
    _check_normalized(joint.table)
    t = _grouped(joint, [list(v), list(y), list(z)])
    p_vz = t.sum(axis=1)
    p_yz = t.sum(axis=0)
    p_z = p_vz.sum(axis=0)
    # H(V|Z) - H(V|Y,Z) = H(V,Z) - H(Z) - H(V,Y,Z) + H(Y,Z)
    value = _h(p_vz) - _h(p_z) - _h(t) + _h(p_yz)
    if value < -CMI_SLACK:
        raise DistributionError(f"negative mutual information {value!r}")
    return max(0.0, float(value))


def _h(p: np.ndarray) -> float:
    p = p.reshape(-1)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))

"""Agglomerative design of deterministic privacy mechanisms.

Start from the identity mapping (one output per realization) and merge
output cells two at a time. A merge is admissible when the merged cell holds
no confusable pair, every user's utility threshold still holds, and the
leakage strictly drops. Among admissible merges the one with the largest
leakage drop is taken; ties go to the lexicographically smallest pair of
cell ids, where a cell's id is its smallest packed realization.

For a deterministic mechanism ``2**leakage`` equals the sum over cells of the
``P_{X_P}`` mass of the cell's projection onto ``x_P``, so the drop from a
merge is the mass of the intersection of the two projections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .confusion import ConfusionGraph, build, lemma1_holds
from .mechanism import PartitionMechanism, identity_mechanism, satisfies_constraints, support_sets
from .system import UTILITY_SLACK, SystemSpec

GAIN_EPS = 1e-12
TIE_EPS = 1e-12


@dataclass(frozen=True)
class MergeCandidate:
    pair: tuple[int, int]  # cell ids
    gain: float
    feasible: bool


@dataclass(frozen=True)
class ThetaSet:
    candidates: tuple[MergeCandidate, ...]

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    @property
    def pairs(self) -> set[tuple[int, int]]:
        return {c.pair for c in self.candidates}


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    merged: tuple[int, int]
    leakage_bits: float
    per_user_D: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "merged": list(self.merged),
            "leakage_bits": self.leakage_bits,
            "per_user_D": list(self.per_user_D),
        }


@dataclass(frozen=True)
class GreedyResult:
    mechanism: PartitionMechanism
    initial_leakage: float
    trace: tuple[TraceStep, ...] = field(default=())

    @property
    def leakage(self) -> float:
        return self.trace[-1].leakage_bits if self.trace else self.initial_leakage

    @property
    def leakage_path(self) -> list[float]:
        return [self.initial_leakage] + [s.leakage_bits for s in self.trace]


def merge_gain(spec: SystemSpec, mech, y1: int, y2: int) -> float:
    """Drop in ``2**leakage`` from merging outputs ``y1`` and ``y2``.

    ``P(X_P(y1)) + P(X_P(y2)) - P(X_P(y1) ∪ X_P(y2))`` where ``X_P(y)`` is
    the set of ``x_P`` values that reach ``y`` with positive probability.
    """
    if y1 == y2:
        raise ValueError("cannot merge an output with itself")
    supp = support_sets(mech).x_support_of_y
    xp = spec.sources.subset_index(spec.P)
    p_p = spec.sources.marginal(spec.P)
    s1 = {int(xp[x]) for x in supp[y1]}
    s2 = {int(xp[x]) for x in supp[y2]}
    mass = lambda s: float(sum(p_p[v] for v in s))  # noqa: E731
    return mass(s1) + mass(s2) - mass(s1 | s2)


@dataclass
class _Pairs:
    iu: np.ndarray
    ju: np.ndarray
    gain: np.ndarray
    confusable: np.ndarray
    feasible: np.ndarray
    new_D: np.ndarray  # (users, pairs); NaN where not evaluated


class _Designer:
    """Per-system index arrays reused by every iteration of the merge loop."""

    def __init__(self, spec: SystemSpec, graph: ConfusionGraph):
        src = spec.sources
        self.spec = spec
        self.px = src.pmf_flat()
        self.adj = graph.adjacency.astype(np.float64)
        self.xp = src.subset_index(spec.P)
        self.p_p = src.marginal(spec.P)
        self.users = []
        for i, u in enumerate(spec.users):
            G = spec.G(i)
            a_idx = src.subset_index(u.side_info)
            g_idx = src.subset_index(G)
            na = int(np.prod(src.sizes(u.side_info), dtype=int))
            ng = int(np.prod(src.sizes(G), dtype=int))
            prior = float(src.marginal(G).max())
            self.users.append((a_idx, g_idx, na, ng, math.log2(prior), u.gain_threshold))

    def tables(self, cells):
        k = len(cells)
        N = self.px.size
        member = np.zeros((k, N))
        for c, cell in enumerate(cells):
            member[c, list(cell)] = 1.0
        proj = np.zeros((k, self.p_p.size))
        for c, cell in enumerate(cells):
            proj[c, self.xp[list(cell)]] = 1.0
        per_user = []
        for a_idx, g_idx, na, ng, _, _ in self.users:
            t = np.zeros((k, na, ng))
            for c, cell in enumerate(cells):
                idx = list(cell)
                np.add.at(t[c], (a_idx[idx], g_idx[idx]), self.px[idx])
            per_user.append(t)
        return member, proj, per_user

    @staticmethod
    def cell_terms(t: np.ndarray) -> np.ndarray:
        """Per cell: ``sum_a s_a log2(max_g t / s_a)`` with ``s_a = sum_g t``."""
        s = t.sum(axis=-1)
        best = t.max(axis=-1)
        pos = s > 0
        out = np.zeros_like(s)
        out[pos] = s[pos] * np.log2(best[pos] / s[pos])
        return out.sum(axis=-1)

    def candidates(self, cells) -> "_Pairs":
        """All cell pairs with gain, confusability and post-merge utilities."""
        member, proj, per_user = self.tables(cells)
        k = len(cells)
        iu, ju = np.triu_indices(k, 1)
        cross = (member @ self.adj @ member.T) > 0
        confusable = cross[iu, ju]
        gain = (proj[iu] * proj[ju]) @ self.p_p
        ok = ~confusable & (gain > GAIN_EPS)
        new_D = np.full((len(self.users), iu.size), np.nan)
        sel = np.flatnonzero(ok)
        for u, (t, (_, _, _, _, lp, d)) in enumerate(zip(per_user, self.users)):
            if sel.size == 0:
                break
            terms = self.cell_terms(t)
            total = terms.sum()
            a, b = iu[sel], ju[sel]
            merged = self.cell_terms(t[a] + t[b])
            new_D[u, sel] = total - terms[a] - terms[b] + merged - lp
            ok[sel] &= new_D[u, sel] >= d - UTILITY_SLACK
            sel = np.flatnonzero(ok)
        return _Pairs(iu, ju, gain, confusable, ok, new_D)


def _as_cells(mech: PartitionMechanism) -> list[tuple[int, ...]]:
    return sorted(mech.cells, key=lambda c: c[0])


def candidates(spec: SystemSpec, mech: PartitionMechanism,
               graph: ConfusionGraph | None = None) -> list[MergeCandidate]:
    """Every unordered cell pair with its gain and admissibility flag."""
    graph = build(spec) if graph is None else graph
    cells = _as_cells(mech)
    pairs = _Designer(spec, graph).candidates(cells)
    return [
        MergeCandidate((cells[a][0], cells[b][0]), float(g), bool(f))
        for a, b, g, f in zip(pairs.iu, pairs.ju, pairs.gain, pairs.feasible)
    ]


def theta(spec: SystemSpec, mech: PartitionMechanism,
          graph: ConfusionGraph | None = None) -> ThetaSet:
    """Admissible merges of the current partition."""
    return ThetaSet(tuple(c for c in candidates(spec, mech, graph) if c.feasible))


def run_algorithm1(spec: SystemSpec, start: PartitionMechanism | None = None,
                   graph: ConfusionGraph | None = None) -> GreedyResult:
    """Greedy merging from ``start`` (the identity mapping by default).

    A custom start must already satisfy every utility constraint, since
    only pairs across two cells are checked for confusability.
    """
    graph = build(spec) if graph is None else graph
    if start is None:
        start = identity_mechanism(spec)
    elif not (lemma1_holds(spec, start, graph) and satisfies_constraints(spec, start)):
        raise ValueError("starting partition violates the utility constraints")
    designer = _Designer(spec, graph)
    cells = _as_cells(start)

    _, proj, _ = designer.tables(cells)
    linear = float((proj @ designer.p_p).sum())
    initial = max(0.0, math.log2(linear))
    trace: list[TraceStep] = []
    while True:
        pairs = designer.candidates(cells)
        idx = np.flatnonzero(pairs.feasible)
        if idx.size == 0:
            break
        gain = pairs.gain
        top = gain[idx].max()
        # triu order is lexicographic in (smaller id, larger id)
        pick = int(idx[gain[idx] >= top - TIE_EPS][0])
        a, b = int(pairs.iu[pick]), int(pairs.ju[pick])
        ids = (cells[a][0], cells[b][0])
        merged = tuple(sorted(cells[a] + cells[b]))
        cells = [c for c_i, c in enumerate(cells) if c_i not in (a, b)] + [merged]
        cells.sort(key=lambda c: c[0])
        linear -= float(gain[pick])
        trace.append(TraceStep(
            len(trace) + 1, ids, max(0.0, math.log2(linear)),
            tuple(float(v) for v in pairs.new_D[:, pick]),
        ))
    return GreedyResult(PartitionMechanism(tuple(cells), spec.sources.size), initial, tuple(trace))

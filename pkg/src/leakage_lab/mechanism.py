"""Privacy mechanisms ``P(y | x)`` and the quantities evaluated on them.

A :class:`Mechanism` is a row-stochastic kernel indexed by (packed
realization, output symbol). A :class:`PartitionMechanism` is the
deterministic special case where every realization is sent to the single
output naming its cell.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .prob import Joint, conditional_mutual_information
from .system import UTILITY_SLACK, SystemSpec

ROW_TOL = 1e-12

__all__ = [
    "Mechanism",
    "PartitionMechanism",
    "SupportSets",
    "MechanismError",
    "PreconditionError",
    "ConstraintReport",
    "UserReport",
    "identity_mechanism",
    "constant_mechanism",
    "support_sets",
    "joint_distribution",
    "max_leakage",
    "sibson_infinity",
    "guessing_gain",
    "guessing_utility",
    "log_expected_gain",
    "utility_D",
    "decodes",
    "check_perfect_decoding",
    "satisfies_constraints",
    "lemma2_lower_expression",
    "function_leakage",
    "mechanism_from_dict",
    "load_mechanism",
    "save_mechanism",
]


class MechanismError(ValueError):
    pass


class PreconditionError(MechanismError):
    pass


@dataclass(frozen=True)
class Mechanism:
    kernel: np.ndarray

    def __post_init__(self):
        k = np.array(self.kernel, dtype=float)
        if k.ndim != 2 or k.shape[1] == 0:
            raise MechanismError("kernel must be a (realizations, outputs) matrix")
        if np.any(k < 0) or np.any(k > 1):
            raise MechanismError("kernel entries must lie in [0, 1]")
        rows = k.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > ROW_TOL):
            raise MechanismError("every kernel row must sum to 1")
        k.setflags(write=False)
        object.__setattr__(self, "kernel", k)

    @property
    def n_outputs(self) -> int:
        return self.kernel.shape[1]

    @property
    def n_inputs(self) -> int:
        return self.kernel.shape[0]

    def as_kernel(self) -> "Mechanism":
        return self

    def to_dict(self) -> dict:
        return {"outputs": self.n_outputs, "kernel": self.kernel.tolist()}


@dataclass(frozen=True)
class PartitionMechanism:
    """A deterministic mechanism given as cells of packed realizations."""

    cells: tuple[tuple[int, ...], ...]
    size: int

    def __post_init__(self):
        cells = tuple(tuple(sorted(int(v) for v in c)) for c in self.cells)
        seen = [v for c in cells for v in c]
        if any(len(c) == 0 for c in cells):
            raise MechanismError("cells must be non-empty")
        if len(seen) != len(set(seen)) or set(seen) != set(range(self.size)):
            raise MechanismError("cells must partition the realization space exactly")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "PartitionMechanism":
        """Cells from an output label per realization (labels need not be contiguous)."""
        groups: dict[int, list[int]] = {}
        for x, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(x)
        cells = sorted((tuple(g) for g in groups.values()), key=lambda c: c[0])
        return cls(tuple(cells), len(labels))

    @property
    def n_outputs(self) -> int:
        return len(self.cells)

    def labels(self) -> np.ndarray:
        lab = np.empty(self.size, dtype=np.int64)
        for y, cell in enumerate(self.cells):
            lab[list(cell)] = y
        return lab

    def as_kernel(self) -> Mechanism:
        k = np.zeros((self.size, len(self.cells)))
        k[np.arange(self.size), self.labels()] = 1.0
        return Mechanism(k)

    def to_dict(self) -> dict:
        return {"cells": [list(c) for c in self.cells]}


def identity_mechanism(spec: SystemSpec) -> PartitionMechanism:
    size = spec.sources.size
    return PartitionMechanism(tuple((x,) for x in range(size)), size)


def constant_mechanism(spec: SystemSpec) -> PartitionMechanism:
    size = spec.sources.size
    return PartitionMechanism((tuple(range(size)),), size)


def _kernel(spec: SystemSpec, mech) -> np.ndarray:
    k = mech.as_kernel().kernel
    if k.shape[0] != spec.sources.size:
        raise MechanismError(
            f"mechanism has {k.shape[0]} input rows but the system has "
            f"{spec.sources.size} realizations"
        )
    return k


@dataclass(frozen=True)
class SupportSets:
    y_support_of_x: dict[int, frozenset[int]]
    x_support_of_y: dict[int, frozenset[int]]


def support_sets(mech) -> SupportSets:
    k = mech.as_kernel().kernel
    pos = k > 0
    return SupportSets(
        {x: frozenset(np.flatnonzero(pos[x]).tolist()) for x in range(k.shape[0])},
        {y: frozenset(np.flatnonzero(pos[:, y]).tolist()) for y in range(k.shape[1])},
    )


def joint_distribution(spec: SystemSpec, mech) -> Joint:
    """Joint of ``(X_0, ..., X_{n-1}, Y)``; sources are named by index, output by ``"y"``."""
    k = _kernel(spec, mech)
    px = spec.sources.pmf_flat()
    table = (px[:, None] * k).reshape(spec.sources.shape + (k.shape[1],))
    return Joint(table, tuple(range(spec.n)) + ("y",))


def _split_kernel(spec: SystemSpec, k: np.ndarray, first, second) -> np.ndarray:
    """Reshape kernel rows to ``(|X_first|, |X_second|, outputs)``."""
    shape = spec.sources.shape
    t = k.reshape(shape + (k.shape[1],))
    first, second = sorted(first), sorted(second)
    t = np.transpose(t, first + second + [spec.n])
    a = int(np.prod([shape[i] for i in first], dtype=int))
    b = int(np.prod([shape[i] for i in second], dtype=int))
    return t.reshape(a, b, k.shape[1])


def max_leakage(spec: SystemSpec, mech) -> float:
    """Maximal leakage from ``X_Q`` to ``Y`` given ``X_P``, in bits.

    Uses source independence::

        log2 sum_{y, x_P} P(x_P) * max_{x_Q} P(y | x_P, x_Q)
    """
    k = _kernel(spec, mech)
    if not spec.Q:
        return 0.0
    t = _split_kernel(spec, k, spec.P, spec.Q)
    p_p = spec.sources.marginal(spec.P)
    total = float(np.sum(p_p[:, None] * t.max(axis=1)))
    return max(0.0, math.log2(total))


def sibson_infinity(spec: SystemSpec, mech) -> float:
    """Sibson mutual information of order infinity ``I_inf(X_Q; (Y, X_P))``.

    Works from the full joint table without using independence, so it is an
    independent check on :func:`max_leakage`.
    """
    joint = joint_distribution(spec, mech)
    Q = sorted(spec.Q)
    if not Q:
        return 0.0
    rest = sorted(spec.P) + ["y"]
    order = [joint.axis(i) for i in Q] + [joint.axis(r) for r in rest]
    t = np.transpose(joint.table, order)
    nq = int(np.prod(t.shape[:len(Q)], dtype=int))
    t = t.reshape(nq, -1)
    p_q = t.sum(axis=1)
    cond = t[p_q > 0] / p_q[p_q > 0, None]
    return max(0.0, math.log2(float(cond.max(axis=0).sum())))


def _grouped(spec: SystemSpec, k: np.ndarray, groups) -> np.ndarray:
    """Joint of ``(X_g1, X_g2, ..., Y)`` with each source group flattened."""
    shape = spec.sources.shape
    px = spec.sources.pmf_flat()
    t = (px[:, None] * k).reshape(shape + (k.shape[1],))
    used = [i for g in groups for i in sorted(g)]
    drop = tuple(i for i in range(spec.n) if i not in used)
    t = t.sum(axis=drop)
    remaining = [i for i in range(spec.n) if i not in drop]
    t = np.transpose(t, [remaining.index(i) for i in used] + [len(remaining)])
    dims = [int(np.prod([shape[i] for i in g], dtype=int)) for g in groups]
    return t.reshape(dims + [k.shape[1]])


def guessing_gain(spec: SystemSpec, mech, target, side, y: int, z: Sequence[int] = ()) -> float:
    """MAP posterior-to-prior ratio ``r(X_V -> y | z)``.

    ``z`` lists the symbols of the side sources in increasing source order.
    """
    target, side = sorted(target), sorted(side)
    if set(target) & set(side):
        raise MechanismError("target and side sets must be disjoint")
    k = _kernel(spec, mech)
    t = _grouped(spec, k, [target, side])
    zi = int(np.ravel_multi_index(tuple(z), spec.sources.sizes(side))) if side else 0
    col = t[:, zi, y]
    mass = col.sum()
    if mass <= 0:
        raise MechanismError("undefined conditional: (y, z) has zero probability")
    prior = spec.sources.marginal(target).max()
    return float(col.max() / mass / prior)


def guessing_utility(spec: SystemSpec, mech, target, side) -> float:
    """``E[log2 r(X_target -> Y | X_side)]`` over ``P(Y, X_side)``."""
    k = _kernel(spec, mech)
    if not target:
        return 0.0
    t = _grouped(spec, k, [side, target])  # (side, target, y)
    p_sy = t.sum(axis=1)
    best = t.max(axis=1)
    pos = p_sy > 0
    prior_max = spec.sources.marginal(target).max()
    value = np.sum(p_sy[pos] * np.log2(best[pos] / p_sy[pos])) - math.log2(prior_max)
    return float(value)


def log_expected_gain(spec: SystemSpec, mech, target, side) -> float:
    """``log2 E[r(X_target -> Y | X_side)]``: expectation first, then log."""
    k = _kernel(spec, mech)
    if not target:
        return 0.0
    t = _grouped(spec, k, [side, target])
    prior_max = spec.sources.marginal(target).max()
    return float(math.log2(t.max(axis=1).sum() / prior_max))


def utility_D(spec: SystemSpec, mech, i: int) -> float:
    u = spec.users[i]
    return guessing_utility(spec, mech, spec.G(i), u.side_info)


def decodes(spec: SystemSpec, mech, target, side) -> bool:
    """True iff ``X_target`` is a function of ``(Y, X_side)`` on the support."""
    if not target:
        return True
    k = _kernel(spec, mech)
    t = _grouped(spec, k, [side, target])
    return bool(np.all((t > 0).sum(axis=1) <= 1))


def check_perfect_decoding(spec: SystemSpec, mech, i: int) -> bool:
    u = spec.users[i]
    return decodes(spec, mech, u.must_decode, u.side_info)


@dataclass(frozen=True)
class UserReport:
    D: float
    d: float
    decoded: bool

    @property
    def ok(self) -> bool:
        return self.decoded and self.D >= self.d - UTILITY_SLACK


@dataclass(frozen=True)
class ConstraintReport:
    users: tuple[UserReport, ...]

    @property
    def ok(self) -> bool:
        return all(u.ok for u in self.users)

    def __bool__(self) -> bool:
        return self.ok


def satisfies_constraints(spec: SystemSpec, mech) -> ConstraintReport:
    """Perfect decoding and utility thresholds for every user.

    The returned report is truthy iff all constraints hold.
    """
    return ConstraintReport(tuple(
        UserReport(utility_D(spec, mech, i), u.gain_threshold, check_perfect_decoding(spec, mech, i))
        for i, u in enumerate(spec.users)
    ))


def lemma2_lower_expression(spec: SystemSpec, mech) -> float:
    """``max{I(X_Q;Y|X_P), max_i D_i + H(X_{W_i∩Q}) + I(X_{A_i∩Q};Y|X_P)}``.

    Only users with ``G_i ⊆ Q`` enter the inner max. The mechanism must
    satisfy perfect decoding for every user.
    """
    for i in range(spec.m):
        if not check_perfect_decoding(spec, mech, i):
            raise PreconditionError(
                f"precondition: perfect decoding fails for user {i + 1}")
    joint = joint_distribution(spec, mech)
    P, Q = sorted(spec.P), spec.Q
    best = conditional_mutual_information(joint, sorted(Q), ["y"], P)
    for i, u in enumerate(spec.users):
        if not spec.G(i) <= Q:
            continue
        delta = (
            utility_D(spec, mech, i)
            + spec.sources.entropy(u.must_decode & Q)
            + conditional_mutual_information(joint, sorted(u.side_info & Q), ["y"], P)
        )
        best = max(best, delta)
    return best


def function_leakage(spec: SystemSpec, mech, labels: Sequence[int]) -> float:
    """Leakage ``log2 E[r(U -> Y | X_P)]`` of a deterministic function ``U`` of ``X_Q``.

    ``labels[j]`` is the value of ``U`` at the ``j``-th realization of
    ``X_Q`` (mixed-radix order over ``Q``).
    """
    k = _kernel(spec, mech)
    labels = np.asarray(labels, dtype=np.int64)
    t = _grouped(spec, k, [spec.Q, spec.P])  # (x_Q, x_P, y)
    n_u = int(labels.max()) + 1
    pu = np.zeros((n_u,) + t.shape[1:])
    np.add.at(pu, labels, t)
    prior = np.bincount(labels, weights=spec.sources.marginal(spec.Q), minlength=n_u)
    return float(math.log2(pu.max(axis=0).sum() / prior.max()))


def mechanism_from_dict(data: dict, size: int):
    if "cells" in data:
        return PartitionMechanism(tuple(tuple(c) for c in data["cells"]), size)
    kernel = np.asarray(data["kernel"], dtype=float)
    if "outputs" in data and kernel.shape[1] != data["outputs"]:
        raise MechanismError("kernel width does not match 'outputs'")
    return Mechanism(kernel)


def load_mechanism(path, spec: SystemSpec):
    return mechanism_from_dict(json.loads(Path(path).read_text()), spec.sources.size)


def save_mechanism(mech, path) -> None:
    Path(path).write_text(json.dumps(mech.to_dict()))


"""Polymatroid linear program behind the guessing-gain lower bound.

Variables are rank values ``g(S)`` for every ``S ⊆ [n]``, indexed by the
bitmask of ``S``. Constraints are ``g(∅) = 0``, monotonicity and
submodularity (elemental forms by default), and one decoding equality
``g(G ∪ W) - g(G) = H(X_W)`` for each user ``i``, each nonempty
``W ⊆ W_i`` and each ``G`` disjoint from ``W`` and ``A_i``.

``lam(spec, V, Z)`` minimizes ``g(Z^c) - g(Z^c \\ V)`` over that polytope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .mechanism import joint_distribution
from .prob import entropy, marginalize
from .simplex import solve_lp
from .system import SystemSpec

CONSTRAINT_TOL = 1e-7


class LPError(RuntimeError):
    pass


def mask(subset) -> int:
    return sum(1 << i for i in subset)


def members(bits: int) -> frozenset[int]:
    return frozenset(i for i in range(bits.bit_length()) if bits >> i & 1)


def _subsets(bits: int):
    """All submasks of ``bits``, including 0 and ``bits`` itself."""
    sub = bits
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & bits


@dataclass(frozen=True)
class PolymatroidProgram:
    n: int
    objective: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_ge: np.ndarray  # rows r with r @ g >= 0
    eq_labels: tuple[str, ...] = field(default=())
    ge_labels: tuple[str, ...] = field(default=())

    @property
    def n_variables(self) -> int:
        return 1 << self.n

    def residual(self, g) -> float:
        """Largest constraint violation of the candidate ``g``."""
        g = np.asarray(g, dtype=float)
        worst = 0.0
        if self.A_eq.size:
            worst = max(worst, float(np.abs(self.A_eq @ g - self.b_eq).max()))
        if self.A_ge.size:
            worst = max(worst, float(max(0.0, -(self.A_ge @ g).min())))
        return worst

    def to_text(self) -> str:
        """Plain row listing for cross-checking with an external solver."""
        def term_list(row):
            parts = []
            for j in np.flatnonzero(row):
                name = "g{" + ",".join(str(i + 1) for i in sorted(members(int(j)))) + "}"
                parts.append(f"{row[j]:+g} {name}")
            return " ".join(parts) if parts else "0"

        lines = [f"minimize {term_list(self.objective)}", "subject to"]
        for lab, row, rhs in zip(self.eq_labels, self.A_eq, self.b_eq):
            lines.append(f"  [{lab}] {term_list(row)} = {rhs:.17g}")
        for lab, row in zip(self.ge_labels, self.A_ge):
            lines.append(f"  [{lab}] {term_list(row)} >= 0")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LPSolution:
    status: str
    optimal_value: float | None
    g_values: np.ndarray | None


def _shannon_rows(n: int, elemental: bool) -> tuple[list[np.ndarray], list[str]]:
    N = 1 << n
    rows, labels = [], []
    if elemental:
        for S in range(N):
            for i in range(n):
                if not S >> i & 1:
                    r = np.zeros(N)
                    r[S | 1 << i] += 1
                    r[S] -= 1
                    rows.append(r)
                    labels.append(f"mono S={S} i={i + 1}")
        for S in range(N):
            free = [i for i in range(n) if not S >> i & 1]
            for i, j in combinations(free, 2):
                r = np.zeros(N)
                r[S | 1 << i] += 1
                r[S | 1 << j] += 1
                r[S | 1 << i | 1 << j] -= 1
                r[S] -= 1
                rows.append(r)
                labels.append(f"submod S={S} i={i + 1} j={j + 1}")
    else:
        for Sp in range(N):
            for S in _subsets(Sp):
                if S != Sp:
                    r = np.zeros(N)
                    r[Sp] += 1
                    r[S] -= 1
                    rows.append(r)
                    labels.append(f"mono S={S} S'={Sp}")
        for S in range(N):
            for Sp in range(S + 1, N):
                if (S & Sp) in (S, Sp):
                    continue
                r = np.zeros(N)
                r[S] += 1
                r[Sp] += 1
                r[S | Sp] -= 1
                r[S & Sp] -= 1
                rows.append(r)
                labels.append(f"submod S={S} S'={Sp}")
    return rows, labels


def decoding_rows(spec: SystemSpec) -> tuple[list[np.ndarray], list[float], list[str]]:
    """Equalities ``g(G ∪ W) - g(G) = H(X_W)``, deduplicated."""
    N = 1 << spec.n
    seen: dict[tuple[int, int], int] = {}
    rows, rhs, labels = [], [], []
    for ui, u in enumerate(spec.users):
        wi = mask(u.must_decode)
        for W in _subsets(wi):
            if W == 0:
                continue
            allowed = (N - 1) & ~W & ~mask(u.side_info)
            for G in _subsets(allowed):
                if (G, W) in seen:
                    continue
                seen[(G, W)] = len(rows)
                r = np.zeros(N)
                r[G | W] += 1
                r[G] -= 1
                rows.append(r)
                rhs.append(spec.sources.entropy(members(W)))
                labels.append(f"decode user={ui + 1} W={W} G={G}")
    return rows, rhs, labels


def build_program(spec: SystemSpec, V, Z, elemental: bool = True) -> PolymatroidProgram:
    V, Z = frozenset(V), frozenset(Z)
    if V & Z:
        raise ValueError("V and Z must be disjoint")
    n = spec.n
    N = 1 << n
    zc = (N - 1) & ~mask(Z)
    c = np.zeros(N)
    c[zc] += 1
    c[zc & ~mask(V)] -= 1

    pin = np.zeros(N)
    pin[0] = 1.0
    dec, dec_rhs, dec_labels = decoding_rows(spec)
    A_eq = np.vstack([pin] + dec)
    b_eq = np.array([0.0] + dec_rhs)
    ge, ge_labels = _shannon_rows(n, elemental)
    A_ge = np.vstack(ge) if ge else np.zeros((0, N))
    return PolymatroidProgram(
        n, c, A_eq, b_eq, A_ge, ("g(empty)=0",) + tuple(dec_labels), tuple(ge_labels))


def solve(program: PolymatroidProgram) -> LPSolution:
    res = solve_lp(
        program.objective,
        A_eq=program.A_eq,
        b_eq=program.b_eq,
        A_ub=-program.A_ge,
        b_ub=np.zeros(program.A_ge.shape[0]),
    )
    if res.status != "optimal":
        return LPSolution(res.status, None, None)
    return LPSolution("optimal", res.fun, res.x)


def lam(spec: SystemSpec, V, Z, elemental: bool = True) -> float:
    """Minimum of ``g(Z^c) - g(Z^c \\ V)`` over feasible rank functions."""
    if not V:
        return 0.0
    sol = solve(build_program(spec, V, Z, elemental))
    if sol.status != "optimal":
        raise LPError(f"polymatroid program is {sol.status}")
    return max(0.0, sol.optimal_value)


@dataclass(frozen=True)
class PolymatroidBoundResult:
    bound: float
    lambda_QP: float
    per_user: tuple[float | None, ...]  # None where G_i is not inside Q

    def to_dict(self) -> dict:
        return {
            "theorem2_bits": self.bound,
            "lambda_QP": self.lambda_QP,
            "per_user": list(self.per_user),
        }


def theorem2(spec: SystemSpec) -> PolymatroidBoundResult:
    P, Q = spec.P, spec.Q
    cache: dict[frozenset[int], float] = {}

    def cached(V):
        V = frozenset(V)
        if V not in cache:
            cache[V] = lam(spec, V, P)
        return cache[V]

    lam_qp = cached(Q)
    best = lam_qp
    per_user: list[float | None] = []
    for i, u in enumerate(spec.users):
        if not spec.G(i) <= Q:
            per_user.append(None)
            continue
        term = u.gain_threshold + spec.sources.entropy(u.must_decode & Q) + cached(u.side_info & Q)
        per_user.append(term)
        best = max(best, term)
    return PolymatroidBoundResult(best, lam_qp, tuple(per_user))


def theorem2_bound(spec: SystemSpec) -> float:
    return theorem2(spec).bound


def entropy_witness(spec: SystemSpec, mech) -> np.ndarray:
    """Rank function ``g(S) = H(Y | X_{S^c}) - H(Y | X_[n])`` of a mechanism."""
    joint = joint_distribution(spec, mech)
    n = spec.n
    ground = frozenset(range(n))

    def h_y_given(cond) -> float:
        cond = sorted(cond)
        return entropy(marginalize(joint, cond + ["y"])) - entropy(marginalize(joint, cond))

    base = h_y_given(ground)
    return np.array([h_y_given(ground - members(S)) - base for S in range(1 << n)])


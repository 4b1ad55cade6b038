"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c @ x`` subject to ``A_eq @ x = b_eq``, ``A_ub @ x <= b_ub``
and ``x >= 0``. Meant for small dense programs (tens of variables, a few
hundred rows); pivoting is deterministic, entering on the lowest eligible
column index and leaving on the lowest basic index among ratio ties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-8


@dataclass(frozen=True)
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float | None
    iterations: int


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    f = T[:, col].copy()
    f[row] = 0.0
    T -= np.outer(f, T[row])
    basis[row] = col


def _run(T: np.ndarray, basis: np.ndarray, allowed: int, max_iter: int) -> tuple[str, int]:
    """Iterate on tableau ``T`` whose last row is the reduced-cost row.

    Only the first ``allowed`` columns may enter the basis.
    """
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        cost = T[m, :allowed]
        eligible = np.flatnonzero(cost < -PIVOT_TOL)
        if eligible.size == 0:
            return "optimal", it
        col = int(eligible[0])
        colv = T[:m, col]
        pos = np.flatnonzero(colv > PIVOT_TOL)
        if pos.size == 0:
            return "unbounded", it
        ratios = T[pos, -1] / colv[pos]
        rmin = ratios.min()
        ties = pos[ratios <= rmin + 1e-12 * max(1.0, abs(rmin))]
        row = int(ties[np.argmin(basis[ties])])
        _pivot(T, basis, row, col)
        it += 1
    raise RuntimeError("simplex iteration limit reached")


def solve_lp(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, max_iter: int = 100_000) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_eq = np.zeros((0, nv)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, nv)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    me, mu = A_eq.shape[0], A_ub.shape[0]
    m = me + mu

    # Columns: [x | slacks | artificials | rhs]. Rows with a non-negative
    # right-hand side and a slack start with that slack basic; every other
    # row gets an artificial.
    A = np.vstack([A_eq, A_ub])
    b = np.concatenate([b_eq, b_ub])
    S = np.vstack([np.zeros((me, mu)), np.eye(mu)])
    flip = b < 0
    A[flip] *= -1
    S[flip] *= -1
    b = np.abs(b)
    needs_art = np.ones(m, dtype=bool)
    needs_art[me:] = flip[me:]
    art_rows = np.flatnonzero(needs_art)
    na = art_rows.size
    Art = np.zeros((m, na))
    Art[art_rows, np.arange(na)] = 1.0

    ncols = nv + mu + na
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :nv] = A
    T[:m, nv:nv + mu] = S
    T[:m, nv + mu:ncols] = Art
    T[:m, -1] = b
    basis = np.empty(m, dtype=np.int64)
    basis[me:] = nv + np.arange(mu)
    basis[art_rows] = nv + mu + np.arange(na)

    iters = 0
    if na:
        T[m, nv + mu:ncols] = 1.0
        T[m] -= T[art_rows].sum(axis=0)
        status, k = _run(T, basis, ncols, max_iter)
        iters += k
        if -T[m, -1] > FEAS_TOL:
            return SimplexResult("infeasible", None, None, iters)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= nv + mu:
                cand = np.flatnonzero(np.abs(T[r, :nv + mu]) > PIVOT_TOL)
                if cand.size:
                    _pivot(T, basis, r, int(cand[0]))
                else:
                    keep[r] = False
        rows = np.concatenate([np.flatnonzero(keep), [m]])
        T = T[rows][:, list(range(nv + mu)) + [ncols]]
        basis = basis[keep]
        m = basis.size
        ncols = nv + mu

    T[m, :] = 0.0
    T[m, :nv] = c
    for r in range(m):
        if T[m, basis[r]] != 0.0:
            T[m] -= T[m, basis[r]] * T[r]
    status, k = _run(T, basis, ncols, max_iter)
    iters += k
    if status != "optimal":
        return SimplexResult(status, None, None, iters)
    x = np.zeros(ncols)
    x[basis] = T[:m, -1]
    x = x[:nv]
    return SimplexResult("optimal", x, float(c @ x), iters)

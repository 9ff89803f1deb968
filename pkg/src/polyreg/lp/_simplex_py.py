"""Pure-numpy simplex pivot kernels.

Same contract as the compiled kernels in ``_simplex_c.pyx``; the two are
selected at import time by ``polyreg.lp._backend``.

Tableau layout is TRANSPOSED for memory locality: ``T[j, i]`` is the
coefficient of column j in row i, so each tableau column occupies a
contiguous slice and the rank-1 pivot update streams sequentially.
Rows ``[0, m)`` are constraints; row indices ``m`` (and ``m+1`` during
phase 1) are cost rows holding reduced costs.  The last column slot is
the rhs.  ``active[j] == 1`` marks nonbasic columns eligible to enter;
basic columns and dropped artificial columns are inactive and their
stored entries may be stale.  Per-pivot work is O(active x rows).
"""

import numpy as np

BACKEND = "py"

STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 1
STATUS_ITER_LIMIT = 2
STATUS_INFEASIBLE = 3


def apply_pivot(T, basis, active, artificial, p, q, nrows):
    """Pivot on (row p, column q), updating row entries [0, nrows)."""
    rhsc = T.shape[0] - 1
    cols = np.flatnonzero(active)
    colq = T[q, :nrows].copy()
    piv = colq[p]

    rp = T[cols, p] / piv
    T[cols, :nrows] -= rp[:, None] * colq[None, :]
    T[cols, p] = rp
    rp_rhs = T[rhsc, p] / piv
    T[rhsc, :nrows] -= rp_rhs * colq
    T[rhsc, p] = rp_rhs

    leaving = basis[p]
    basis[p] = q
    active[q] = 0
    if not artificial[leaving]:
        inv = 1.0 / piv
        T[leaving, :nrows] = -colq * inv
        T[leaving, p] = inv
        active[leaving] = 1


def simplex_iterate(T, basis, active, artificial, m, nrows, cost_row,
                    opt_tol, piv_tol, dantzig_limit, iter_limit):
    """Primal pivots until optimal/unbounded; returns (status, iterations).

    Entering rule is Dantzig (most negative reduced cost, lowest index on
    ties) for the first ``dantzig_limit`` pivots, then Bland (lowest-index
    negative reduced cost, leaving row tie-broken by lowest basis label)
    which guarantees termination.
    """
    rhsc = T.shape[0] - 1
    it = 0
    while True:
        if it >= iter_limit:
            return STATUS_ITER_LIMIT, it
        bland = it >= dantzig_limit
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return STATUS_OPTIMAL, it
        costs = T[idx, cost_row]
        if bland:
            q = -1
            for j, cj in zip(idx, costs):
                if cj < -opt_tol:
                    q = int(j)
                    break
            if q < 0:
                return STATUS_OPTIMAL, it
        else:
            k = int(np.argmin(costs))
            if costs[k] >= -opt_tol:
                return STATUS_OPTIMAL, it
            q = int(idx[k])

        col = T[q, :m]
        ok = col > piv_tol
        if not ok.any():
            return STATUS_UNBOUNDED, it
        ratios = np.full(m, np.inf)
        ratios[ok] = T[rhsc, :m][ok] / col[ok]
        rmin = ratios.min()
        tied = np.flatnonzero(ratios == rmin)
        if bland and tied.size > 1:
            p = int(tied[np.argmin(basis[tied])])
        else:
            p = int(tied[0])

        apply_pivot(T, basis, active, artificial, p, q, nrows)
        it += 1


def dual_simplex_iterate(T, basis, active, artificial, m, nrows, cost_row,
                         feas_tol, piv_tol, dantzig_limit, iter_limit):
    """Dual simplex: start dual-feasible (reduced costs >= 0), restore
    primal feasibility.  Returns (status, iterations); STATUS_INFEASIBLE
    means the primal has no feasible point.

    Leaving row: most negative rhs (lowest row index after the pivot
    budget); entering column: minimum ratio reduced-cost / |entry| over
    negative entries of the pivot row, lowest column index on ties.
    """
    rhsc = T.shape[0] - 1
    it = 0
    while True:
        if it >= iter_limit:
            return STATUS_ITER_LIMIT, it
        bland = it >= dantzig_limit
        rhsv = T[rhsc, :m]
        if bland:
            p = -1
            for i in range(m):
                if rhsv[i] < -feas_tol:
                    p = i
                    break
            if p < 0:
                return STATUS_OPTIMAL, it
        else:
            p = int(np.argmin(rhsv)) if m else -1
            if p < 0 or rhsv[p] >= -feas_tol:
                return STATUS_OPTIMAL, it

        idx = np.flatnonzero(active)
        row = T[idx, p]
        neg = row < -piv_tol
        if not neg.any():
            return STATUS_INFEASIBLE, it
        cand = idx[neg]
        num = T[cand, cost_row]
        num = np.where(num > 0.0, num, 0.0)  # clamp drift below dual feasibility
        ratios = num / (-T[cand, p])
        q = int(cand[int(np.argmin(ratios))])

        apply_pivot(T, basis, active, artificial, p, q, nrows)
        it += 1

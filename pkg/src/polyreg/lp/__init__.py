"""Exact dense-simplex linear programming core.

Every optimization in the package funnels through :func:`solve_lp`: L1
regression fits, the pairwise separation problems, and the LP
relaxations inside branch and bound.  Two pivoting paths share one
tableau engine:

* a dual simplex used whenever the all-slack basis is dual feasible
  (objective coefficients all nonnegative after bound substitution),
  which covers every L1 fit and big-M relaxation in this package and
  needs no phase 1;
* a two-phase primal simplex for everything else, with Dantzig pricing
  switching to Bland's rule after a pivot budget so termination is
  guaranteed.

Per pivot only nonbasic columns are touched, so work is
O(rows x active columns) rather than O(rows x total columns).  General
variable bounds are handled by substitution (shift / mirror / split);
fixed variables are eliminated.  Tolerances: feasibility 1e-7 absolute
on max-abs-scaled rows, optimality 1e-9 on scaled reduced costs;
downstream modules inherit these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, SolverFailureError
from ._backend import backend_name, kernel

__all__ = [
    "LinearProgram",
    "LpSolution",
    "solve_lp",
    "l1_fit",
    "lp_to_text",
    "backend_name",
]

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIV_TOL = 1e-9

_LE, _EQ, _GE = -1, 0, 1
_SENSE_OF = {"<=": _LE, "=": _EQ, ">=": _GE}
_SENSE_STR = {_LE: "<=", _EQ: "=", _GE: ">="}


class LinearProgram:
    """minimize c @ v subject to A v (<= | = | >=) b and box bounds.

    Parameters
    ----------
    c : (n,) objective coefficients.
    A : (m, n) constraint matrix (m may be 0).
    senses : length-m sequence over {"<=", "=", ">="}.
    b : (m,) right-hand sides.
    bounds : optional length-n sequence of (lo, hi); None means
        unbounded on that side.  Default: all variables free.
    """

    def __init__(self, c, A, senses, b, bounds=None):
        self.c = np.ascontiguousarray(c, dtype=np.float64)
        if self.c.ndim != 1 or self.c.size < 1:
            raise InvalidInputError("objective must be a nonempty vector")
        n = self.c.size
        self.A = np.ascontiguousarray(A, dtype=np.float64)
        if self.A.size == 0:
            self.A = self.A.reshape(0, n)
        if self.A.ndim != 2 or self.A.shape[1] != n:
            raise InvalidInputError("constraint matrix shape mismatch")
        m = self.A.shape[0]
        self.b = np.ascontiguousarray(b, dtype=np.float64).reshape(m)
        try:
            self.senses = np.array([_SENSE_OF[s] for s in senses], dtype=np.int8)
        except KeyError as exc:
            raise InvalidInputError("unknown constraint sense %r" % (exc.args[0],)) from None
        if self.senses.size != m:
            raise InvalidInputError("senses length does not match row count")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.A))
                and np.all(np.isfinite(self.b))):
            raise InvalidInputError("LP coefficients must be finite")
        lo = np.full(n, -math.inf)
        hi = np.full(n, math.inf)
        if bounds is not None:
            if len(bounds) != n:
                raise InvalidInputError("bounds length does not match variable count")
            for j, (blo, bhi) in enumerate(bounds):
                lo[j] = -math.inf if blo is None else float(blo)
                hi[j] = math.inf if bhi is None else float(bhi)
                if lo[j] > hi[j]:
                    raise InvalidInputError("empty bound interval for variable %d" % j)
        self.lo = lo
        self.hi = hi

    @property
    def nvars(self) -> int:
        return self.c.size

    @property
    def nrows(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_rows(cls, c, rows, bounds=None):
        """rows: iterable of (coefficient vector, sense, rhs)."""
        rows = list(rows)
        if rows:
            A = np.vstack([np.asarray(r[0], dtype=np.float64) for r in rows])
            senses = [r[1] for r in rows]
            b = [r[2] for r in rows]
        else:
            A, senses, b = np.zeros((0, len(c))), [], []
        return cls(c, A, senses, b, bounds)


@dataclass
class LpSolution:
    status: str                      # "optimal" | "infeasible" | "unbounded"
    values: np.ndarray | None
    objective_value: float
    dual: np.ndarray | None = None   # per-row multipliers (inequality rows only)
    iterations: int = 0


def _substitute_vars(lp):
    """Shift/mirror/split variables to x >= 0; fixed vars fold into rhs."""
    n = lp.nvars
    kinds = []          # ("fixed",v) ("shift",lo,col) ("mirror",hi,col) ("split",cp,cm)
    box = []            # (std col, width): x_col <= width
    nstd = 0
    for j in range(n):
        lo, hi = lp.lo[j], lp.hi[j]
        if lo == hi:
            kinds.append(("fixed", lo))
        elif math.isfinite(lo):
            kinds.append(("shift", lo, nstd))
            if math.isfinite(hi):
                box.append((nstd, hi - lo))
            nstd += 1
        elif math.isfinite(hi):
            kinds.append(("mirror", hi, nstd))
            nstd += 1
        else:
            kinds.append(("split", nstd, nstd + 1))
            nstd += 2
    m0 = lp.nrows
    m = m0 + len(box)
    Astd = np.zeros((m, max(nstd, 1)))
    bstd = np.concatenate([lp.b.copy(), np.array([w for _, w in box], dtype=np.float64)])
    senses = np.concatenate([lp.senses, np.full(len(box), _LE, dtype=np.int8)])
    cstd = np.zeros(max(nstd, 1))
    for j, kind in enumerate(kinds):
        col = lp.A[:, j]
        if kind[0] == "fixed":
            bstd[:m0] -= col * kind[1]
        elif kind[0] == "shift":
            bstd[:m0] -= col * kind[1]
            Astd[:m0, kind[2]] = col
            cstd[kind[2]] = lp.c[j]
        elif kind[0] == "mirror":
            bstd[:m0] -= col * kind[1]
            Astd[:m0, kind[2]] = -col
            cstd[kind[2]] = -lp.c[j]
        else:
            Astd[:m0, kind[1]] = col
            Astd[:m0, kind[2]] = -col
            cstd[kind[1]] = lp.c[j]
            cstd[kind[2]] = -lp.c[j]
    for t, (colx, _w) in enumerate(box):
        Astd[m0 + t, colx] = 1.0
    return kinds, nstd, Astd, senses, bstd, cstd, m0


def _recover(lp, kinds, xstd):
    v = np.empty(lp.nvars)
    for j, kind in enumerate(kinds):
        if kind[0] == "fixed":
            v[j] = kind[1]
        elif kind[0] == "shift":
            v[j] = kind[1] + xstd[kind[2]]
        elif kind[0] == "mirror":
            v[j] = kind[1] - xstd[kind[2]]
        else:
            v[j] = xstd[kind[1]] - xstd[kind[2]]
    return np.clip(v, lp.lo, lp.hi)


def _extract(lp, kinds, nstd, T, basis, m, rhs, Asc, senses_sc, bsc, iters):
    """Pull the basic solution out of the tableau, verify, map back."""
    xstd = np.zeros(nstd)
    for p in range(m):
        j = basis[p]
        if j < nstd:
            xstd[j] = T[rhs, p]
    if xstd.min(initial=0.0) < -10 * FEAS_TOL:
        raise SolverFailureError("negative basic variable beyond tolerance")
    np.clip(xstd, 0.0, None, out=xstd)

    resid = Asc @ xstd - bsc
    viol = np.where(senses_sc == _LE, resid,
                    np.where(senses_sc == _GE, -resid, np.abs(resid)))
    if viol.max(initial=0.0) > 20 * FEAS_TOL:
        raise SolverFailureError(
            "solution violates constraints by %.3e (scaled)" % viol.max())

    v = _recover(lp, kinds, xstd)
    return LpSolution("optimal", v, float(lp.c @ v), iterations=iters)


def _attach_dual(sol, T, basis, m0, cost_row, slack_col, orig_row, row_scale, cscale):
    """Multipliers from slack reduced costs: lambda_i >= 0 scaled back to
    the user's rows; lambda_i(a_i v - b_i) for <=, lambda_i(b_i - a_i v)
    for >=; NaN where unavailable (equality rows)."""
    in_basis = set(int(j) for j in basis)
    dual = np.full(m0, np.nan)
    for t in range(len(slack_col)):
        i = orig_row[t]
        if i < 0 or slack_col[t] < 0:
            continue
        sc = slack_col[t]
        cbar = 0.0 if sc in in_basis else T[sc, cost_row]
        dual[i] = cbar * cscale / row_scale[t]
    sol.dual = dual
    return sol


def _limits(m, nstd):
    iter_limit = 2000 + 40 * (m + nstd)
    dantzig_limit = 1000 + 10 * (m + nstd)
    return dantzig_limit, iter_limit


def _solve_dual_path(lp, kinds, nstd, Astd, senses, bstd, cstd, m0, want_dual):
    """All rows forced to <=, slack basis, dual simplex.  Requires
    cstd >= 0.  Returns None on iteration limit (caller falls back)."""
    rows_A = []
    rows_b = []
    orig_row = []
    for i in range(Astd.shape[0]):
        s = senses[i]
        oi = i if i < m0 else -1
        if s != _GE:
            rows_A.append(Astd[i])
            rows_b.append(bstd[i])
            orig_row.append(oi)
        if s != _LE:
            rows_A.append(-Astd[i])
            rows_b.append(-bstd[i])
            orig_row.append(oi if s == _GE else -1)
    Asc = np.array(rows_A)
    bsc = np.array(rows_b, dtype=np.float64)
    m = Asc.shape[0]
    orig_row = np.array(orig_row, dtype=np.int64)

    row_scale = np.abs(Asc).max(axis=1, initial=0.0)
    row_scale = np.where(row_scale < 1e-30, 1.0, row_scale)
    Asc /= row_scale[:, None]
    bsc = bsc / row_scale
    cscale = max(1.0, float(np.abs(cstd).max()))

    nxt = nstd + m
    rhs = nxt
    T = np.zeros((nxt + 1, m + 1))  # transposed: T[col, row]
    T[:nstd, :m] = Asc.T
    T[rhs, :m] = bsc
    slack_col = np.arange(nstd, nstd + m, dtype=np.int64)
    T[slack_col, np.arange(m)] = 1.0
    basis = slack_col.copy()
    active = np.zeros(nxt + 1, dtype=np.uint8)
    active[:nstd] = 1
    artificial = np.zeros(nxt + 1, dtype=np.uint8)
    T[:nstd, m] = cstd / cscale

    dantzig_limit, iter_limit = _limits(m, nstd)
    status, iters = kernel.dual_simplex_iterate(
        T, basis, active, artificial, m, m + 1, m,
        FEAS_TOL, PIV_TOL, dantzig_limit, iter_limit)
    if status == kernel.STATUS_ITER_LIMIT:
        return None
    if status == kernel.STATUS_INFEASIBLE:
        return LpSolution("infeasible", None, math.inf, iterations=iters)
    # Dual simplex ends primal-feasible; reduced costs can only be
    # negative through drift, so a short primal cleanup finishes it.
    status, it2 = kernel.simplex_iterate(
        T, basis, active, artificial, m, m + 1, m,
        OPT_TOL, PIV_TOL, dantzig_limit, iter_limit)
    iters += it2
    if status == kernel.STATUS_ITER_LIMIT:
        return None
    if status == kernel.STATUS_UNBOUNDED:
        return LpSolution("unbounded", None, -math.inf, iterations=iters)

    senses_sc = np.full(m, _LE, dtype=np.int8)
    sol = _extract(lp, kinds, nstd, T, basis, m, rhs, Asc, senses_sc, bsc, iters)
    if want_dual:
        _attach_dual(sol, T, basis, m0, m, slack_col, orig_row, row_scale, cscale)
    return sol


def _solve_primal_path(lp, kinds, nstd, Astd, senses, bstd, cstd, m0, want_dual):
    """Two-phase primal simplex with artificials for >= and = rows."""
    Asc = Astd.copy()
    m = Asc.shape[0]
    row_scale = np.abs(Asc).max(axis=1, initial=0.0)
    row_scale = np.where(row_scale < 1e-30, 1.0, row_scale)
    Asc /= row_scale[:, None]
    bsc = bstd / row_scale
    flip = (bsc < 0) | ((bsc == 0) & (senses == _GE))
    Asc[flip] *= -1.0
    bsc = bsc.copy()
    bsc[flip] *= -1.0
    senses_sc = senses.copy()
    senses_sc[flip] = -senses_sc[flip]

    cscale = max(1.0, float(np.abs(cstd).max()))

    slack_col = np.full(m, -1, dtype=np.int64)
    art_col = np.full(m, -1, dtype=np.int64)
    nxt = nstd
    for i in range(m):
        if senses_sc[i] != _EQ:
            slack_col[i] = nxt
            nxt += 1
    art_rows = np.flatnonzero(senses_sc != _LE)
    for i in art_rows:
        art_col[i] = nxt
        nxt += 1
    rhs = nxt
    ncols = nxt + 1

    T = np.zeros((ncols, m + 2))  # transposed: T[col, row]
    T[:nstd, :m] = Asc.T
    T[rhs, :m] = bsc
    basis = np.empty(m, dtype=np.int64)
    active = np.zeros(ncols, dtype=np.uint8)
    artificial = np.zeros(ncols, dtype=np.uint8)
    active[:nstd] = 1
    for i in range(m):
        if senses_sc[i] == _LE:
            T[slack_col[i], i] = 1.0
            basis[i] = slack_col[i]
        elif senses_sc[i] == _GE:
            T[slack_col[i], i] = -1.0
            active[slack_col[i]] = 1
            basis[i] = art_col[i]
            T[art_col[i], i] = 1.0
        else:
            basis[i] = art_col[i]
            T[art_col[i], i] = 1.0
    if len(art_rows):
        artificial[[art_col[i] for i in art_rows]] = 1

    T[:nstd, m] = cstd / cscale

    dantzig_limit, iter_limit = _limits(m, nstd)
    iters = 0

    if len(art_rows):
        T[:, m + 1] = -T[:, art_rows].sum(axis=1)
        T[[art_col[i] for i in art_rows], m + 1] = 0.0
        status, it1 = kernel.simplex_iterate(
            T, basis, active, artificial, m, m + 2, m + 1,
            OPT_TOL, PIV_TOL, dantzig_limit, iter_limit)
        iters += it1
        if status == kernel.STATUS_ITER_LIMIT:
            raise SolverFailureError("phase-1 iteration limit reached")
        if status == kernel.STATUS_UNBOUNDED:
            raise SolverFailureError("phase-1 reported unbounded")
        if -T[rhs, m + 1] > FEAS_TOL:
            return LpSolution("infeasible", None, math.inf, iterations=iters)
        # Drive surviving artificials out of the basis; rows that cannot
        # pivot are redundant and are zeroed (their artificial stays
        # basic at level 0 and never moves again).
        for p in range(m):
            if not artificial[basis[p]]:
                continue
            pick = -1
            for j in np.flatnonzero(active):
                if abs(T[j, p]) > PIV_TOL:
                    pick = int(j)
                    break
            if pick >= 0:
                kernel.apply_pivot(T, basis, active, artificial, p, pick, m + 2)
            else:
                T[:, p] = 0.0

    status, it2 = kernel.simplex_iterate(
        T, basis, active, artificial, m, m + 1, m,
        OPT_TOL, PIV_TOL, dantzig_limit, iter_limit)
    iters += it2
    if status == kernel.STATUS_ITER_LIMIT:
        raise SolverFailureError("phase-2 iteration limit reached")
    if status == kernel.STATUS_UNBOUNDED:
        return LpSolution("unbounded", None, -math.inf, iterations=iters)

    sol = _extract(lp, kinds, nstd, T, basis, m, rhs, Asc, senses_sc, bsc, iters)
    if want_dual:
        # Flipped rows swap sense but keep the same multiplier convention.
        orig_row = np.concatenate([np.arange(m0, dtype=np.int64),
                                   np.full(m - m0, -1, dtype=np.int64)])
        _attach_dual(sol, T, basis, m0, m, slack_col, orig_row, row_scale, cscale)
    return sol


def solve_lp(lp: LinearProgram, want_dual: bool = False) -> LpSolution:
    """Solve to proven optimality; deterministic for fixed input.

    Raises SolverFailureError on numerical breakdown (iteration cap after
    the Bland fallback, or a solution failing the feasibility check).
    """
    kinds, nstd, Astd, senses, bstd, cstd, m0 = _substitute_vars(lp)

    if nstd == 0:
        resid = -bstd[:m0]
        bad = ((senses[:m0] == _LE) & (resid > FEAS_TOL)) | \
              ((senses[:m0] == _GE) & (resid < -FEAS_TOL)) | \
              ((senses[:m0] == _EQ) & (np.abs(resid) > FEAS_TOL))
        if bad.any():
            return LpSolution("infeasible", None, math.inf)
        v = _recover(lp, kinds, np.zeros(0))
        return LpSolution("optimal", v, float(lp.c @ v))

    any_eq = bool((senses == _EQ).any())
    if float(cstd.min()) >= 0.0 and not (want_dual and any_eq):
        sol = _solve_dual_path(lp, kinds, nstd, Astd, senses, bstd, cstd, m0, want_dual)
        if sol is not None:
            return sol
    return _solve_primal_path(lp, kinds, nstd, Astd, senses, bstd, cstd, m0, want_dual)


def l1_fit(X, y) -> tuple[np.ndarray, float]:
    """Least-absolute-deviations fit: beta minimizing sum |y_i - beta @ x_i|.

    Standard LP reformulation with one nonnegative error variable per
    point bounded below by +/- the residual.  Always feasible; returns
    (beta, minimal total absolute error).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    npts, p = X.shape
    if npts < 1 or y.size != npts:
        raise InvalidInputError("l1_fit needs at least one point and matching y")
    A = np.zeros((2 * npts, p + npts))
    A[:npts, :p] = X
    A[npts:, :p] = -X
    eye = np.arange(npts)
    A[eye, p + eye] = 1.0
    A[npts + eye, p + eye] = 1.0
    c = np.zeros(p + npts)
    c[p:] = 1.0
    b = np.concatenate([y, -y])
    senses = [">="] * (2 * npts)
    bounds = [(None, None)] * p + [(0.0, None)] * npts
    sol = solve_lp(LinearProgram(c, A, senses, b, bounds))
    if sol.status != "optimal":
        raise SolverFailureError("l1_fit LP returned %s" % sol.status)
    beta = sol.values[:p].copy()
    err = float(np.abs(y - X @ beta).sum())
    return beta, err


def lp_to_text(lp: LinearProgram) -> str:
    """Plain-text dump, one constraint per line, for external cross-checks."""
    def term(coef, j):
        return "%.17g v%d" % (coef, j)

    lines = ["min: " + " + ".join(term(c, j) for j, c in enumerate(lp.c))]
    for i in range(lp.nrows):
        lhs = " + ".join(term(a, j) for j, a in enumerate(lp.A[i]) if a != 0.0) or "0"
        lines.append("r%d: %s %s %.17g" % (i, lhs, _SENSE_STR[int(lp.senses[i])], lp.b[i]))
    for j in range(lp.nvars):
        lo = "-inf" if not math.isfinite(lp.lo[j]) else "%.17g" % lp.lo[j]
        hi = "inf" if not math.isfinite(lp.hi[j]) else "%.17g" % lp.hi[j]
        lines.append("v%d in [%s, %s]" % (j, lo, hi))
    return "\n".join(lines) + "\n"

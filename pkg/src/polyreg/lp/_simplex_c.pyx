# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex pivot kernels; mirror ``_simplex_py`` exactly.

Tableau is transposed (``T[col, row]``) so per-column updates stream
contiguously.  Pivot selection rules, tie-breaks, and floating-point
operation order match the pure fallback, so both backends walk the same
vertex sequence.
"""

import numpy as np

BACKEND = "c"

STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 1
STATUS_ITER_LIMIT = 2
STATUS_INFEASIBLE = 3


cdef void _pivot(double[:, ::1] T, long long[::1] basis,
                 unsigned char[::1] active, unsigned char[::1] artificial,
                 Py_ssize_t p, Py_ssize_t q, Py_ssize_t nrows,
                 double[::1] colq, Py_ssize_t[::1] actbuf) noexcept nogil:
    cdef Py_ssize_t ncolslots = T.shape[0]
    cdef Py_ssize_t rhsc = ncolslots - 1
    cdef Py_ssize_t i, j, t, nact
    cdef double piv, rp, inv
    cdef long long leaving

    nact = 0
    for j in range(rhsc):
        if active[j]:
            actbuf[nact] = j
            nact += 1
    actbuf[nact] = rhsc
    nact += 1

    for i in range(nrows):
        colq[i] = T[q, i]
    piv = colq[p]

    for t in range(nact):
        j = actbuf[t]
        rp = T[j, p] / piv
        for i in range(nrows):
            T[j, i] -= colq[i] * rp
        T[j, p] = rp

    leaving = basis[p]
    basis[p] = q
    active[q] = 0
    if not artificial[leaving]:
        inv = 1.0 / piv
        for i in range(nrows):
            T[leaving, i] = -colq[i] * inv
        T[leaving, p] = inv
        active[leaving] = 1


def apply_pivot(T, basis, active, artificial, p, q, nrows):
    """Pivot on (row p, column q), updating row entries [0, nrows)."""
    colq = np.empty(int(nrows), dtype=np.float64)
    actbuf = np.empty(T.shape[0] + 1, dtype=np.intp)
    _pivot(T, basis, active, artificial, p, q, nrows, colq, actbuf)


def simplex_iterate(T, basis, active, artificial, m, nrows, cost_row,
                    opt_tol, piv_tol, dantzig_limit, iter_limit):
    """Primal pivots until optimal/unbounded; returns (status, iterations)."""
    cdef double[:, ::1] Tv = T
    cdef long long[::1] bv = basis
    cdef unsigned char[::1] av = active
    cdef unsigned char[::1] fv = artificial
    cdef Py_ssize_t mm = m
    cdef Py_ssize_t nr = nrows
    cdef Py_ssize_t cr = cost_row
    cdef double otol = opt_tol
    cdef double ptol = piv_tol
    cdef long dlimit = dantzig_limit
    cdef long ilimit = iter_limit

    cdef Py_ssize_t ncolslots = Tv.shape[0]
    cdef Py_ssize_t rhsc = ncolslots - 1
    cdef Py_ssize_t i, j, p, q
    cdef long it = 0
    cdef double best, cj, a, r, rmin
    cdef bint bland
    cdef int status = -1

    colq_arr = np.empty(int(nrows), dtype=np.float64)
    actbuf_arr = np.empty(ncolslots + 1, dtype=np.intp)
    cdef double[::1] colq = colq_arr
    cdef Py_ssize_t[::1] actbuf = actbuf_arr

    # status codes inline: 0 optimal, 1 unbounded, 2 iteration limit
    with nogil:
        while True:
            if it >= ilimit:
                status = 2
                break
            bland = it >= dlimit

            q = -1
            if bland:
                for j in range(rhsc):
                    if av[j] and Tv[j, cr] < -otol:
                        q = j
                        break
            else:
                best = -otol
                for j in range(rhsc):
                    if av[j]:
                        cj = Tv[j, cr]
                        if cj < best:
                            best = cj
                            q = j
            if q < 0:
                status = 0
                break

            p = -1
            rmin = 0.0
            for i in range(mm):
                a = Tv[q, i]
                if a <= ptol:
                    continue
                r = Tv[rhsc, i] / a
                if p < 0 or r < rmin:
                    p = i
                    rmin = r
                elif bland and r == rmin and bv[i] < bv[p]:
                    p = i
            if p < 0:
                status = 1
                break

            _pivot(Tv, bv, av, fv, p, q, nr, colq, actbuf)
            it += 1

    return status, int(it)


def dual_simplex_iterate(T, basis, active, artificial, m, nrows, cost_row,
                         feas_tol, piv_tol, dantzig_limit, iter_limit):
    """Dual simplex; mirrors the fallback (see _simplex_py docstring)."""
    cdef double[:, ::1] Tv = T
    cdef long long[::1] bv = basis
    cdef unsigned char[::1] av = active
    cdef unsigned char[::1] fv = artificial
    cdef Py_ssize_t mm = m
    cdef Py_ssize_t nr = nrows
    cdef Py_ssize_t cr = cost_row
    cdef double ftol = feas_tol
    cdef double ptol = piv_tol
    cdef long dlimit = dantzig_limit
    cdef long ilimit = iter_limit

    cdef Py_ssize_t ncolslots = Tv.shape[0]
    cdef Py_ssize_t rhsc = ncolslots - 1
    cdef Py_ssize_t i, j, p, q
    cdef long it = 0
    cdef double worst, a, num, r, rbest
    cdef bint bland
    cdef int status = -1

    colq_arr = np.empty(int(nrows), dtype=np.float64)
    actbuf_arr = np.empty(ncolslots + 1, dtype=np.intp)
    cdef double[::1] colq = colq_arr
    cdef Py_ssize_t[::1] actbuf = actbuf_arr

    # status codes inline: 0 optimal, 2 iteration limit, 3 infeasible
    with nogil:
        while True:
            if it >= ilimit:
                status = 2
                break
            bland = it >= dlimit

            p = -1
            if bland:
                for i in range(mm):
                    if Tv[rhsc, i] < -ftol:
                        p = i
                        break
            else:
                worst = -ftol
                for i in range(mm):
                    if Tv[rhsc, i] < worst:
                        worst = Tv[rhsc, i]
                        p = i
            if p < 0:
                status = 0
                break

            q = -1
            rbest = 0.0
            for j in range(rhsc):
                if not av[j]:
                    continue
                a = Tv[j, p]
                if a >= -ptol:
                    continue
                num = Tv[j, cr]
                if num < 0.0:
                    num = 0.0
                r = num / (-a)
                if q < 0 or r < rbest:
                    q = j
                    rbest = r
            if q < 0:
                status = 3
                break

            _pivot(Tv, bv, av, fv, p, q, nr, colq, actbuf)
            it += 1

    return status, int(it)

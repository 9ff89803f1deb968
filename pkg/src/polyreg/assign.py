"""Mixed-integer assignment of clusters (or single points) to regression
groups plus an outlier group, by branch and bound over LP relaxations.

The binary a[g, l] says cluster l belongs to group g; group 0 is the
outlier group whose clusters are eliminated, capped at a fraction of the
points.  For any fixed integer assignment the problem decomposes into
one L1 fit per group, which is how incumbents are evaluated (and what
the exhaustive oracle uses); the LP relaxation couples groups through
big-M constraints and supplies lower bounds.

Branching picks the most fractional a variable (ties: lowest (group,
cluster)); the node pool is a priority queue on (bound, -depth), i.e.
best bound first, diving deeper on ties; children inherit the parent
bound until solved.  Symmetry is removed by fixing a[g, l] = 0 whenever
group g > cluster l + 1, which keeps exactly the labelings where group
ids are ordered by smallest contained cluster; results are reported in
that canonical order.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .clustering import Clustering
from .core import Config, Dataset, crisp_rho, FuzzyNumber
from .errors import InvalidInputError
from .lp import LinearProgram, solve_lp, l1_fit

__all__ = [
    "Assignment",
    "assign_clusters",
    "assign_points",
    "enumerate_assignments",
    "big_m_audit",
    "point_groups",
]

_PRUNE_TOL = 1e-9
_INT_TOL = 1e-6


@dataclass
class Assignment:
    """Solved cluster-to-group assignment.

    a[g, l] over groups g = 0..K (0 = outliers) and clusters l; betas one
    row per regression group (zeros for empty groups); deltas per point
    (0 for eliminated points); objective = total absolute error of the
    kept points.  optimality is "proven", "gap", or "time-limit" with the
    achieved relative gap; root_bound is the root LP relaxation value.
    """

    a: np.ndarray
    betas: np.ndarray
    deltas: np.ndarray
    objective: float
    eliminated_fraction: float
    optimality: str
    gap: float
    root_bound: float
    node_count: int

    def cluster_groups(self) -> np.ndarray:
        """Group id (0..K) per cluster."""
        return np.argmax(self.a, axis=0)


def point_groups(assignment: Assignment, clustering: Clustering) -> list[np.ndarray]:
    """Point index sets per group; entry 0 is the outlier set."""
    per_cluster = assignment.cluster_groups()
    per_point = per_cluster[clustering.assignments]
    return [np.flatnonzero(per_point == g) for g in range(assignment.a.shape[0])]


class _Problem:
    """Shared data for one branch-and-bound run."""

    def __init__(self, data: Dataset, labels, sizes, cfg: Config):
        self.X = data.x
        self.y = data.y
        self.labels = np.asarray(labels, dtype=np.int64)
        self.sizes = np.asarray(sizes, dtype=np.int64)
        self.cfg = cfg
        self.n, self.p = self.X.shape
        self.K = cfg.K
        self.L = len(self.sizes)
        self.M = cfg.M
        self.budget = crisp_rho(cfg) * self.n
        self.a_offset = self.K * self.p + self.n
        self.nv = self.a_offset + (self.K + 1) * self.L
        self._build_base_lp()
        self.fit_cache: dict[int, tuple[np.ndarray, float]] = {}
        self.eval_cache: dict[tuple, float] = {}
        self.cluster_points = [np.flatnonzero(self.labels == l) for l in range(self.L)]

    def _build_base_lp(self):
        n, p, K, L, M = self.n, self.p, self.K, self.L, self.M
        rows = 2 * n * K + L + 1
        A = np.zeros((rows, self.nv))
        b = np.zeros(rows)
        senses = []
        r = 0
        for k in range(K):
            acol = self.a_offset + (k + 1) * L + self.labels
            bcols = slice(k * p, (k + 1) * p)
            # delta_i + beta_k . x_i - M a >= y_i - M
            A[r:r + n, bcols] = self.X
            A[np.arange(r, r + n), K * p + np.arange(n)] = 1.0
            A[np.arange(r, r + n), acol] = -M
            b[r:r + n] = self.y - M
            senses += [">="] * n
            r += n
            # delta_i - beta_k . x_i - M a >= -y_i - M
            A[r:r + n, bcols] = -self.X
            A[np.arange(r, r + n), K * p + np.arange(n)] = 1.0
            A[np.arange(r, r + n), acol] = -M
            b[r:r + n] = -self.y - M
            senses += [">="] * n
            r += n
        for l in range(L):
            A[r, self.a_offset + np.arange(K + 1) * L + l] = 1.0
            b[r] = 1.0
            senses.append("=")
            r += 1
        A[r, self.a_offset:self.a_offset + L] = self.sizes
        b[r] = self.budget
        senses.append("<=")
        self.base_A = A
        self.base_b = b
        self.base_senses = senses
        c = np.zeros(self.nv)
        c[K * p:K * p + n] = 1.0
        self.base_c = c

    def root_fixings(self) -> np.ndarray:
        """-1 free, 0/1 fixed; symmetry and budget presolve applied."""
        fix = np.full((self.K + 1, self.L), -1, dtype=np.int8)
        for g in range(2, self.K + 1):
            fix[g, :max(0, g - 1)] = 0
        over = self.sizes > self.budget + _PRUNE_TOL
        fix[0, over] = 0
        return fix

    def solve_relaxation(self, fix):
        bounds = [(None, None)] * (self.K * self.p) + [(0.0, None)] * self.n
        for g in range(self.K + 1):
            for l in range(self.L):
                v = fix[g, l]
                bounds.append((0.0, 1.0) if v < 0 else (float(v), float(v)))
        lp = LinearProgram(self.base_c, self.base_A, self.base_senses,
                           self.base_b, bounds)
        return solve_lp(lp)

    def group_fit(self, mask: int, clusters: tuple) -> tuple[np.ndarray, float]:
        """L1 fit over the union of the given clusters, cached by bitmask."""
        hit = self.fit_cache.get(mask)
        if hit is not None:
            return hit
        if not clusters:
            result = (np.zeros(self.p), 0.0)
        else:
            idx = np.concatenate([self.cluster_points[l] for l in clusters])
            beta, err = l1_fit(self.X[idx], self.y[idx])
            result = (beta, err)
        self.fit_cache[mask] = result
        return result

    def evaluate(self, g_of_l) -> float:
        """Exact objective of an integer assignment (decomposed L1 fits)."""
        key = tuple(int(g) for g in g_of_l)
        hit = self.eval_cache.get(key)
        if hit is not None:
            return hit
        total = 0.0
        for g in range(1, self.K + 1):
            clusters = tuple(l for l in range(self.L) if key[l] == g)
            mask = 0
            for l in clusters:
                mask |= 1 << l
            _, err = self.group_fit(mask, clusters)
            total += err
        self.eval_cache[key] = total
        return total

    def feasible(self, g_of_l) -> bool:
        elim = sum(int(self.sizes[l]) for l in range(self.L) if g_of_l[l] == 0)
        return elim <= self.budget + _PRUNE_TOL

    def build_assignment(self, g_of_l, optimality, gap, root_bound, nodes) -> Assignment:
        g_of_l = np.asarray(g_of_l, dtype=np.int64)
        # canonical group order: sort groups 1..K by smallest contained
        # cluster (empty groups last, keeping their relative order)
        firsts = []
        for g in range(1, self.K + 1):
            members = np.flatnonzero(g_of_l == g)
            firsts.append((int(members[0]) if members.size else self.L + g, g))
        order = [g for _, g in sorted(firsts)]
        relabel = {0: 0}
        for new_g, old_g in enumerate(order, start=1):
            relabel[old_g] = new_g
        g_canon = np.array([relabel[int(g)] for g in g_of_l], dtype=np.int64)

        a = np.zeros((self.K + 1, self.L), dtype=np.int8)
        a[g_canon, np.arange(self.L)] = 1
        betas = np.zeros((self.K, self.p))
        objective = 0.0
        for g in range(1, self.K + 1):
            clusters = tuple(np.flatnonzero(g_canon == g).tolist())
            mask = 0
            for l in clusters:
                mask |= 1 << l
            beta, err = self.group_fit(mask, clusters)
            betas[g - 1] = beta
            objective += err
        per_point = g_canon[self.labels]
        deltas = np.zeros(self.n)
        for g in range(1, self.K + 1):
            idx = np.flatnonzero(per_point == g)
            if idx.size:
                deltas[idx] = np.abs(self.y[idx] - self.X[idx] @ betas[g - 1])
        elim = float(self.sizes[g_canon == 0].sum()) / self.n
        return Assignment(a, betas, deltas, float(objective), elim,
                          optimality, float(gap), float(root_bound), nodes)


def _round_candidates(prob: _Problem, fix, avals):
    """Integer candidates from an LP point: plain rounding with budget
    repair, plus a variant nudged to keep every group nonempty."""
    vals = avals.copy()
    fixed = fix >= 0
    vals[fixed] = fix[fixed]
    g_of_l = np.argmax(vals, axis=0)

    # budget repair: move the largest offending clusters out of group 0
    def repaired(g):
        g = g.copy()
        while True:
            elim = [l for l in range(prob.L) if g[l] == 0 and fix[0, l] != 1]
            total = sum(int(prob.sizes[l]) for l in range(prob.L) if g[l] == 0)
            if total <= prob.budget + _PRUNE_TOL or not elim:
                return g
            elim.sort(key=lambda l: (-int(prob.sizes[l]), l))
            l = elim[0]
            g[l] = 1 + int(np.argmax(vals[1:, l]))
        return g

    g1 = repaired(g_of_l)
    out = [g1]
    # nonempty nudge: donate from the most populous group
    g2 = g1.copy()
    changed = False
    for g in range(1, prob.K + 1):
        if np.any(g2 == g):
            continue
        counts = [(np.sum(g2 == d), -d) for d in range(1, prob.K + 1)]
        donor = -max(counts)[1]
        donors = np.flatnonzero(g2 == donor)
        if donors.size >= 2:
            pick = min(donors, key=lambda l: (int(prob.sizes[l]), l))
            g2[pick] = g
            changed = True
    if changed:
        out.append(g2)
    return out


def _branch_and_bound(prob: _Problem, log=None) -> Assignment:
    cfg = prob.cfg
    t0 = time.monotonic()
    fix0 = prob.root_fixings()

    incumbent_obj = math.inf
    incumbent_g = None

    def consider(g_of_l):
        nonlocal incumbent_obj, incumbent_g
        if not prob.feasible(g_of_l):
            return
        obj = prob.evaluate(g_of_l)
        if obj < incumbent_obj - 1e-12:
            incumbent_obj = obj
            incumbent_g = np.asarray(g_of_l, dtype=np.int64).copy()

    heap = []
    counter = itertools.count()
    nodes = 0
    root_bound = None
    optimality = "proven"

    def process(fix, depth):
        nonlocal nodes, root_bound
        nodes += 1
        sol = prob.solve_relaxation(fix)
        if sol.status != "optimal":
            return  # infeasible subtree
        bound = max(sol.objective_value, 0.0)
        if root_bound is None:
            root_bound = bound
        if log is not None:
            log.write("node=%d depth=%d bound=%.6g incumbent=%.6g\n"
                      % (nodes, depth, bound, incumbent_obj))
        if bound >= incumbent_obj - _PRUNE_TOL:
            return
        avals = sol.values[prob.a_offset:].reshape(prob.K + 1, prob.L)
        for cand in _round_candidates(prob, fix, avals):
            consider(cand)
        free = fix < 0
        frac = np.where(free, np.minimum(avals, 1.0 - avals), -1.0)
        if frac.max(initial=-1.0) <= _INT_TOL:
            return  # integral node; rounding above already evaluated it
        if bound >= incumbent_obj - _PRUNE_TOL:
            return
        flat = int(np.argmax(frac))      # ties: lowest (group, cluster)
        g_br, l_br = divmod(flat, prob.L)
        for v in (1, 0):
            child = fix.copy()
            child[g_br, l_br] = v
            heapq.heappush(heap, (bound, -(depth + 1), next(counter), child))

    process(fix0, 0)
    if root_bound is None:
        raise InvalidInputError("assignment problem is infeasible at the root")

    while heap:
        lb = heap[0][0]
        if incumbent_obj - lb <= _PRUNE_TOL:
            break
        if cfg.gap_tol > 0 and incumbent_obj < math.inf:
            gap = (incumbent_obj - lb) / max(abs(incumbent_obj), 1e-12)
            if gap <= cfg.gap_tol:
                optimality = "gap"
                break
        if time.monotonic() - t0 > cfg.time_limit_s:
            optimality = "time-limit"
            break
        bound, negdepth, _, fix = heapq.heappop(heap)
        if bound >= incumbent_obj - _PRUNE_TOL:
            continue
        process(fix, -negdepth)

    if incumbent_g is None:
        raise InvalidInputError("no feasible assignment found")

    if heap and optimality == "proven":
        optimality = "time-limit" if time.monotonic() - t0 > cfg.time_limit_s else optimality
    lb_final = heap[0][0] if heap else incumbent_obj
    gap = max(0.0, (incumbent_obj - lb_final) / max(abs(incumbent_obj), 1e-12))
    if optimality == "proven":
        gap = 0.0

    asg = prob.build_assignment(incumbent_g, optimality, gap, root_bound, nodes)
    if not (root_bound <= asg.objective + 1e-7):
        raise InvalidInputError(
            "root relaxation bound %.9g exceeds objective %.9g"
            % (root_bound, asg.objective))
    if log is not None:
        log.write("done nodes=%d objective=%.6g bound=%.6g status=%s\n"
                  % (nodes, asg.objective, lb_final, optimality))
    return asg


def assign_clusters(data: Dataset, clustering: Clustering, cfg: Config,
                    log=None) -> Assignment:
    """Assign clusters to K groups plus the outlier group, minimizing the
    total absolute error of kept points (proven optimal unless gap_tol or
    time_limit_s stops the search early)."""
    if clustering.assignments.shape[0] != data.n:
        raise InvalidInputError("clustering does not match dataset size")
    prob = _Problem(data, clustering.assignments, clustering.sizes, cfg)
    return _branch_and_bound(prob, log=log)


def assign_points(data: Dataset, cfg: Config, log=None) -> Assignment:
    """Point-level variant: every point is its own cluster and the outlier
    budget is forced to zero."""
    cfg_pt = cfg.with_(rho=FuzzyNumber.crisp(0.0))
    labels = np.arange(data.n, dtype=np.int64)
    sizes = np.ones(data.n, dtype=np.int64)
    prob = _Problem(data, labels, sizes, cfg_pt)
    return _branch_and_bound(prob, log=log)


def enumerate_assignments(data: Dataset, clustering: Clustering,
                          cfg: Config) -> Assignment:
    """Exhaustive ground truth: minimum over all feasible assignments,
    with the same decomposed objective as the branch-and-bound solver.
    Refuses when (K+1)^L exceeds 10^6."""
    K = cfg.K
    L = clustering.n_clusters
    if (K + 1) ** L > 10 ** 6:
        raise InvalidInputError(
            "enumeration over (K+1)^L = %d assignments exceeds the budget"
            % ((K + 1) ** L,))
    prob = _Problem(data, clustering.assignments, clustering.sizes, cfg)
    best_obj = math.inf
    best_g = None
    for g_of_l in itertools.product(range(K + 1), repeat=L):
        if not prob.feasible(g_of_l):
            continue
        obj = prob.evaluate(g_of_l)
        if obj < best_obj - 1e-12:
            best_obj = obj
            best_g = g_of_l
    if best_g is None:
        raise InvalidInputError("no feasible assignment under the outlier budget")
    return prob.build_assignment(best_g, "proven", 0.0, best_obj, 0)


def big_m_audit(assignment: Assignment, data: Dataset, cfg: Config) -> list[str]:
    """Warn when any realized residual approaches M, which would mean the
    big-M constraints may have cut off the true optimum."""
    resid = np.abs(data.y.reshape(-1, 1) - data.x @ assignment.betas.T)
    worst = float(resid.max(initial=0.0))
    if worst > 0.99 * cfg.M:
        return ["max residual %.6g exceeds 0.99*M (M=%.6g); "
                "the big-M constant may be binding and the optimum cut off"
                % (worst, cfg.M)]
    return []

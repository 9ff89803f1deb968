"""Merge-based nearest-prototype clustering in joint (x, y) space.

Starts from one singleton cluster per point and greedily merges the two
clusters whose prototypes (size-weighted means) are closest in
Euclidean distance, until L clusters remain.  Coordinates are
standardized first (mean 0, sd 1; zero-variance coordinates are only
centered) so no coordinate dominates; the response y takes part as one
more coordinate.  Exact distance ties are broken by the lexicographically
smallest pair of cluster slots, so the procedure is deterministic and
invariant to positive rescaling of any input coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset
from .errors import InvalidInputError

__all__ = ["Clustering", "cluster"]


@dataclass(frozen=True)
class Clustering:
    """assignments: per-point cluster label in [0, L); labels are
    canonical (cluster 0 contains the smallest point index, and so on).
    prototypes are member means in the ORIGINAL (x, y) coordinates."""

    assignments: np.ndarray
    prototypes: np.ndarray
    sizes: np.ndarray

    @property
    def n_clusters(self) -> int:
        return self.prototypes.shape[0]

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == label)


def cluster(points: Dataset, L: int) -> Clustering:
    """Agglomerate the n points of `points` down to exactly L clusters."""
    n = points.n
    if not (1 <= L <= n):
        raise InvalidInputError("L must satisfy 1 <= L <= n (got L=%d, n=%d)" % (L, n))

    Z = np.hstack([points.x, points.y.reshape(-1, 1)])
    mu = Z.mean(axis=0)
    sd = Z.std(axis=0)
    sd = np.where(sd == 0.0, 1.0, sd)
    Zs = (Z - mu) / sd

    proto = Zs.copy()                       # slot -> standardized prototype
    size = np.ones(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    member_lists = [[i] for i in range(n)]
    best_d = np.full(n, np.inf)
    best_j = np.full(n, -1, dtype=np.int64)

    def rebuild_row(i):
        others = np.flatnonzero(alive)
        others = others[others != i]
        if others.size == 0:
            best_d[i] = np.inf
            best_j[i] = -1
            return
        dist = ((proto[others] - proto[i]) ** 2).sum(axis=1)
        k = int(np.argmin(dist))
        best_d[i] = dist[k]
        best_j[i] = others[k]

    for i in range(n):
        rebuild_row(i)

    for _ in range(n - L):
        live = np.flatnonzero(alive)
        k = int(np.argmin(best_d[live]))    # ties: lowest slot, then lowest partner
        i = int(live[k])
        j = int(best_j[i])
        if j < i:
            i, j = j, i

        tot = size[i] + size[j]
        proto[i] = (size[i] * proto[i] + size[j] * proto[j]) / tot
        size[i] = tot
        alive[j] = False
        member_lists[i].extend(member_lists[j])
        member_lists[j] = []
        best_d[j] = np.inf

        live2 = np.flatnonzero(alive)
        others = live2[live2 != i]
        bj = best_j[others]
        stale = others[(bj == i) | (bj == j)]
        fresh = others[(bj != i) & (bj != j)]
        if fresh.size:
            d2 = ((proto[fresh] - proto[i]) ** 2).sum(axis=1)
            take = (d2 < best_d[fresh]) | ((d2 == best_d[fresh]) & (i < best_j[fresh]))
            best_d[fresh[take]] = d2[take]
            best_j[fresh[take]] = i
        rebuild_row(i)
        for k2 in stale:
            rebuild_row(int(k2))

    slots = sorted(np.flatnonzero(alive), key=lambda s: member_lists[s][0])
    assignments = np.empty(n, dtype=np.int64)
    prototypes = np.empty((len(slots), Z.shape[1]))
    sizes = np.empty(len(slots), dtype=np.int64)
    for label, s in enumerate(slots):
        idx = member_lists[s]
        assignments[idx] = label
        prototypes[label] = Z[idx].mean(axis=0)
        sizes[label] = len(idx)
    return Clustering(assignments, prototypes, sizes)

"""Soft pairwise separating hyperplanes and polyhedral regions.

For each pair of point groups a hyperplane p.x = q is found by
minimizing the total violation of unit margins (group k pushed to
p.x - q <= -1, group r to p.x - q >= 1).  Two sign-constrained LPs are
solved (sum of p's entries >= 1, respectively <= -1, which rules out
the trivial zero hyperplane) and the lower objective wins; ties go to
the positive-sign problem.  Region boundaries drop the unit margins:
group k's polyhedron collects (p, q, <=) from every pair (k, r) with
k < r and (p, q, >=) from every pair (r, k) with r < k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .lp import LinearProgram, solve_lp

__all__ = ["Hyperplane", "Polyhedron", "separate_pair", "build_polyhedra", "contains"]

CONTAIN_TOL = 1e-9


@dataclass(frozen=True)
class Hyperplane:
    p: np.ndarray
    q: float
    objective: float


@dataclass(frozen=True)
class Polyhedron:
    """Conjunction of halfspaces p.x (<=|>=) q; empty list = whole space."""

    halfspaces: tuple[tuple[np.ndarray, float, str], ...]
    group: int


def _separation_lp(Gk, Gr, sign: int):
    """Variables: p (dims, free), q (free), eps (one per point, >= 0)."""
    nk, nr = Gk.shape[0], Gr.shape[0]
    dims = Gk.shape[1]
    nv = dims + 1 + nk + nr
    rows = []
    # p.x_i - q - eps_i <= -1  for the low side
    for t in range(nk):
        row = np.zeros(nv)
        row[:dims] = Gk[t]
        row[dims] = -1.0
        row[dims + 1 + t] = -1.0
        rows.append((row, "<=", -1.0))
    # p.x_l - q + eps_l >= 1  for the high side
    for t in range(nr):
        row = np.zeros(nv)
        row[:dims] = Gr[t]
        row[dims] = -1.0
        row[dims + 1 + nk + t] = 1.0
        rows.append((row, ">=", 1.0))
    srow = np.zeros(nv)
    srow[:dims] = 1.0
    rows.append((srow, ">=" if sign > 0 else "<=", 1.0 if sign > 0 else -1.0))
    c = np.zeros(nv)
    c[dims + 1:] = 1.0
    bounds = [(None, None)] * (dims + 1) + [(0.0, None)] * (nk + nr)
    return LinearProgram.from_rows(c, rows, bounds)


def separate_pair(Gk, Gr) -> Hyperplane:
    """Best soft separation of point set Gk (low side) from Gr (high side).

    Both point sets are (n_points, dims) arrays and must be nonempty.
    """
    Gk = np.atleast_2d(np.asarray(Gk, dtype=np.float64))
    Gr = np.atleast_2d(np.asarray(Gr, dtype=np.float64))
    if Gk.shape[0] < 1 or Gr.shape[0] < 1:
        raise InvalidInputError("both groups must be nonempty")
    if Gk.shape[1] != Gr.shape[1]:
        raise InvalidInputError("group dimension mismatch")
    dims = Gk.shape[1]
    best = None
    for sign in (1, -1):
        sol = solve_lp(_separation_lp(Gk, Gr, sign))
        if sol.status != "optimal":
            raise InvalidInputError("separation LP was %s" % sol.status)
        if best is None or sol.objective_value < best.objective - 1e-12:
            best = Hyperplane(
                p=sol.values[:dims].copy(),
                q=float(sol.values[dims]),
                objective=float(sol.objective_value),
            )
    return best


def build_polyhedra(hyperplanes: dict, K: int) -> list[Polyhedron]:
    """Assemble the K regions from the pairwise hyperplane map.

    ``hyperplanes[(k, r)]`` with k < r (0-based group indices) must hold
    the hyperplane computed with group k on the low side.
    """
    polys = []
    for k in range(K):
        halves = []
        for r in range(K):
            if r == k:
                continue
            key = (min(k, r), max(k, r))
            if key not in hyperplanes:
                raise InvalidInputError("missing hyperplane for pair %s" % (key,))
            h = hyperplanes[key]
            halves.append((h.p.copy(), h.q, "<=" if k < r else ">="))
        polys.append(Polyhedron(tuple(halves), group=k))
    return polys


def contains(poly: Polyhedron, x) -> bool:
    """Halfspace membership with absolute tolerance; boundaries count as
    inside for every adjacent region."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    for p, q, direction in poly.halfspaces:
        if p.size != x.size:
            raise InvalidInputError("point dimension does not match polyhedron")
        v = float(p @ x) - q
        if direction == "<=":
            if v > CONTAIN_TOL:
                return False
        else:
            if v < -CONTAIN_TOL:
                return False
    return True

"""Nonlinear augmentation of explanatory variables.

Each original column can contribute a squared, log, or reciprocal copy.
Which copies to keep is decided by a greedy forward search: starting
from no transforms, repeatedly add the single eligible transformed
column that most reduces validation MAE of a global L1 fit, until no
addition helps.  Eligibility is decided on training + validation data
(log needs strictly positive values, reciprocal needs nonzero values);
rows seen later that violate a selected transform's domain raise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Config, Dataset
from .errors import InvalidInputError, TransformDomainError
from .lp import l1_fit

__all__ = ["TransformSpec", "augment", "augment_matrix", "select_transforms"]

_MIN_MAE_GAIN = 1e-9


@dataclass(frozen=True)
class TransformSpec:
    """Per-original-column flags; output column order is the original d
    columns, then selected squares, logs, and reciprocals, each block in
    column-index order."""

    include_square: tuple[bool, ...]
    include_log: tuple[bool, ...]
    include_recip: tuple[bool, ...]

    def __post_init__(self):
        d = len(self.include_square)
        if d < 1 or len(self.include_log) != d or len(self.include_recip) != d:
            raise InvalidInputError("transform flag tuples must share length >= 1")
        object.__setattr__(self, "include_square", tuple(bool(v) for v in self.include_square))
        object.__setattr__(self, "include_log", tuple(bool(v) for v in self.include_log))
        object.__setattr__(self, "include_recip", tuple(bool(v) for v in self.include_recip))

    @classmethod
    def empty(cls, d: int) -> "TransformSpec":
        return cls((False,) * d, (False,) * d, (False,) * d)

    @property
    def d(self) -> int:
        return len(self.include_square)

    @property
    def output_dim(self) -> int:
        return self.d + sum(self.include_square) + sum(self.include_log) \
            + sum(self.include_recip)

    def with_flag(self, kind: str, col: int) -> "TransformSpec":
        flags = {
            "square": list(self.include_square),
            "log": list(self.include_log),
            "recip": list(self.include_recip),
        }
        flags[kind][col] = True
        return TransformSpec(tuple(flags["square"]), tuple(flags["log"]), tuple(flags["recip"]))


def augment(spec: TransformSpec, x) -> np.ndarray:
    """Augment one input vector (length d) to length spec.output_dim."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != spec.d:
        raise InvalidInputError("expected %d coordinates, got %d" % (spec.d, x.size))
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("input vector contains non-finite entries")
    return augment_matrix(spec, x.reshape(1, -1))[0]


def augment_matrix(spec: TransformSpec, X) -> np.ndarray:
    """Vectorized augment over the rows of X (n, d) -> (n, output_dim)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != spec.d:
        raise InvalidInputError("expected a matrix with %d columns" % spec.d)
    blocks = [X]
    for j in range(spec.d):
        if spec.include_square[j]:
            blocks.append((X[:, j] ** 2).reshape(-1, 1))
    for j in range(spec.d):
        if spec.include_log[j]:
            col = X[:, j]
            if np.any(col <= 0.0):
                raise TransformDomainError(
                    "log transform of column %d needs positive values" % j, column=j)
            blocks.append(np.log(col).reshape(-1, 1))
    for j in range(spec.d):
        if spec.include_recip[j]:
            col = X[:, j]
            if np.any(col == 0.0):
                raise TransformDomainError(
                    "reciprocal transform of column %d hit a zero" % j, column=j)
            blocks.append((1.0 / col).reshape(-1, 1))
    return np.hstack(blocks) if len(blocks) > 1 else X.copy()


def _val_mae(spec: TransformSpec, train: Dataset, val: Dataset) -> float:
    Xt = augment_matrix(spec, train.x)
    Xt = np.hstack([Xt, np.ones((Xt.shape[0], 1))])
    beta, _ = l1_fit(Xt, train.y)
    Xv = augment_matrix(spec, val.x)
    Xv = np.hstack([Xv, np.ones((Xv.shape[0], 1))])
    return float(np.abs(val.y - Xv @ beta).mean())


def select_transforms(train: Dataset, val: Dataset, cfg: Config) -> TransformSpec:
    """Greedy forward selection of transformed columns by validation MAE.

    Candidate evaluation refits a global L1 model (with intercept) on the
    training rows; ineligible columns are silently excluded.  The result
    is deterministic: candidates are scanned in (square, log, recip) x
    column order and a strictly better MAE is required to switch.
    """
    if train.d != val.d:
        raise InvalidInputError("train and validation dimension mismatch")
    d = train.d
    both = np.vstack([train.x, val.x])
    eligible = []
    for j in range(d):
        eligible.append(("square", j))
    for j in range(d):
        if np.all(both[:, j] > 0.0):
            eligible.append(("log", j))
    for j in range(d):
        if np.all(both[:, j] != 0.0):
            eligible.append(("recip", j))

    spec = TransformSpec.empty(d)
    best_mae = _val_mae(spec, train, val)
    chosen: set[tuple[str, int]] = set()
    while len(chosen) < len(eligible):
        round_best = None
        round_mae = best_mae
        for cand in eligible:
            if cand in chosen:
                continue
            mae = _val_mae(spec.with_flag(*cand), train, val)
            if mae < round_mae - _MIN_MAE_GAIN:
                round_mae = mae
                round_best = cand
        if round_best is None:
            break
        chosen.add(round_best)
        spec = spec.with_flag(*round_best)
        best_mae = round_mae
    return spec

"""Shared domain types: datasets, fuzzy tolerances, and run configuration.

Fuzzy quantities (the outlier budget and the per-point error tolerance)
are trapezoidal-shoulder numbers with hyperbolic tails.  They enter the
crisp optimization through the upper end of their alpha-cut (the most
permissive reading); the error tolerance is used for reporting only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, ParseError

__all__ = [
    "Dataset",
    "FuzzyNumber",
    "Config",
    "membership",
    "alpha_cut",
    "crisp_rho",
    "save_config",
    "load_config",
    "CONFIG_KEYS",
]


@dataclass(frozen=True)
class Dataset:
    """n labeled points: x is (n, d), y is (n,).

    Arrays are float64 and treated as immutable after construction.
    """

    x: np.ndarray
    y: np.ndarray
    column_names: tuple[str, ...] = ()

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if x.ndim != 2:
            raise InvalidInputError("x must be a 2-D matrix")
        if y.ndim != 1:
            raise InvalidInputError("y must be a 1-D vector")
        n, d = x.shape
        if n < 1 or d < 1:
            raise InvalidInputError("dataset needs at least one row and one column")
        if y.shape[0] != n:
            raise InvalidInputError(
                "y length %d does not match %d rows of x" % (y.shape[0], n)
            )
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise InvalidInputError("dataset contains non-finite entries")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        names = tuple(self.column_names) or tuple("x%d" % j for j in range(d))
        if len(names) != d:
            raise InvalidInputError(
                "%d column names for %d columns" % (len(names), d)
            )
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class FuzzyNumber:
    """Shouldered membership function with hyperbolic tails.

    Full membership on [e, f]; below e the grade is d / (e + d - w),
    above f it is g / (w - f + g).  d and g are the left/right spreads
    (zero spread collapses that tail to a hard cutoff).
    """

    d: float
    e: float
    f: float
    g: float

    def __post_init__(self):
        for name in ("d", "e", "f", "g"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidInputError("fuzzy parameter %s must be finite" % name)
            object.__setattr__(self, name, v)
        if self.d < 0 or self.g < 0:
            raise InvalidInputError("fuzzy spreads d, g must be nonnegative")
        if self.e > self.f:
            raise InvalidInputError("fuzzy shoulders require e <= f")

    @classmethod
    def crisp(cls, value: float) -> "FuzzyNumber":
        """Degenerate fuzzy number equal to a scalar."""
        return cls(0.0, value, value, 0.0)


def membership(fz: FuzzyNumber, w: float) -> float:
    """Membership grade of w under fz, in [0, 1]."""
    w = float(w)
    if not math.isfinite(w):
        raise InvalidInputError("membership argument must be finite")
    if w < fz.e:
        if fz.d == 0.0:
            return 0.0
        return fz.d / (fz.e + fz.d - w)
    if w > fz.f:
        if fz.g == 0.0:
            return 0.0
        return fz.g / (w - fz.f + fz.g)
    return 1.0


def alpha_cut(fz: FuzzyNumber, alpha: float) -> tuple[float, float]:
    """Interval of values with membership >= alpha (alpha in (0, 1])."""
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise InvalidInputError("alpha must lie in (0, 1]")
    spread = (1.0 - alpha) / alpha
    return fz.e - fz.d * spread, fz.f + fz.g * spread


@dataclass(frozen=True)
class Config:
    """Fitting and benchmarking parameters.

    K regression groups, L clusters, big-M constant, fuzzy outlier budget
    rho, fuzzy reporting tolerance delta_tol, alpha-cut level, fallback
    neighbor count F, PRNG seed, benchmark repetitions, and the optional
    early-stop controls for branch and bound (wall-clock limit per solve
    and relative optimality gap; gap_tol = 0 demands proven optimality).
    """

    K: int = 2
    L: int = 10
    M: float = 10000.0
    rho: FuzzyNumber = field(default_factory=lambda: FuzzyNumber.crisp(0.01))
    delta_tol: FuzzyNumber = field(default_factory=lambda: FuzzyNumber(0.0, 0.0, 1.0, 1.0))
    alpha: float = 1.0
    F: int = 5
    seed: int = 0
    reps: int = 10
    time_limit_s: float = math.inf
    gap_tol: float = 0.0

    def __post_init__(self):
        if self.K < 1:
            raise InvalidInputError("K must be >= 1")
        if self.L < self.K:
            raise InvalidInputError("L must be >= K")
        if not (self.M > 0):
            raise InvalidInputError("M must be positive")
        if not (0.0 < self.alpha <= 1.0):
            raise InvalidInputError("alpha must lie in (0, 1]")
        if self.F < 1:
            raise InvalidInputError("F must be >= 1")
        if self.seed < 0:
            raise InvalidInputError("seed must be nonnegative")
        if self.reps < 1:
            raise InvalidInputError("reps must be >= 1")
        if self.gap_tol < 0:
            raise InvalidInputError("gap_tol must be nonnegative")

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)


def crisp_rho(cfg: Config) -> float:
    """Most permissive outlier fraction admitted at level alpha, in [0, 1]."""
    _, hi = alpha_cut(cfg.rho, cfg.alpha)
    return min(1.0, max(0.0, hi))


# --- flat key=value serialization ------------------------------------------

CONFIG_KEYS = (
    "K", "L", "M",
    "rho.d", "rho.e", "rho.f", "rho.g",
    "delta.d", "delta.e", "delta.f", "delta.g",
    "alpha", "F", "seed", "reps", "time_limit_s", "gap_tol",
)

_INT_KEYS = {"K", "L", "F", "seed", "reps"}


def _config_items(cfg: Config):
    yield "K", cfg.K
    yield "L", cfg.L
    yield "M", cfg.M
    for part in "defg":
        yield "rho." + part, getattr(cfg.rho, part)
    for part in "defg":
        yield "delta." + part, getattr(cfg.delta_tol, part)
    yield "alpha", cfg.alpha
    yield "F", cfg.F
    yield "seed", cfg.seed
    yield "reps", cfg.reps
    yield "time_limit_s", cfg.time_limit_s
    yield "gap_tol", cfg.gap_tol


def config_to_text(cfg: Config) -> str:
    lines = []
    for key, value in _config_items(cfg):
        if key in _INT_KEYS:
            lines.append("%s=%d" % (key, value))
        else:
            lines.append("%s=%.17g" % (key, value))
    return "\n".join(lines) + "\n"


def save_config(cfg: Config, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config_to_text(cfg))


def config_from_lines(lines, path=None) -> Config:
    """Parse key=value lines; missing keys take defaults, unknown keys fail."""
    seen = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError("expected key=value, got %r" % line, path, lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ParseError("unknown config key %r" % key, path, lineno)
        if key in seen:
            raise ParseError("duplicate config key %r" % key, path, lineno)
        try:
            seen[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise ParseError(
                "bad value %r for key %r" % (value, key), path, lineno
            ) from None
    kw = {}
    for name in ("K", "L", "M", "alpha", "F", "seed", "reps", "time_limit_s", "gap_tol"):
        if name in seen:
            kw[name] = seen[name]
    defaults = Config()
    for prefix, attr in (("rho", "rho"), ("delta", "delta_tol")):
        base = getattr(defaults, attr)
        parts = {p: seen.get("%s.%s" % (prefix, p), getattr(base, p)) for p in "defg"}
        if any("%s.%s" % (prefix, p) in seen for p in "defg"):
            kw[attr] = FuzzyNumber(**parts)
    return Config(**kw)


def load_config(path) -> Config:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InvalidInputError("cannot read config file %s: %s" % (path, exc)) from None
    return config_from_lines(lines, path=path)

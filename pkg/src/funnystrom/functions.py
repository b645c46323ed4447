"""Scalar spectral functions and their structural checks.

The catalog carries the property flags the approximation theory cares
about: non-decreasing, concave, and operator monotone on [0, inf). The
flags are declarative; ``check_concave_properties`` and
``check_operator_monotone`` test them numerically and raise when a flag
overpromises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, PropertyViolationError
from .linalg import SpsdMatrix, psd_order

CONCAVE_TOL = 1e-12
MONOTONE_PSD_TOL = 1e-9


@dataclass(frozen=True)
class ScalarFunction:
    """Scalar function applied to the spectrum of an SPSD matrix.

    operator_monotone implies concave and non_decreasing for continuous
    functions [0, inf) -> [0, inf), so flag combinations breaking that
    implication are rejected.
    """

    name: str
    fn: Callable = field(repr=False, compare=False)
    operator_monotone: bool = False
    concave: bool = False
    non_decreasing: bool = True
    value_at_zero: float = 0.0
    params: tuple = ()

    def __post_init__(self):
        if self.operator_monotone and not (self.concave and self.non_decreasing):
            raise DomainError(
                f"{self.name}: operator monotone requires concave and non-decreasing"
            )
        if self.value_at_zero < 0.0:
            raise DomainError(f"{self.name}: f(0) must be >= 0")
        at_zero = float(self.fn(np.asarray(0.0)))
        if not np.isclose(at_zero, self.value_at_zero, rtol=0.0, atol=1e-12):
            raise DomainError(
                f"{self.name}: declared f(0)={self.value_at_zero} but fn(0)={at_zero}"
            )

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.asarray(self.fn(arr), dtype=float)
        if arr.ndim == 0:
            return float(out)
        return out

    @property
    def label(self):
        if not self.params:
            return self.name
        inner = ",".join(f"{key}={val:g}" for key, val in self.params)
        return f"{self.name}({inner})"


def _entry(name, make, defaults, flags):
    return name, (make, defaults, flags)

# flags: (operator_monotone, concave, non_decreasing)
_CATALOG = dict([
    _entry("identity", lambda: (lambda x: x), {}, (True, True, True)),
    _entry("sqrt", lambda: np.sqrt, {}, (True, True, True)),
    _entry("log1p", lambda: np.log1p, {}, (True, True, True)),
    _entry("ridge", lambda lam: (lambda x: x / (x + lam)), {"lam": 1.0},
           (True, True, True)),
    _entry("power", lambda alpha: (lambda x: np.power(x, alpha)), {"alpha": 0.5},
           (True, True, True)),
    # min(1, x) is concave and non-decreasing but not operator monotone;
    # it is the non-example the counterexample suite is built on.
    _entry("min1", lambda: (lambda x: np.minimum(1.0, x)), {}, (False, True, True)),
    # convex control used to exercise violation reporting
    _entry("square", lambda: np.square, {}, (False, False, True)),
])


def get_function(name, *, shift=0.0, **params):
    """Catalog lookup by name with optional parameters.

    ``shift`` adds a constant c >= 0, preserving all flags and moving
    f(0) to c. ``ridge`` takes ``lam`` > 0, ``power`` takes ``alpha``
    in [0, 1].
    """
    if name not in _CATALOG:
        raise DomainError(f"unknown function {name!r} (have {sorted(_CATALOG)})")
    make, defaults, (om, concave, nondec) = _CATALOG[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise DomainError(f"{name} does not take parameters {sorted(unknown)}")
    merged = {**defaults, **params}
    if name == "ridge" and not merged["lam"] > 0.0:
        raise DomainError("ridge needs lam > 0")
    if name == "power" and not 0.0 <= merged["alpha"] <= 1.0:
        raise DomainError("power needs alpha in [0, 1]")
    if shift < 0.0:
        raise DomainError("shift must be >= 0")
    base = make(**merged)
    if shift:
        fn = lambda x, _b=base: _b(x) + shift
    else:
        fn = base
    recorded = tuple(sorted(merged.items()))
    if shift:
        recorded = recorded + (("shift", shift),)
    zero = float(np.asarray(fn(np.asarray(0.0)))) if shift else float(np.asarray(base(np.asarray(0.0))))
    return ScalarFunction(name, fn, operator_monotone=om, concave=concave,
                          non_decreasing=nondec, value_at_zero=zero,
                          params=tuple((k, float(v)) for k, v in recorded))


def parse_function(text):
    """Parse "name" or "name:key=val,key=val" into a ScalarFunction."""
    head, _, tail = text.partition(":")
    params = {}
    if tail:
        for piece in tail.split(","):
            key, _, val = piece.partition("=")
            if not val:
                raise DomainError(f"malformed function parameter {piece!r}")
            params[key.strip()] = float(val)
    return get_function(head.strip(), **params)


def catalog_names():
    return tuple(_CATALOG)


def apply_matrix_function(a, f):
    """f(A) through the cached eigendecomposition of A.

    Eigenvalues are mapped, re-sorted (stable) and reassembled; NaN or
    infinite values raise DomainError.
    """
    if not isinstance(a, SpsdMatrix):
        raise TypeError("apply_matrix_function expects an SpsdMatrix")
    vals = np.asarray(f(a.eigenvalues), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"{f.name} produced non-finite values on the spectrum")
    return SpsdMatrix.from_spectrum(vals, a.eigenvectors)


@dataclass
class ClauseResult:
    passed: bool
    margin: float
    witness: tuple


@dataclass
class ConcaveReport:
    """Per-clause outcome of the concavity checks."""

    function: str
    clauses: dict

    @property
    def all_passed(self):
        return all(c.passed for c in self.clauses.values())

    def failed_clauses(self):
        return [name for name, c in self.clauses.items() if not c.passed]


# fixed probes guarantee deterministic witnesses for the known violators
_PROBE_X = np.array([0.25, 0.5, 1.0, 2.0, 10.0])
_PROBE_T = np.array([1.0, 2.0, 10.0])


def check_concave_properties(f, *, samples=2000, seed=0, tol=CONCAVE_TOL):
    """Sample the non-decreasing clause and the four concavity clauses.

    Clauses, each as "margin >= -tol" with the worst sample recorded:

    * non-decreasing: f(y) - f(x) for x <= y
    * ratio-decreasing: f(x)/x - f(y)/y for 0 < x <= y
    * superscaling: t f(x) - f(t x) for t >= 1
    * subscaling: f(t x) - t f(x) for 0 <= t <= 1
    * difference-decreasing: (f(x) - f(x-t)) - (f(y) - f(y-t))
      for t >= 0 and t <= x <= y

    Raises PropertyViolationError when a clause covered by the declared
    flags fails; otherwise violations are only reported.
    """
    rng = np.random.default_rng(seed)
    x = np.concatenate([10.0 ** rng.uniform(-6, 3, samples), _PROBE_X])
    y = x * 10.0 ** rng.uniform(0.0, 2.0, x.shape)
    t_hi = np.concatenate([10.0 ** rng.uniform(0, 2, samples), np.repeat(_PROBE_T, 2)[: _PROBE_X.size]])
    t_lo = np.concatenate([rng.uniform(0.0, 1.0, samples), np.linspace(0.0, 1.0, _PROBE_X.size)])
    t_d = np.concatenate([rng.uniform(0.0, 1.0, samples), np.linspace(0.0, 1.0, _PROBE_X.size)]) * x

    fx, fy = f(x), f(y)
    clauses = {}

    def record(name, margins, scale, witnesses):
        # margins are normalized by the magnitude of the terms compared,
        # so cancellation noise at large arguments stays below tol
        rel = margins / np.maximum(scale, 1.0)
        i = int(np.argmin(rel))
        clauses[name] = ClauseResult(bool(rel[i] >= -tol), float(rel[i]),
                                     tuple(np.round(w[i], 12) for w in witnesses))

    f_thi = f(t_hi * x)
    f_tlo = f(t_lo * x)
    record("non-decreasing", fy - fx,
           np.maximum(np.abs(fx), np.abs(fy)), (x, y))
    record("ratio-decreasing", fx / x - fy / y,
           np.maximum(np.abs(fx / x), np.abs(fy / y)), (x, y))
    record("superscaling", t_hi * fx - f_thi,
           np.maximum(np.abs(t_hi * fx), np.abs(f_thi)), (x, t_hi))
    record("subscaling", f_tlo - t_lo * fx,
           np.maximum(np.abs(f_tlo), np.abs(t_lo * fx)), (x, t_lo))
    record("difference-decreasing",
           (fx - f(x - t_d)) - (fy - f(y - t_d)),
           np.maximum(np.abs(fx), np.abs(fy)), (x, y, t_d))

    report = ConcaveReport(f.label, clauses)
    flagged = []
    if f.non_decreasing:
        flagged.append("non-decreasing")
    if f.concave:
        flagged += ["ratio-decreasing", "superscaling", "subscaling",
                    "difference-decreasing"]
    for name in flagged:
        c = clauses[name]
        if not c.passed:
            raise PropertyViolationError(f.label, name, c.witness, c.margin)
    return report


@dataclass
class MonotoneReport:
    """Outcome of the matrix-level operator monotonicity check."""

    function: str
    passed: bool
    min_margin: float
    witness: tuple | None


def _probe_pairs(dim, pairs, seed):
    # known discriminating pair for kinked functions around x = 1
    a = np.diag([1.1, 0.1])
    v = np.array([1.0, 0.095])
    yield a, np.outer(v, v)
    rng = np.random.default_rng(seed)
    for _ in range(pairs):
        g = rng.standard_normal((dim, dim))
        b = g @ g.T / dim + 0.05 * np.eye(dim)
        b *= 2.0 / np.linalg.eigvalsh(b)[-1]  # put the spectrum around 1
        h = rng.standard_normal((dim, dim))
        w = h @ h.T / dim
        s = 0.9 * np.linalg.eigvalsh(b)[0] / max(np.linalg.eigvalsh(w)[-1], 1e-30)
        yield b, b - s * w


def check_operator_monotone(f, *, pairs=50, dim=3, seed=0, tol=MONOTONE_PSD_TOL):
    """Check f(B) >= f(C) in the PSD order on sampled pairs B >= C >= 0.

    The tolerance is relative to f(lam_max(B)). Returns a report with
    the worst margin and, if it failed, the violating pair.
    """
    worst = np.inf
    witness = None
    for b, c in _probe_pairs(dim, pairs, seed):
        wb, ub = np.linalg.eigh(b)
        wc, uc = np.linalg.eigh(c)
        fb = (ub * f(np.maximum(wb, 0.0))) @ ub.T
        fc = (uc * f(np.maximum(wc, 0.0))) @ uc.T
        scale = max(float(f(np.maximum(wb[-1], 0.0))), 1e-30)
        margin = float(np.linalg.eigvalsh(fb - fc)[0]) / scale
        if margin < worst:
            worst = margin
            witness = (b, c)
    passed = worst >= -tol
    return MonotoneReport(f.label, passed, worst, None if passed else witness)

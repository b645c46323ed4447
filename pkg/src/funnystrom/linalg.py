"""Dense symmetric positive semidefinite primitives.

Conventions used throughout the package:

* eigenvalues are sorted descending, ties broken by the original
  (ascending) position in the LAPACK output, which makes every
  downstream ordering deterministic;
* eigenvalues in ``[-psd_tol * lam_max, 0)`` are clamped to zero on
  construction, anything below that is rejected;
* norms are Schatten norms computed from singular values, with nuclear,
  Frobenius and operator as the p = 1, 2, inf aliases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidPError,
    NotPsdError,
    NotSymmetricError,
    RankOutOfRangeError,
)

SYM_TOL = 1e-12
PSD_TOL = 1e-10
PINV_REL_TOL = 1e-12
ORTH_TOL = 1e-12


def _as_square(entries):
    m = np.asarray(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def _sorted_eigh(m):
    """Eigendecomposition with descending eigenvalues, stable tie order."""
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def dense_entries(obj):
    """Dense ndarray view of a matrix-like object.

    Accepts plain arrays, SpsdMatrix, and anything with ``entries`` or a
    ``matrix()`` method (low-rank factors).
    """
    if isinstance(obj, np.ndarray):
        return obj
    entries = getattr(obj, "entries", None)
    if entries is not None:
        return entries
    matrix = getattr(obj, "matrix", None)
    if callable(matrix):
        return matrix()
    return np.asarray(obj, dtype=float)


class SpsdMatrix:
    """Dense SPSD matrix with a cached eigendecomposition.

    Parameters
    ----------
    entries : (n, n) array_like
        Symmetric matrix. Asymmetry beyond ``sym_tol * max(1, ||A||_F)``
        raises NotSymmetricError; an eigenvalue below
        ``-psd_tol * lam_max`` raises NotPsdError. Eigenvalues between
        that floor and zero are clamped to zero in the cache.
    """

    def __init__(self, entries, *, sym_tol=SYM_TOL, psd_tol=PSD_TOL):
        m = _as_square(entries)
        scale = max(1.0, float(np.linalg.norm(m)))
        asym = float(np.abs(m - m.T).max(initial=0.0))
        if asym > sym_tol * scale:
            raise NotSymmetricError(
                f"asymmetry {asym:.3e} exceeds {sym_tol:.1e} * {scale:.3e}"
            )
        self.entries = (m + m.T) / 2
        vals, vecs = _sorted_eigh(self.entries)
        lam_max = float(vals[0]) if vals.size else 0.0
        floor = -psd_tol * max(lam_max, 0.0)
        if vals.size and float(vals[-1]) < floor:
            raise NotPsdError(
                f"eigenvalue {float(vals[-1]):.6e} below PSD floor {floor:.6e}"
            )
        self.eigenvalues = np.maximum(vals, 0.0)
        self.eigenvectors = vecs

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors=None, *, psd_tol=PSD_TOL,
                      orth_tol=ORTH_TOL):
        """Build U diag(lam) U^T from a known spectrum, caching it.

        Skips the O(n^3) eigendecomposition of the constructor; the
        spectrum is sorted descending (stable) and validated instead.
        """
        lam = np.asarray(eigenvalues, dtype=float)
        if lam.ndim != 1:
            raise DimensionMismatchError("eigenvalues must be a vector")
        n = lam.shape[0]
        if eigenvectors is None:
            u = np.eye(n)
        else:
            u = _as_square(eigenvectors)
            if u.shape[0] != n:
                raise DimensionMismatchError(
                    f"{n} eigenvalues but eigenvector matrix is {u.shape}"
                )
            gram_err = float(np.linalg.norm(u.T @ u - np.eye(n)))
            if gram_err > orth_tol * max(1.0, np.sqrt(n)):
                raise NotSymmetricError(
                    f"eigenvector matrix not orthogonal (defect {gram_err:.3e})"
                )
        lam_max = float(lam.max(initial=0.0))
        if lam.size and float(lam.min()) < -psd_tol * max(lam_max, 0.0):
            raise NotPsdError(f"negative eigenvalue {float(lam.min()):.6e}")
        lam = np.maximum(lam, 0.0)
        order = np.argsort(-lam, kind="stable")
        lam, u = lam[order], u[:, order]
        obj = cls.__new__(cls)
        m = (u * lam) @ u.T
        obj.entries = (m + m.T) / 2
        obj.eigenvalues = lam
        obj.eigenvectors = u
        return obj

    @classmethod
    def diagonal(cls, values):
        return cls.from_spectrum(values)

    @property
    def n(self):
        return self.entries.shape[0]

    def __repr__(self):
        return f"SpsdMatrix(n={self.n}, lam_max={self.eigenvalues.max(initial=0.0):.6g})"


def sym_eig(a):
    """Cached eigendecomposition of an SpsdMatrix as (values, vectors).

    Values are descending and clamped at zero; vectors are the matching
    columns. A raw symmetric array is validated first.
    """
    if not isinstance(a, SpsdMatrix):
        a = SpsdMatrix(a)
    return a.eigenvalues, a.eigenvectors


@dataclass(frozen=True)
class NormKind:
    """Schatten p-norm tag; p = 1, 2, inf give nuclear, Frobenius and
    operator norms, so the named kinds are genuine aliases."""

    p: float

    def __post_init__(self):
        if not self.p >= 1.0:
            raise InvalidPError(f"Schatten order must be >= 1, got {self.p}")

    @property
    def label(self):
        if self.p == 1.0:
            return "nuclear"
        if self.p == 2.0:
            return "frobenius"
        if np.isinf(self.p):
            return "operator"
        return f"schatten{self.p:g}"

    @classmethod
    def parse(cls, text):
        t = text.strip().lower()
        if t == "nuclear":
            return NUCLEAR
        if t == "frobenius":
            return FROBENIUS
        if t == "operator":
            return OPERATOR
        if t.startswith("schatten"):
            tail = t[len("schatten"):].lstrip(":")
            try:
                return cls(float(tail))
            except ValueError as exc:
                if isinstance(exc, InvalidPError):
                    raise
                raise InvalidPError(f"cannot parse Schatten order from {text!r}") from exc
        raise InvalidPError(f"unknown norm {text!r}")

    def __str__(self):
        return self.label


NUCLEAR = NormKind(1.0)
FROBENIUS = NormKind(2.0)
OPERATOR = NormKind(np.inf)


def schatten_from_values(values, kind):
    """Schatten norm from a vector of singular values (or eigenvalues of
    a symmetric matrix, whose absolute values are its singular values)."""
    s = np.abs(np.asarray(values, dtype=float))
    if s.size == 0:
        return 0.0
    if np.isinf(kind.p):
        return float(s.max())
    if kind.p == 1.0:
        return float(s.sum())
    if kind.p == 2.0:
        return float(np.sqrt((s * s).sum()))
    # factor out the peak so the powers cannot overflow
    peak = float(s.max())
    if peak == 0.0:
        return 0.0
    return float(peak * ((s / peak) ** kind.p).sum() ** (1.0 / kind.p))


def schatten_norm(m, kind):
    """Schatten p-norm of a dense matrix via its singular values."""
    arr = np.asarray(dense_entries(m), dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got shape {arr.shape}")
    return schatten_from_values(np.linalg.svd(arr, compute_uv=False), kind)


@dataclass
class LowRankFactor:
    """Factored SPSD approximation U diag(lam) U^T.

    ``u`` has orthonormal columns and ``lam`` is descending and
    nonnegative. ``k`` is the rank bound that was requested; the column
    count may be smaller when the input had lower numerical rank.
    """

    n: int
    k: int
    u: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.lam = np.asarray(self.lam, dtype=float)
        r = self.u.shape[1] if self.u.ndim == 2 else -1
        if self.u.ndim != 2 or self.u.shape[0] != self.n or self.lam.shape != (r,):
            raise DimensionMismatchError(
                f"factor shapes {self.u.shape}, {self.lam.shape} do not match n={self.n}"
            )
        if r > self.n or self.k < 0:
            raise RankOutOfRangeError(f"rank {r} exceeds dimension {self.n}")
        gram_err = float(np.linalg.norm(self.u.T @ self.u - np.eye(r)))
        if gram_err > ORTH_TOL * max(1.0, np.sqrt(self.n)):
            raise NotSymmetricError(f"factor columns not orthonormal ({gram_err:.3e})")
        if r and (np.any(np.diff(self.lam) > 0) or float(self.lam[-1]) < 0.0):
            raise NotPsdError("factor eigenvalues must be descending and nonnegative")

    @property
    def rank(self):
        return self.u.shape[1]

    def matrix(self):
        return (self.u * self.lam) @ self.u.T

    def truncate(self, k):
        if not 0 <= k <= self.n:
            raise RankOutOfRangeError(f"k={k} outside [0, {self.n}]")
        r = min(k, self.rank)
        return LowRankFactor(self.n, k, self.u[:, :r], self.lam[:r])

    def padded_eigenvalues(self, m=None):
        """Eigenvalues padded with zeros up to length m (default n)."""
        m = self.n if m is None else m
        out = np.zeros(m)
        r = min(self.rank, m)
        out[:r] = self.lam[:r]
        return out


def best_rank_k(a, k):
    """Best rank-k approximation of an SpsdMatrix as a LowRankFactor.

    Optimal in every Schatten norm; ties in the spectrum are broken by
    the cached deterministic eigenvalue order.
    """
    if not isinstance(a, SpsdMatrix):
        raise TypeError("best_rank_k expects an SpsdMatrix")
    if not 0 <= k <= a.n:
        raise RankOutOfRangeError(f"k={k} outside [0, {a.n}]")
    return LowRankFactor(a.n, k, a.eigenvectors[:, :k].copy(), a.eigenvalues[:k].copy())


def psd_order(a, b, *, tol=PSD_TOL):
    """True iff a - b is PSD within a relative tolerance.

    The test is lam_min(a - b) >= -tol * max(lam_max(a), 1).
    """
    am = _as_square(dense_entries(a))
    bm = _as_square(dense_entries(b))
    if am.shape != bm.shape:
        raise DimensionMismatchError(f"shape mismatch {am.shape} vs {bm.shape}")
    diff = am - bm
    w = np.linalg.eigvalsh((diff + diff.T) / 2)
    if isinstance(a, SpsdMatrix):
        lam_max = float(a.eigenvalues.max(initial=0.0))
    else:
        lam_max = float(np.linalg.eigvalsh((am + am.T) / 2).max(initial=0.0))
    return bool(w[0] >= -tol * max(lam_max, 1.0))


def pinv_sqrt(values, *, rel_tol=PINV_REL_TOL):
    """Entrywise d -> d^(-1/2), zeroing entries at or below rel_tol * max(d)."""
    d = np.asarray(values, dtype=float)
    if d.ndim != 1:
        raise DimensionMismatchError("pinv_sqrt expects a vector")
    cutoff = rel_tol * max(float(d.max(initial=0.0)), 0.0)
    out = np.zeros_like(d)
    keep = d > cutoff
    out[keep] = 1.0 / np.sqrt(d[keep])
    return out


class Projector:
    """Orthogonal projector onto the span of a basis with orthonormal columns."""

    def __init__(self, basis, *, orth_tol=ORTH_TOL):
        q = np.asarray(getattr(basis, "q", basis), dtype=float)
        if q.ndim != 2:
            raise DimensionMismatchError("projector basis must be a matrix")
        gram_err = float(np.linalg.norm(q.T @ q - np.eye(q.shape[1])))
        if gram_err > orth_tol * max(1.0, np.sqrt(q.shape[0])):
            raise NotSymmetricError(f"basis columns not orthonormal ({gram_err:.3e})")
        self.q = q

    def apply(self, m):
        arr = np.asarray(dense_entries(m), dtype=float)
        if arr.shape[0] != self.q.shape[0]:
            raise DimensionMismatchError(
                f"cannot project shape {arr.shape} with basis {self.q.shape}"
            )
        return self.q @ (self.q.T @ arr)

    def matrix(self):
        return self.q @ self.q.T

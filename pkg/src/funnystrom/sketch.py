"""Randomized orthonormal bases for range sketching.

Randomness comes from counter-based Philox generators keyed by
``(seed, stream)``, so every draw is reproducible bit for bit and
independent streams are cheap to split off. Standard normal variates
use numpy's ziggurat sampler; the choice is fixed here because
bit-level reproducibility is per implementation.

Orthonormalization is QR with column pivoting plus a rank decision at
``rel_tol * sigma_1``, followed by a second plain QR pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, NotSymmetricError, RankOutOfRangeError
from .linalg import SpsdMatrix

ORTH_TOL = 1e-12
RANK_REL_TOL = 1e-12


def rng_for(seed, stream=0):
    """Philox generator for a (seed, stream) pair.

    The two nonnegative 64-bit integers form the Philox key as
    ``seed + 2^64 * stream``; stream 0 is the default draw.
    """
    seed, stream = int(seed), int(stream)
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be nonnegative")
    key = (seed % 2**64) + (stream % 2**64) * 2**64
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SketchConfig:
    """Sketch parameters: target rank k, basis size ell (defaults to k),
    iteration depth q, and the mandatory seed."""

    k: int
    ell: int | None = None
    q: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.ell is None:
            object.__setattr__(self, "ell", self.k)
        if self.k < 1:
            raise RankOutOfRangeError(f"k must be >= 1, got {self.k}")
        if self.ell < self.k:
            raise RankOutOfRangeError(f"ell={self.ell} smaller than k={self.k}")
        if self.q < 0:
            raise ValueError(f"q must be >= 0, got {self.q}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class Provenance:
    scheme: str
    seed: int | None
    depth: int = 0
    block_width: int = 0


@dataclass
class OrthonormalBasis:
    """n x ell matrix with orthonormal columns plus provenance.

    ``collapsed`` is set when the construction delivered fewer columns
    than requested (numerical rank loss or an exhausted residual).
    """

    q: np.ndarray
    provenance: Provenance
    collapsed: bool = False
    pivots: tuple | None = None

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        if self.q.ndim != 2 or self.q.shape[1] > self.q.shape[0]:
            raise DimensionMismatchError(f"bad basis shape {self.q.shape}")
        defect = float(np.linalg.norm(self.q.T @ self.q - np.eye(self.q.shape[1])))
        if defect > ORTH_TOL:
            raise NotSymmetricError(f"basis not orthonormal (defect {defect:.3e})")

    @property
    def n(self):
        return self.q.shape[0]

    @property
    def ell(self):
        return self.q.shape[1]


def orthonormal_columns(y, *, rel_tol=RANK_REL_TOL):
    """Orthonormal basis for the numerical range of y as (Q, rank)."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 2:
        raise DimensionMismatchError("expected a matrix of sketch vectors")
    if y.shape[1] == 0:
        return y[:, :0].copy(), 0
    qm, r, _ = scipy.linalg.qr(y, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        return y[:, :0].copy(), 0
    rank = int(np.count_nonzero(diag > rel_tol * diag[0]))
    qm = qm[:, :rank]
    # second pass cleans up the loss of orthogonality from pivoted QR
    qm = np.linalg.qr(qm)[0]
    return qm, rank


def _require_spsd(a):
    if not isinstance(a, SpsdMatrix):
        raise TypeError("sketch builders expect an SpsdMatrix")
    return a


def gaussian_basis(a, cfg):
    """Basis for range(A^q Omega), Omega iid standard normal n x ell.

    q = 0 orthonormalizes Omega itself. For q >= 1 the power iteration
    is stabilized by re-orthonormalizing between multiplies, which
    leaves the span unchanged in exact arithmetic.
    """
    a = _require_spsd(a)
    if cfg.ell > a.n:
        raise RankOutOfRangeError(f"ell={cfg.ell} exceeds n={a.n}")
    rng = rng_for(cfg.seed)
    y = rng.standard_normal((a.n, cfg.ell))
    for i in range(cfg.q):
        if i > 0:
            y, _ = orthonormal_columns(y)
        y = a.entries @ y
    qm, rank = orthonormal_columns(y)
    scheme = "gaussian" if cfg.q == 0 else "subspace-iteration"
    return OrthonormalBasis(qm, Provenance(scheme, cfg.seed, cfg.q, 0),
                            collapsed=rank < cfg.ell)


def krylov_basis(a, cfg):
    """Basis spanning the block Krylov space [Omega, A Omega, ..., A^q Omega].

    The block width is cfg.k (cfg.ell is ignored; the delivered size is
    the achieved rank, at most (q+1) k). Each new block is
    orthogonalized twice against the accumulated basis before its own
    rank decision, and the assembled basis gets one full
    re-orthonormalization pass.
    """
    a = _require_spsd(a)
    if (cfg.q + 1) * cfg.k > a.n:
        raise RankOutOfRangeError(
            f"(q+1)*k = {(cfg.q + 1) * cfg.k} exceeds n = {a.n}"
        )
    rng = rng_for(cfg.seed)
    omega = rng.standard_normal((a.n, cfg.k))
    block, rank = orthonormal_columns(omega)
    parts = [block]
    for _ in range(cfg.q):
        if block.shape[1] == 0:
            break
        acc = np.concatenate(parts, axis=1)
        w = a.entries @ block
        w = w - acc @ (acc.T @ w)
        w = w - acc @ (acc.T @ w)
        block, rank = orthonormal_columns(w)
        if rank:
            parts.append(block)
    basis = np.concatenate(parts, axis=1)
    qm = np.linalg.qr(basis)[0]
    full = (cfg.q + 1) * cfg.k
    return OrthonormalBasis(qm, Provenance("block-krylov", cfg.seed, cfg.q, cfg.k),
                            collapsed=qm.shape[1] < full)


def rpcholesky_basis(a, ell, seed):
    """Randomly pivoted partial Cholesky pivot selection.

    Pivots are drawn with probability proportional to the residual
    diagonal, which is clamped at zero after each rank-1 downdate. The
    returned basis consists of standard basis columns at the pivots, so
    Nystrom approximation with it is column selection. An exhausted
    residual truncates the basis early and sets ``collapsed``.
    """
    a = _require_spsd(a)
    if not 1 <= ell <= a.n:
        raise RankOutOfRangeError(f"ell={ell} outside [1, {a.n}]")
    rng = rng_for(seed)
    resid = a.entries.copy()
    trace0 = max(float(np.trace(resid)), 0.0)
    pivots = []
    for _ in range(ell):
        d = np.maximum(np.diagonal(resid), 0.0)
        if pivots:
            d[pivots] = 0.0
        total = float(d.sum())
        # stop once the residual is numerically exhausted; sampling the
        # leftover roundoff would divide by a vanishing pivot
        if not total > RANK_REL_TOL * max(trace0, np.finfo(float).tiny):
            break
        s = int(rng.choice(a.n, p=d / total))
        col = resid[:, s].copy()
        resid -= np.outer(col, col) / col[s]
        # the update leaves row/column s zero up to roundoff; make it exact
        resid[:, s] = 0.0
        resid[s, :] = 0.0
        pivots.append(s)
    qm = np.zeros((a.n, len(pivots)))
    qm[pivots, np.arange(len(pivots))] = 1.0
    return OrthonormalBasis(qm, Provenance("rpcholesky", seed, 0, 0),
                            collapsed=len(pivots) < ell, pivots=tuple(pivots))


def explicit_basis(q, *, seed=None):
    """Wrap a user-provided matrix with orthonormal columns."""
    return OrthonormalBasis(np.asarray(q, dtype=float),
                            Provenance("explicit", seed, 0, 0))


def standard_basis(n, columns):
    """Standard basis columns e_i for the given zero-based indices."""
    cols = list(columns)
    if any(not 0 <= c < n for c in cols) or len(set(cols)) != len(cols):
        raise RankOutOfRangeError(f"bad column indices {cols} for n={n}")
    qm = np.zeros((n, len(cols)))
    qm[cols, np.arange(len(cols))] = 1.0
    return OrthonormalBasis(qm, Provenance("explicit", None, 0, 0))

"""Truncated Nystrom approximation and its matrix-function lift.

The rank-k truncated Nystrom approximation of an SPSD matrix A with
basis Q is computed in factored form: eigendecompose Q^T A Q = V D V^T,
form B = A Q V pinv(D^(1/2)), take the SVD B = U S W^T, and keep the
top k pairs (U_k, S_k^2). The product U S^2 U^T equals the best rank-k
truncation of A Q (Q^T A Q)^+ Q^T A without ever forming that n x n
matrix.

The lift maps the kept eigenvalues through a non-decreasing scalar
function while reusing the eigenvectors. Because factors drop exactly
zero directions, the lift of a rank-r factor equals
g(B) + f(0) P_B with g = f - f(0), which is the correct rank-r
truncation of f(B) when f(0) > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError, RankOutOfRangeError
from .linalg import LowRankFactor, SpsdMatrix, pinv_sqrt, _sorted_eigh

FACTOR_RANK_TOL = 1e-12


def _basis_matrix(basis, n):
    qm = np.asarray(getattr(basis, "q", basis), dtype=float)
    if qm.ndim != 2 or qm.shape[0] != n:
        raise DimensionMismatchError(f"basis shape {qm.shape} does not match n={n}")
    return qm


def _resolve_rank(k, ell, collapsed):
    if k < 1:
        raise RankOutOfRangeError(f"k must be >= 1, got {k}")
    if k > ell:
        if collapsed:
            # the sketch lost rank upstream; reduce silently but record
            # the reduction through the returned factor's k
            return ell
        raise RankOutOfRangeError(f"k={k} exceeds basis size ell={ell}")
    return k


def nystrom_truncated(a, basis, k):
    """Rank-k truncated Nystrom approximation as a LowRankFactor.

    k is reduced to the achieved basis rank when the basis carries a
    collapse flag; trailing numerically zero eigenvalues are dropped so
    the factor rank equals the approximation's numerical rank.
    """
    if not isinstance(a, SpsdMatrix):
        raise TypeError("nystrom_truncated expects an SpsdMatrix")
    qm = _basis_matrix(basis, a.n)
    k = _resolve_rank(k, qm.shape[1], getattr(basis, "collapsed", False))
    aq = a.entries @ qm
    m = qm.T @ aq
    m = (m + m.T) / 2
    d, v = np.linalg.eigh(m)
    # roundoff can push eigenvalues of Q^T A Q slightly negative; the
    # pseudoinverse cutoff treats them as zero
    b = aq @ (v * pinv_sqrt(np.maximum(d, 0.0)))
    u, s, _ = np.linalg.svd(b, full_matrices=False)
    lam = s * s
    if lam.size and lam[0] > 0.0:
        rank = int(np.count_nonzero(s > FACTOR_RANK_TOL * s[0]))
    else:
        rank = 0
    r = min(rank, k)
    return LowRankFactor(a.n, k, u[:, :r], lam[:r])


def funnystrom(factor, f):
    """Lift a Nystrom factor through a scalar function.

    Eigenvalues are mapped by f and re-sorted (stable) with their
    eigenvectors; f must be non-decreasing with f(0) >= 0, otherwise
    the factored form would not be the rank-r truncation of f applied
    to the factor's matrix.
    """
    if not getattr(f, "non_decreasing", False):
        raise DomainError(f"{getattr(f, 'name', f)!r} is not flagged non-decreasing")
    if getattr(f, "value_at_zero", 0.0) < 0.0:
        raise DomainError(f"{f.name}: f(0) must be >= 0")
    vals = np.asarray(f(factor.lam), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"{f.name} produced non-finite values on the factor")
    order = np.argsort(-vals, kind="stable")
    return LowRankFactor(factor.n, factor.k, factor.u[:, order], vals[order])


@dataclass
class RectFactor:
    """Rank-k factored approximation left @ diag(sing) @ right."""

    left: np.ndarray
    sing: np.ndarray
    right: np.ndarray

    def matrix(self):
        return (self.left * self.sing) @ self.right


def projection_one_sided(a, basis, k):
    """Best rank-k approximation of A inside the basis range.

    Returns (Q Q^T A)_(k) = Q (Q^T A)_(k) in factored form.
    """
    if not isinstance(a, SpsdMatrix):
        raise TypeError("projection_one_sided expects an SpsdMatrix")
    qm = _basis_matrix(basis, a.n)
    k = _resolve_rank(k, qm.shape[1], getattr(basis, "collapsed", False))
    c = qm.T @ a.entries
    u, s, vt = np.linalg.svd(c, full_matrices=False)
    return RectFactor(qm @ u[:, :k], s[:k].copy(), vt[:k].copy())


def projection_two_sided(a, basis, k):
    """Rank-k truncation of the compression Q Q^T A Q Q^T.

    Returns (Q Q^T A Q Q^T)_(k) = Q (Q^T A Q)_(k) Q^T as a factor.
    """
    if not isinstance(a, SpsdMatrix):
        raise TypeError("projection_two_sided expects an SpsdMatrix")
    qm = _basis_matrix(basis, a.n)
    k = _resolve_rank(k, qm.shape[1], getattr(basis, "collapsed", False))
    m = qm.T @ (a.entries @ qm)
    m = (m + m.T) / 2
    d, v = _sorted_eigh(m)
    d = np.maximum(d, 0.0)
    return LowRankFactor(a.n, k, qm @ v[:, :k], d[:k])

"""Tests for the dense SPSD substrate."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from funnystrom.errors import (
    DimensionMismatchError,
    InvalidPError,
    NotPsdError,
    NotSymmetricError,
    RankOutOfRangeError,
)
from funnystrom.linalg import (
    FROBENIUS,
    NUCLEAR,
    OPERATOR,
    LowRankFactor,
    NormKind,
    Projector,
    SpsdMatrix,
    best_rank_k,
    pinv_sqrt,
    psd_order,
    schatten_from_values,
    schatten_norm,
    sym_eig,
)


def jacobi_eigenvalues(m, sweeps=60, tol=1e-14):
    """Independent eigenvalue oracle: classical cyclic Jacobi rotations.

    Deliberately avoids numpy.linalg.eigh so that sym_eig is checked
    against a second algorithm, not against itself.
    """
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[0]
    for _ in range(sweeps):
        off = np.sqrt(np.sum(a**2) - np.sum(np.diag(a) ** 2))
        if off <= tol * max(np.abs(np.diag(a)).max(), 1.0):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))[::-1]


class TestSpsdMatrix:
    def test_diagonal_eigenpairs(self):
        a = SpsdMatrix(np.diag([3.0, 2.0, 1.0]))
        np.testing.assert_array_equal(a.eigenvalues, [3.0, 2.0, 1.0])
        np.testing.assert_allclose(np.abs(a.eigenvectors), np.eye(3), atol=1e-14)

    def test_identity(self):
        a = SpsdMatrix(np.eye(3))
        np.testing.assert_array_equal(a.eigenvalues, np.ones(3))
        recon = (a.eigenvectors * a.eigenvalues) @ a.eigenvectors.T
        np.testing.assert_allclose(recon, np.eye(3), atol=1e-13)

    def test_random_reconstruction_against_jacobi_oracle(self):
        rng = np.random.default_rng(7)
        g = rng.standard_normal((6, 6))
        m = g @ g.T
        a = SpsdMatrix(m)
        scale = np.linalg.norm(m)
        recon = (a.eigenvectors * a.eigenvalues) @ a.eigenvectors.T
        assert np.linalg.norm(a.entries - recon) < 1e-12 * scale
        oracle = jacobi_eigenvalues(m)
        np.testing.assert_allclose(a.eigenvalues, oracle, rtol=0, atol=1e-10 * scale)

    def test_descending_order_and_clamp(self):
        # a tiny negative eigenvalue within tolerance is clamped to zero
        u = np.array([[1.0, 0.0], [0.0, 1.0]])
        a = SpsdMatrix.from_spectrum([1.0, -1e-14], u)
        np.testing.assert_array_equal(a.eigenvalues, [1.0, 0.0])

    def test_rejects_asymmetric(self):
        m = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(NotSymmetricError):
            SpsdMatrix(m)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPsdError):
            SpsdMatrix(np.diag([1.0, -0.5]))

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionMismatchError):
            SpsdMatrix(np.ones((2, 3)))

    def test_from_spectrum_sorts_descending(self):
        a = SpsdMatrix.from_spectrum([1.0, 3.0, 2.0])
        np.testing.assert_array_equal(a.eigenvalues, [3.0, 2.0, 1.0])
        np.testing.assert_allclose(a.entries, np.diag([1.0, 3.0, 2.0]))

    def test_from_spectrum_rejects_nonorthogonal(self):
        with pytest.raises(NotSymmetricError):
            SpsdMatrix.from_spectrum([1.0, 1.0], np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_sym_eig_accepts_raw_array(self):
        vals, vecs = sym_eig(np.diag([2.0, 5.0]))
        np.testing.assert_array_equal(vals, [5.0, 2.0])
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(2), atol=1e-14)


class TestNormKind:
    def test_labels(self):
        assert NUCLEAR.label == "nuclear"
        assert FROBENIUS.label == "frobenius"
        assert OPERATOR.label == "operator"
        assert NormKind(1.5).label == "schatten1.5"

    def test_parse(self):
        assert NormKind.parse("nuclear") == NUCLEAR
        assert NormKind.parse("  Frobenius ") == FROBENIUS
        assert NormKind.parse("operator") == OPERATOR
        assert NormKind.parse("schatten:3") == NormKind(3.0)
        assert NormKind.parse("schatten1.5") == NormKind(1.5)

    def test_invalid_p(self):
        with pytest.raises(InvalidPError):
            NormKind(0.5)
        with pytest.raises(InvalidPError):
            NormKind.parse("schatten0.2")
        with pytest.raises(InvalidPError):
            NormKind.parse("trace")


class TestSchattenNorm:
    def test_identity_nuclear(self):
        assert schatten_norm(np.eye(3), NUCLEAR) == pytest.approx(3.0)

    def test_identity_operator(self):
        assert schatten_norm(np.eye(3), OPERATOR) == pytest.approx(1.0)

    def test_three_four_five(self):
        assert schatten_norm(np.diag([3.0, 4.0]), FROBENIUS) == pytest.approx(5.0)

    def test_aliases_match_schatten_forms(self):
        # Nuclear == Schatten(1), Frobenius == Schatten(2),
        # Operator == max singular value, on 100 random matrices
        rng = np.random.default_rng(0)
        for _ in range(100):
            m = rng.standard_normal((5, 4))
            s = np.linalg.svd(m, compute_uv=False)
            pairs = [
                (schatten_norm(m, NUCLEAR), schatten_norm(m, NormKind(1.0))),
                (schatten_norm(m, FROBENIUS), schatten_norm(m, NormKind(2.0))),
                (schatten_norm(m, OPERATOR), s[0]),
            ]
            for left, right in pairs:
                assert abs(left - right) <= 1e-13 * max(right, 1.0)

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((6, 6))
        s = np.linalg.svd(m, compute_uv=False)
        assert schatten_norm(m, NormKind(3.0)) == pytest.approx(
            (s**3).sum() ** (1 / 3), rel=1e-13
        )

    def test_empty_values(self):
        assert schatten_from_values([], NUCLEAR) == 0.0

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.0, 1e3), min_size=1, max_size=8),
           st.floats(1.0, 6.0))
    def test_monotone_in_p(self, values, p):
        # Schatten norms are non-increasing in p
        lo = schatten_from_values(values, NormKind(p))
        hi = schatten_from_values(values, NormKind(p + 1.0))
        assert hi <= lo + 1e-9 * max(lo, 1.0)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.0, 1e6), st.floats(1.0, 4.0))
    def test_homogeneous(self, scale, p):
        values = np.array([3.0, 1.0, 0.5])
        kind = NormKind(p)
        got = schatten_from_values(scale * values, kind)
        assert got == pytest.approx(scale * schatten_from_values(values, kind),
                                    rel=1e-12, abs=1e-12)


class TestTraceDifferenceBound:
    def test_psd_pair_schatten_power_bound(self):
        # for B >= C >= 0: ||B - C||_(p) <= (||B||_p^p - ||C||_p^p)^(1/p),
        # with equality at p = 1
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(3, 7))
            g = rng.standard_normal((n, n))
            b = g @ g.T + 0.1 * np.eye(n)
            h = rng.standard_normal((n, n))
            w = h @ h.T
            s = 0.9 * np.linalg.eigvalsh(b)[0] / np.linalg.eigvalsh(w)[-1]
            c = b - s * w
            assert psd_order(b, c) and psd_order(c, np.zeros_like(c))
            sb = np.linalg.eigvalsh(b)
            sc = np.linalg.eigvalsh(c)
            for p in (1.0, 2.0, 3.0, 4.0):
                diff = schatten_norm(b - c, NormKind(p))
                budget = ((np.abs(sb) ** p).sum() - (np.abs(sc) ** p).sum()) ** (1 / p)
                assert diff <= budget + 1e-10
            nuc_diff = schatten_norm(b - c, NUCLEAR)
            nuc_budget = np.abs(sb).sum() - np.abs(sc).sum()
            assert nuc_diff == pytest.approx(nuc_budget, rel=1e-10)


class TestBestRankK:
    def test_diagonal_truncation(self):
        a = SpsdMatrix(np.diag([3.0, 2.0, 1.0]))
        f = best_rank_k(a, 2)
        np.testing.assert_allclose(f.matrix(), np.diag([3.0, 2.0, 0.0]), atol=1e-14)

    def test_full_rank_is_exact(self):
        rng = np.random.default_rng(5)
        g = rng.standard_normal((4, 4))
        a = SpsdMatrix(g @ g.T)
        f = best_rank_k(a, 4)
        np.testing.assert_allclose(f.matrix(), a.entries, atol=1e-12)

    def test_matches_independent_svd_path(self):
        # separate dense-SVD oracle for the truncation
        rng = np.random.default_rng(17)
        g = rng.standard_normal((5, 5))
        a = SpsdMatrix(g @ g.T)
        u, s, vt = np.linalg.svd(a.entries)
        oracle = (u[:, :2] * s[:2]) @ vt[:2]
        f = best_rank_k(a, 2)
        np.testing.assert_allclose(f.matrix(), oracle, atol=1e-11 * s[0])

    def test_beats_random_candidates_in_every_norm(self):
        rng = np.random.default_rng(23)
        g = rng.standard_normal((3, 3))
        a = SpsdMatrix(g @ g.T)
        kinds = (NUCLEAR, FROBENIUS, OPERATOR, NormKind(3.0))
        best = best_rank_k(a, 1).matrix()
        base = {kind.label: schatten_norm(a.entries - best, kind) for kind in kinds}
        for _ in range(1000):
            x = rng.standard_normal((3, 1))
            y = rng.standard_normal((3, 1))
            cand = x @ y.T
            for kind in kinds:
                err = schatten_norm(a.entries - cand, kind)
                assert base[kind.label] <= err + 1e-12

    def test_rank_out_of_range(self):
        a = SpsdMatrix(np.eye(3))
        with pytest.raises(RankOutOfRangeError):
            best_rank_k(a, 4)
        with pytest.raises(RankOutOfRangeError):
            best_rank_k(a, -1)

    def test_requires_spsd_matrix(self):
        with pytest.raises(TypeError):
            best_rank_k(np.eye(3), 1)


class TestPsdOrder:
    def test_simple_true(self):
        assert psd_order(np.diag([2.0, 1.0]), np.diag([1.0, 1.0]))

    def test_indefinite_difference(self):
        assert not psd_order(np.diag([1.0, 1.0]), np.diag([2.0, 0.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            psd_order(np.eye(2), np.eye(3))

    def test_weyl_monotonicity(self):
        # psd_order(a, b) implies lam_i(a) >= lam_i(b) - 1e-10 lam_1(a)
        rng = np.random.default_rng(2)
        for _ in range(20):
            g = rng.standard_normal((4, 4))
            b = g @ g.T
            h = rng.standard_normal((4, 4))
            a = b + h @ h.T
            assert psd_order(a, b)
            la = np.sort(np.linalg.eigvalsh(a))[::-1]
            lb = np.sort(np.linalg.eigvalsh(b))[::-1]
            assert np.all(la >= lb - 1e-10 * la[0])


class TestPinvSqrt:
    def test_basic(self):
        np.testing.assert_array_equal(pinv_sqrt(np.array([4.0, 1.0, 0.0])),
                                      [0.5, 1.0, 0.0])

    def test_all_zero(self):
        np.testing.assert_array_equal(pinv_sqrt(np.zeros(3)), np.zeros(3))

    def test_tiny_mode_truncated(self):
        got = pinv_sqrt(np.array([1.0, 1e-16]))
        np.testing.assert_array_equal(got, [1.0, 0.0])

    def test_rejects_matrix_input(self):
        with pytest.raises(DimensionMismatchError):
            pinv_sqrt(np.eye(2))


class TestLowRankFactor:
    def test_matrix_and_truncate(self):
        u = np.eye(4)[:, :3]
        f = LowRankFactor(4, 3, u, np.array([3.0, 2.0, 1.0]))
        np.testing.assert_allclose(f.matrix(), np.diag([3.0, 2.0, 1.0, 0.0]))
        t = f.truncate(2)
        assert t.rank == 2
        np.testing.assert_array_equal(t.lam, [3.0, 2.0])

    def test_truncate_beyond_rank_keeps_rank(self):
        f = LowRankFactor(4, 1, np.eye(4)[:, :1], np.array([2.0]))
        t = f.truncate(3)
        assert t.k == 3 and t.rank == 1

    def test_padded_eigenvalues(self):
        f = LowRankFactor(4, 2, np.eye(4)[:, :2], np.array([5.0, 1.0]))
        np.testing.assert_array_equal(f.padded_eigenvalues(), [5.0, 1.0, 0.0, 0.0])
        np.testing.assert_array_equal(f.padded_eigenvalues(3), [5.0, 1.0, 0.0])

    def test_rejects_nonorthonormal_columns(self):
        u = np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
        with pytest.raises(NotSymmetricError):
            LowRankFactor(3, 2, u, np.array([1.0, 1.0]))

    def test_rejects_ascending_eigenvalues(self):
        with pytest.raises(NotPsdError):
            LowRankFactor(3, 2, np.eye(3)[:, :2], np.array([1.0, 2.0]))


class TestProjector:
    def test_idempotent_and_symmetric(self):
        rng = np.random.default_rng(9)
        q, _ = np.linalg.qr(rng.standard_normal((6, 3)))
        proj = Projector(q)
        p = proj.matrix()
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        np.testing.assert_allclose(p, p.T, atol=1e-14)

    def test_apply_matches_matrix(self):
        rng = np.random.default_rng(10)
        q, _ = np.linalg.qr(rng.standard_normal((5, 2)))
        m = rng.standard_normal((5, 4))
        proj = Projector(q)
        np.testing.assert_allclose(proj.apply(m), proj.matrix() @ m, atol=1e-12)

    def test_rejects_nonorthonormal(self):
        with pytest.raises(NotSymmetricError):
            Projector(np.ones((4, 2)))

    def test_shape_mismatch(self):
        proj = Projector(np.eye(3)[:, :2])
        with pytest.raises(DimensionMismatchError):
            proj.apply(np.eye(4))

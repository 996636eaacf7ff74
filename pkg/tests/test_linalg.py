"""Tests for the dense linear-algebra substrate."""

import numpy as np
import pytest

from coneset.errors import NumericError
from coneset.linalg import orthonormalize, svd, sym_generalized_eig

from oracles import projector_from_columns


class TestOrthonormalize:
    def test_identity_columns_pass_through(self):
        m = np.eye(4)[:, :3]
        q = orthonormalize(m)
        np.testing.assert_allclose(q, m, atol=1e-12)

    def test_parallel_columns_collapse_to_rank_one(self):
        m = np.array([[1.0, 2.0], [0.0, 0.0]])
        q = orthonormalize(m)
        assert q.shape == (2, 1)
        np.testing.assert_allclose(np.abs(q[:, 0]), [1.0, 0.0], atol=1e-12)

    def test_projector_matches_svd_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            m = rng.standard_normal((5, 3))
            q = orthonormalize(m)
            assert np.max(np.abs(q.T @ q - np.eye(q.shape[1]))) <= 1e-12
            np.testing.assert_allclose(
                q @ q.T, projector_from_columns(m), atol=1e-10
            )

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((6, 4))
        q1 = orthonormalize(m)
        q2 = orthonormalize(q1)
        np.testing.assert_allclose(q1 @ q1.T, q2 @ q2.T, atol=1e-10)

    def test_all_zero_input_gives_zero_columns(self):
        q = orthonormalize(np.zeros((4, 2)))
        assert q.shape == (4, 0)

    def test_near_dependent_column_dropped(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((8, 2))
        m = np.column_stack([a, a @ np.array([0.5, -1.5])])
        q = orthonormalize(m)
        assert q.shape[1] == 2


class TestSvd:
    def test_diagonal_singular_values(self):
        _, s, _ = svd(np.diag([3.0, 2.0]))
        np.testing.assert_allclose(s, [3.0, 2.0], atol=1e-12)

    def test_rank_one_outer_product(self):
        u = np.array([2.0, 0.0, 0.0])
        v = np.array([0.0, 3.0])
        _, s, _ = svd(np.outer(u, v))
        np.testing.assert_allclose(s, [6.0, 0.0], atol=1e-12)

    def test_reconstruction_identity(self):
        rng = np.random.default_rng(21)
        m = rng.standard_normal((6, 4))
        u, s, v = svd(m)
        err = np.linalg.norm(u @ np.diag(s) @ v.T - m)
        assert err <= 1e-10 * np.linalg.norm(m)
        assert np.all(np.diff(s) <= 0)
        assert np.all(s >= 0)

    def test_singular_values_rotation_invariant(self):
        rng = np.random.default_rng(5)
        m = rng.standard_normal((6, 4))
        q1, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        q2, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        _, s0, _ = svd(m)
        _, s1, _ = svd(q1 @ m @ q2)
        np.testing.assert_allclose(s0, s1, atol=1e-10)


class TestSymGeneralizedEig:
    def test_diagonal_case(self):
        pairs = sym_generalized_eig(np.diag([2.0, 1.0]), np.eye(2))
        vals = [p.value for p in pairs]
        np.testing.assert_allclose(vals, [2.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(np.abs(pairs[0].vector), [1.0, 0.0], atol=1e-10)
        np.testing.assert_allclose(np.abs(pairs[1].vector), [0.0, 1.0], atol=1e-10)

    def test_equal_operators_give_unit_eigenvalues(self):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((5, 5))
        spd = a @ a.T + 5 * np.eye(5)
        pairs = sym_generalized_eig(spd, spd)
        np.testing.assert_allclose([p.value for p in pairs], 1.0, atol=1e-9)

    def test_residual_bound_on_random_spd_pairs(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            a0 = rng.standard_normal((10, 10))
            b0 = rng.standard_normal((10, 10))
            a = a0 @ a0.T
            b = b0 @ b0.T + 10 * np.eye(10)
            bound = 1e-8 * (np.linalg.norm(a) + np.linalg.norm(b))
            for p in sym_generalized_eig(a, b):
                res = np.linalg.norm(a @ p.vector - p.value * (b @ p.vector))
                assert res <= bound
                np.testing.assert_allclose(np.linalg.norm(p.vector), 1.0, atol=1e-12)

    def test_identity_b_matches_plain_eigensolver(self):
        rng = np.random.default_rng(31)
        a0 = rng.standard_normal((6, 6))
        a = a0 @ a0.T
        pairs = sym_generalized_eig(a, np.eye(6))
        expected = np.sort(np.linalg.eigvalsh(a))[::-1]
        np.testing.assert_allclose([p.value for p in pairs], expected, atol=1e-9)

    def test_indefinite_b_reports_pivot(self):
        b = np.diag([1.0, -1.0, 1.0])
        with pytest.raises(NumericError, match="pivot 1"):
            sym_generalized_eig(np.eye(3), b)

    def test_values_sorted_descending(self):
        rng = np.random.default_rng(37)
        a0 = rng.standard_normal((7, 7))
        b0 = rng.standard_normal((7, 7))
        pairs = sym_generalized_eig(a0 @ a0.T, b0 @ b0.T + 7 * np.eye(7))
        vals = [p.value for p in pairs]
        assert vals == sorted(vals, reverse=True)

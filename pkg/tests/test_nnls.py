"""Tests for the active-set non-negative least squares solver."""

import numpy as np
import pytest

from coneset.nnopt import nnls_solve

from oracles import nnls_enumeration

TAU = 1e-10


def assert_kkt(basis, x, w):
    """Stationarity and feasibility at tolerance TAU.

    Positive weights must have (near) zero gradient; weights at the
    bound must have a non-negative gradient of the objective.
    """
    grad = basis.T @ (basis @ w - x)
    scale = max(np.max(np.abs(basis.T @ x)), 1.0)
    assert np.all(w >= 0)
    active = w > TAU
    assert np.all(np.abs(grad[active]) <= TAU * scale)
    assert np.all(grad[~active] >= -TAU * scale)


class TestKnownSolutions:
    def test_orthonormal_basis_feasible_optimum(self):
        basis = np.eye(2)
        sol = nnls_solve(basis, np.array([2.0, 3.0]))
        np.testing.assert_allclose(sol.weights, [2.0, 3.0], atol=1e-12)
        assert sol.residual_norm <= 1e-12

    def test_opposite_direction_clips_to_zero(self):
        basis = np.array([[1.0], [0.0]])
        sol = nnls_solve(basis, np.array([-1.0, 0.0]))
        np.testing.assert_allclose(sol.weights, [0.0], atol=1e-15)
        np.testing.assert_allclose(sol.residual_norm, 1.0, atol=1e-12)

    def test_feasible_combination_recovered(self):
        rng = np.random.default_rng(2)
        basis = rng.random((6, 4))
        w0 = rng.random(4)
        sol = nnls_solve(basis, basis @ w0)
        assert sol.residual_norm <= 1e-10


class TestEnumerationOracle:
    def test_matches_brute_force_on_correlated_columns(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            base = rng.standard_normal((3, 1))
            basis = base + 0.3 * rng.standard_normal((3, 2))
            x = rng.standard_normal(3)
            sol = nnls_solve(basis, x)
            best_obj, _ = nnls_enumeration(basis, x)
            assert abs(sol.residual_norm - best_obj) <= 1e-8
            assert_kkt(basis, x, sol.weights)

    def test_matches_brute_force_on_varied_shapes(self):
        rng = np.random.default_rng(23)
        for _ in range(60):
            d = int(rng.integers(2, 11))
            r = int(rng.integers(1, 9))
            basis = rng.standard_normal((d, r))
            x = rng.standard_normal(d)
            sol = nnls_solve(basis, x)
            best_obj, _ = nnls_enumeration(basis, x)
            assert abs(sol.residual_norm - best_obj) <= 1e-8
            assert_kkt(basis, x, sol.weights)


class TestEdgeCases:
    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            nnls_solve(np.eye(3), np.ones(2))

    def test_all_zero_basis_rejected(self):
        with pytest.raises(ValueError):
            nnls_solve(np.zeros((3, 2)), np.ones(3))

    def test_zero_column_gets_zero_weight(self):
        basis = np.array([[1.0, 0.0], [0.0, 0.0]])
        sol = nnls_solve(basis, np.array([2.0, 0.0]))
        np.testing.assert_allclose(sol.weights, [2.0, 0.0], atol=1e-12)

    def test_zero_target(self):
        sol = nnls_solve(np.eye(2), np.zeros(2))
        np.testing.assert_allclose(sol.weights, 0.0, atol=1e-15)
        assert sol.residual_norm == 0.0

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        basis = rng.standard_normal((8, 5))
        x = rng.standard_normal(8)
        w1 = nnls_solve(basis, x).weights
        w2 = nnls_solve(basis, x).weights
        assert np.array_equal(w1, w2)


class TestInvariants:
    def test_never_worse_than_clipped_least_squares(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            basis = rng.standard_normal((6, 4))
            x = rng.standard_normal(6)
            sol = nnls_solve(basis, x)
            w_ls, *_ = np.linalg.lstsq(basis, x, rcond=None)
            clipped = np.linalg.norm(x - basis @ np.maximum(w_ls, 0.0))
            assert sol.residual_norm <= clipped + 1e-12

    def test_scaling_homogeneity(self):
        rng = np.random.default_rng(43)
        basis = rng.standard_normal((7, 4))
        x = rng.standard_normal(7)
        w = nnls_solve(basis, x).weights
        w2 = nnls_solve(basis, 2.0 * x).weights
        assert np.array_equal(w2, 2.0 * w)
        w_odd = nnls_solve(basis, 3.7 * x).weights
        np.testing.assert_allclose(w_odd, 3.7 * w, rtol=1e-10, atol=1e-12)

    def test_rank_deficient_basis_still_optimal(self):
        rng = np.random.default_rng(47)
        a = rng.standard_normal((5, 2))
        basis = np.column_stack([a, a[:, 0] + a[:, 1]])
        x = rng.standard_normal(5)
        sol = nnls_solve(basis, x)
        best_obj, _ = nnls_enumeration(basis, x)
        assert abs(sol.residual_norm - best_obj) <= 1e-8

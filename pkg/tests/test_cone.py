"""Tests for convex cone construction, projection, and angle search."""

import numpy as np
import pytest

from coneset.cone import (
    AlsOptions,
    ConvexCone,
    cone_angles,
    cone_from_features,
    cone_similarity,
    project_cone_to_subspace,
    project_to_cone,
    vector_cone_angle,
)
from coneset.errors import DataError
from coneset.subspace import Subspace, canonical_angles

from oracles import random_orthonormal

INV_SQRT2 = 1.0 / np.sqrt(2.0)


def cone_of(*columns):
    return ConvexCone.from_generators(np.column_stack(columns))


class TestConeFromFeatures:
    def test_rank_one_data(self):
        f = np.tile([[1.0], [1.0]], (1, 5))
        cone = cone_from_features(f, 1, seed=0)
        assert cone.n_basis == 1
        np.testing.assert_allclose(np.abs(cone.basis[:, 0]), INV_SQRT2, atol=1e-6)

    def test_separable_axes_recovered(self):
        rng = np.random.default_rng(0)
        cols = []
        for _ in range(10):
            cols.append([rng.random() + 0.5, 0.0])
            cols.append([0.0, rng.random() + 0.5])
        f = np.array(cols).T
        cone = cone_from_features(f, 2, seed=0)
        basis = cone.basis[:, np.argsort(cone.basis[0])[::-1]]
        np.testing.assert_allclose(basis, np.eye(2), atol=1e-4)

    def test_negative_entry_rejected_with_position(self):
        f = np.ones((3, 4))
        f[2, 1] = -0.1
        with pytest.raises(DataError, match=r"row 2.*column 1"):
            cone_from_features(f, 2)

    def test_all_zero_rejected(self):
        with pytest.raises(DataError):
            cone_from_features(np.zeros((3, 4)), 1)

    def test_basis_columns_unit_norm(self):
        rng = np.random.default_rng(3)
        cone = cone_from_features(rng.random((6, 12)), 3, seed=1)
        norms = np.linalg.norm(cone.basis, axis=0)
        np.testing.assert_allclose(norms, 1.0, atol=1e-12)


class TestProjectToCone:
    def test_member_is_fixed_point(self):
        cone = cone_of([1.0, 0.2, 0.0], [0.0, 0.3, 1.0])
        x = cone.basis @ np.array([0.3, 0.7])
        xhat, w = project_to_cone(cone, x)
        np.testing.assert_allclose(xhat, x, atol=1e-10)
        assert np.all(w >= 0)

    def test_coordinate_cone_clips_negative_part(self):
        cone = cone_of([1.0, 0.0], [0.0, 1.0])
        xhat, _ = project_to_cone(cone, np.array([1.0, -1.0]))
        np.testing.assert_allclose(xhat, [1.0, 0.0], atol=1e-12)

    def test_polar_cone_projects_to_origin(self):
        cone = cone_of([1.0, 0.0], [0.0, 1.0])
        xhat, w = project_to_cone(cone, np.array([-1.0, -1.0]))
        np.testing.assert_allclose(xhat, 0.0, atol=1e-12)
        np.testing.assert_allclose(w, 0.0, atol=1e-12)


class TestVectorConeAngle:
    def test_interior_vector(self):
        cone = cone_of([1.0, 0.0], [0.0, 1.0])
        assert abs(vector_cone_angle(cone, np.array([0.5, 0.5])) - 1.0) <= 1e-10

    def test_half_right_angle(self):
        cone = cone_of([1.0, 0.0])
        c = vector_cone_angle(cone, np.array([INV_SQRT2, INV_SQRT2]))
        np.testing.assert_allclose(c, INV_SQRT2, atol=1e-10)

    def test_polar_vector_gives_zero(self):
        cone = cone_of([1.0, 0.0], [0.0, 1.0])
        assert vector_cone_angle(cone, np.array([-1.0, -1.0])) == 0.0

    def test_zero_vector_rejected(self):
        cone = cone_of([1.0, 0.0])
        with pytest.raises(ValueError):
            vector_cone_angle(cone, np.zeros(2))


class TestProjectConeToSubspace:
    def test_identity_keeps_cone(self):
        cone = cone_of([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        out = project_cone_to_subspace(cone, np.eye(3), mode="coords")
        np.testing.assert_allclose(out.basis, cone.basis, atol=1e-12)

    def test_annihilated_cone_is_empty(self):
        cone = cone_of([0.0, 0.0, 1.0])
        q = np.eye(3)[:, 2:]
        out = project_cone_to_subspace(cone, q, mode="complement")
        assert out.is_empty

    def test_coordinate_drop_renormalizes(self):
        cone = cone_of([INV_SQRT2, 0.0, INV_SQRT2])
        q = np.eye(3)[:, :2]
        out = project_cone_to_subspace(cone, q, mode="coords")
        np.testing.assert_allclose(out.basis, [[1.0], [0.0]], atol=1e-12)


class TestConeAngles:
    def test_identical_cones_all_ones(self):
        rng = np.random.default_rng(7)
        cone = cone_from_features(rng.random((6, 10)), 3, seed=2)
        spec = cone_angles(cone, cone, m=cone.n_basis)
        np.testing.assert_allclose(spec.cosines, 1.0, atol=1e-6)

    def test_planar_half_right_angle(self):
        c1 = cone_of([1.0, 0.0])
        c2 = cone_of([INV_SQRT2, INV_SQRT2])
        spec = cone_angles(c1, c2, m=1)
        np.testing.assert_allclose(spec.cosines[0], INV_SQRT2, atol=1e-4)

    def test_containment_then_orthogonal(self):
        c1 = cone_of([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        c2 = cone_of([INV_SQRT2, INV_SQRT2, 0.0], [0.0, 0.0, 1.0])
        spec = cone_angles(c1, c2, m=2)
        np.testing.assert_allclose(spec.cosines, [1.0, 0.0], atol=1e-4)

    def test_requested_count_bounded(self):
        c1 = cone_of([1.0, 0.0])
        c2 = cone_of([0.0, 1.0])
        with pytest.raises(ValueError):
            cone_angles(c1, c2, m=2)

    def test_witnesses_match_cosines(self):
        rng = np.random.default_rng(9)
        c1 = cone_from_features(rng.random((5, 8)), 2, seed=0)
        c2 = cone_from_features(rng.random((5, 8)), 2, seed=1)
        spec = cone_angles(c1, c2)
        for i in range(len(spec)):
            if not spec.converged[i]:
                continue
            dot = float(spec.p_vectors[i] @ spec.q_vectors[i])
            assert abs(dot - spec.cosines[i]) <= 1e-8

    def test_duplicate_basis_deflates_to_empty(self):
        c = ConvexCone(np.column_stack([[1.0, 0.0], [1.0, 0.0]]))
        spec = cone_angles(c, c, m=2)
        np.testing.assert_allclose(spec.cosines[0], 1.0, atol=1e-6)
        np.testing.assert_allclose(spec.cosines[1], 0.0, atol=1e-12)
        assert spec.converged[1]

    def test_non_convergence_flagged_not_fatal(self):
        rng = np.random.default_rng(11)
        c1 = cone_from_features(rng.random((6, 9)), 3, seed=0)
        c2 = cone_from_features(rng.random((6, 9)), 3, seed=1)
        spec = cone_angles(c1, c2, opts=AlsOptions(max_iter=1, restarts=1))
        assert len(spec) == 3
        assert cone_similarity(spec) >= 0.0


class TestConeSimilarity:
    def test_identical(self):
        rng = np.random.default_rng(13)
        cone = cone_from_features(rng.random((5, 9)), 2, seed=4)
        spec = cone_angles(cone, cone)
        np.testing.assert_allclose(cone_similarity(spec), 1.0, atol=1e-6)

    def test_half_right_angle_pair(self):
        spec = cone_angles(cone_of([1.0, 0.0]), cone_of([INV_SQRT2, INV_SQRT2]), m=1)
        np.testing.assert_allclose(cone_similarity(spec, 1), 0.5, atol=1e-4)

    def test_orthogonal(self):
        spec = cone_angles(cone_of([1.0, 0.0]), cone_of([0.0, 1.0]), m=1)
        np.testing.assert_allclose(cone_similarity(spec, 1), 0.0, atol=1e-12)

    def test_zero_count_rejected(self):
        spec = cone_angles(cone_of([1.0, 0.0]), cone_of([0.0, 1.0]), m=1)
        with pytest.raises(ValueError):
            cone_similarity(spec, 0)


class TestGeometricInvariants:
    def test_similarity_symmetric(self):
        rng = np.random.default_rng(17)
        for trial in range(5):
            a = cone_from_features(rng.random((6, 9)), 3, seed=trial)
            b = cone_from_features(rng.random((6, 9)), 3, seed=trial + 50)
            s_ab = cone_similarity(cone_angles(a, b))
            s_ba = cone_similarity(cone_angles(b, a))
            assert abs(s_ab - s_ba) <= 1e-5

    def test_rotation_invariance(self):
        rng = np.random.default_rng(19)
        a = cone_from_features(rng.random((5, 8)), 2, seed=0)
        b = cone_from_features(rng.random((5, 8)), 2, seed=1)
        rot = random_orthonormal(rng, 5, 5)
        a_r = ConvexCone(rot @ a.basis)
        b_r = ConvexCone(rot @ b.basis)
        base = cone_angles(a, b).cosines
        rotated = cone_angles(a_r, b_r).cosines
        np.testing.assert_allclose(rotated, base, atol=1e-6)

    def test_monotone_cosine_ordering(self):
        rng = np.random.default_rng(23)
        for trial in range(5):
            a = cone_from_features(rng.random((7, 10)), 3, seed=trial)
            b = cone_from_features(rng.random((7, 10)), 3, seed=trial + 9)
            cos = cone_angles(a, b).cosines
            assert np.all(np.diff(cos) <= 1e-8)

    def test_positive_scaling_of_generators_is_noop(self):
        rng = np.random.default_rng(29)
        cols = rng.random((5, 4)) + 0.1
        scales = rng.random(4) * 5 + 0.5
        c1 = ConvexCone.from_generators(cols)
        c2 = ConvexCone.from_generators(cols * scales)
        np.testing.assert_allclose(c1.basis, c2.basis, atol=1e-12)

    def test_symmetric_generators_match_subspace_angles(self):
        rng = np.random.default_rng(31)
        for trial in range(5):
            d = int(rng.integers(4, 9))
            k1 = int(rng.integers(1, 4))
            k2 = int(rng.integers(1, 4))
            u1 = random_orthonormal(rng, d, k1)
            u2 = random_orthonormal(rng, d, k2)
            c1 = ConvexCone(np.hstack([u1, -u1]))
            c2 = ConvexCone(np.hstack([u2, -u2]))
            expected = canonical_angles(Subspace(u1), Subspace(u2))
            got = cone_angles(c1, c2, m=min(k1, k2)).cosines
            np.testing.assert_allclose(got, expected, atol=1e-3)


class TestEmptyConeHandling:
    def test_empty_marker(self):
        empty = ConvexCone.empty(4)
        assert empty.is_empty
        assert empty.n_basis == 0

    def test_projection_of_empty_cone_is_zero(self):
        empty = ConvexCone.empty(3)
        xhat, w = project_to_cone(empty, np.ones(3))
        np.testing.assert_allclose(xhat, 0.0)
        assert w.size == 0

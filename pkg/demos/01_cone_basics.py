"""
Learning a convex cone from non-negative data
=============================================

An image set with non-negative features lives naturally inside a convex
cone: every observation is (approximately) a non-negative mixture of a
few prototype directions. This script learns such a cone with NMF,
projects new vectors onto it, and shows how the cone distinguishes
directions a subspace cannot.
"""

import numpy as np

from coneset import cone_from_features, project_to_cone, vector_cone_angle

rng = np.random.default_rng(0)

# 1. Sample a set of 40 observations in R^8 from three hidden prototypes.
prototypes = rng.random((8, 3))
prototypes /= np.linalg.norm(prototypes, axis=0)
weights = rng.random((3, 40))
observations = prototypes @ weights + 0.01 * rng.random((8, 40))

# 2. Learn a rank-3 cone. The basis columns are unit-norm generators.
cone = cone_from_features(observations, 3, seed=0)
print("learned generators (columns):")
print(np.round(cone.basis, 3))

# 3. A fresh mixture of the prototypes sits essentially inside the cone.
inside = prototypes @ np.array([0.5, 0.2, 0.8])
xhat, w = project_to_cone(cone, inside)
print("\nmixture of the prototypes:")
print(f"  residual after cone projection: {np.linalg.norm(inside - xhat):.2e}")
print(f"  cosine to the cone:             {vector_cone_angle(cone, inside):.6f}")

# 4. The NEGATED mixture spans the same line, so any subspace model
#    scores it identically. The cone does not: non-negative weights
#    cannot reach it, and the angle collapses.
print("negated mixture:")
print(f"  cosine to the cone:             {vector_cone_angle(cone, -inside):.6f}")

# 5. Projection weights are always non-negative and go sparse for
#    vectors outside the cone: this signed mixture lands on a face
#    spanned by a single generator.
edge = prototypes @ np.array([1.0, -1.0, 0.0])
xhat, w = project_to_cone(cone, edge)
print("\ndifference of two prototypes:")
print(f"  projection weights: {np.round(w, 3)}")
print(f"  cosine to the cone: {vector_cone_angle(cone, edge):.3f}")

"""
Angles between subspaces and between cones
==========================================

Canonical angles compare two subspaces through an SVD; the cone
analogue finds each angle with an alternating projection search and
deflation. On sign-symmetric cones the two notions agree, and on
genuinely one-sided cones the cone angles see structure the subspace
angles miss.
"""

import numpy as np

from coneset import (
    ConvexCone,
    Subspace,
    angles_degrees,
    canonical_angles,
    cone_angles,
    cone_similarity,
)

inv = 1.0 / np.sqrt(2.0)

# 1. Two rays 45 degrees apart: one angle, cosine sqrt(2)/2.
ray_a = ConvexCone.from_generators(np.array([[1.0], [0.0]]))
ray_b = ConvexCone.from_generators(np.array([[inv], [inv]]))
spec = cone_angles(ray_a, ray_b)
print(f"45-degree rays: cosine={spec.cosines[0]:.5f} "
      f"angle={angles_degrees(spec)[0]:.2f} deg "
      f"similarity={cone_similarity(spec):.3f}")

# 2. A shared direction puts a zero angle first; deflation then exposes
#    the orthogonal remainder as a 90-degree second angle.
c1 = ConvexCone.from_generators(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
c2 = ConvexCone.from_generators(np.array([[inv, 0.0], [inv, 0.0], [0.0, 1.0]]))
spec = cone_angles(c1, c2, m=2)
print(f"containment fixture: cosines={np.round(spec.cosines, 6)}")

# 3. Cones with generators +/-u span full subspaces, so their angles
#    must reproduce the canonical angles.
rng = np.random.default_rng(7)
u1, _ = np.linalg.qr(rng.standard_normal((6, 2)))
u2, _ = np.linalg.qr(rng.standard_normal((6, 2)))
sym1 = ConvexCone(np.hstack([u1, -u1]))
sym2 = ConvexCone(np.hstack([u2, -u2]))
by_svd = canonical_angles(Subspace(u1), Subspace(u2))
by_search = cone_angles(sym1, sym2, m=2).cosines
print("\nsign-symmetric cones vs their subspaces:")
print(f"  canonical cosines: {np.round(by_svd, 6)}")
print(f"  cone cosines:      {np.round(by_search, 6)}")

# 4. Orientation is where the notions part ways. Two nearly opposite
#    rays span nearly the same line, so the subspace angle is almost
#    zero; their positive sides point apart, and the cone search finds
#    no correlated pair at all.
theta = np.deg2rad(170.0)
fwd = np.array([[1.0], [0.0]])
back = np.array([[np.cos(theta)], [np.sin(theta)]])
line_cos = canonical_angles(Subspace(fwd), Subspace(back))[0]
cone_cos = cone_angles(
    ConvexCone.from_generators(fwd), ConvexCone.from_generators(back)
).cosines[0]
print("\nrays 170 degrees apart:")
print(f"  cosine between the lines they span: {line_cos:.4f}")
print(f"  cosine between the cones:           {cone_cos:.4f}")

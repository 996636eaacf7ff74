"""Discriminant embedding learned from between-cone gap vectors.

The classes' cones are aligned level by level: each level finds one
common direction across all cones by the alternating search, the
per-cone witnesses are differenced into gap vectors, and the cones are
deflated onto the complement of the converged anchors before the next
level. Between/within scatter matrices built from the gaps and the cone
bases feed a generalized symmetric eigenproblem whose leading
eigenvectors span the embedding.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .cone import (AlsOptions, ConvexCone, _Degenerate, _search_directions,
                   project_cone_to_subspace)

__all__ = [
    "AlignedDirections",
    "DiscriminantSpace",
    "GapSet",
    "align_cones",
    "discriminant_space",
    "gap_vectors",
    "project_cone_to_discriminant",
    "scatters",
]


@dataclass(frozen=True, eq=False)
class AlignedDirections:
    """Witness directions of the multi-cone alignment.

    ``vectors[j, c]`` is the unit witness of cone c at level j, in the
    original ambient space (levels beyond the first live in the
    orthogonal complement of the earlier anchors). ``anchors[j]`` is the
    converged mean vector that seeded level j's deflation. ``truncated``
    reports that fewer levels than requested could be completed.
    """

    vectors: np.ndarray
    anchors: np.ndarray
    converged: np.ndarray
    requested: int

    @property
    def n_levels(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_cones(self) -> int:
        return self.vectors.shape[1]

    @property
    def truncated(self) -> bool:
        return self.n_levels < self.requested


@dataclass(frozen=True, eq=False)
class GapSet:
    """Difference vectors between witness pairs, one per level and class pair."""

    gaps: np.ndarray
    pairs: list[tuple[int, int]]

    @property
    def count(self) -> int:
        return self.gaps.shape[0] * self.gaps.shape[1]


@dataclass(frozen=True, eq=False)
class DiscriminantSpace:
    """Embedding basis from the generalized eigenproblem.

    ``basis`` columns are the unit-norm eigenvectors of the ``n_dim``
    largest eigenvalues; they are not mutually orthogonal in general.
    """

    basis: np.ndarray
    eigenvalues: np.ndarray
    regularization_eps: float


def align_cones(cones, n_gaps: int, opts: AlsOptions = AlsOptions()) -> AlignedDirections:
    """Find ``n_gaps`` levels of common directions across class cones.

    Level j runs the alternating search jointly over all cones (deflated
    onto the complement of the anchors of levels < j) and records one
    witness per cone plus the converged anchor. If deflation empties any
    cone, or a search start exhausts its redraw budget, the completed
    levels are returned with the truncation flag set.

    Parameters
    ----------
    cones : sequence of ConvexCone
        At least two cones in a common ambient space.
    n_gaps : int
        Requested levels, ``1 <= n_gaps <= min(n_basis)``.
    opts : AlsOptions
    """
    cones = list(cones)
    if len(cones) < 2:
        raise ValueError(f"need at least 2 cones, got {len(cones)}")
    dim = cones[0].dim_ambient
    for c in cones:
        if c.dim_ambient != dim:
            raise ValueError("cones live in different ambient dimensions")
    r_min = min(c.n_basis for c in cones)
    if not 1 <= n_gaps <= r_min:
        raise ValueError(f"n_gaps must be in [1, {r_min}], got {n_gaps}")

    levels: list[np.ndarray] = []
    anchors: list[np.ndarray] = []
    flags: list[bool] = []
    # Generators parallel to an anchor up to search noise would survive
    # a tighter drop threshold as renormalized noise directions.
    drop_tol = max(1e-10, np.sqrt(opts.tol))
    for j in range(n_gaps):
        if anchors:
            span = linalg.orthonormalize(np.column_stack(anchors))
            deflated = [
                project_cone_to_subspace(
                    c, span, mode="complement", drop_tol=drop_tol
                )
                for c in cones
            ]
        else:
            deflated = cones
        if any(c.is_empty for c in deflated):
            break
        try:
            ps, anchor, conv = _search_directions(deflated, j, opts,
                                                  refine=j < n_gaps - 1)
        except _Degenerate:
            break
        levels.append(np.stack(ps))
        anchors.append(anchor / np.linalg.norm(anchor))
        flags.append(conv)
    n = len(levels)
    if n == 0:
        vectors = np.zeros((0, len(cones), dim))
        anchor_arr = np.zeros((0, dim))
    else:
        vectors = np.stack(levels)
        anchor_arr = np.stack(anchors)
    return AlignedDirections(vectors, anchor_arr, np.array(flags, dtype=bool), n_gaps)


def gap_vectors(aligned: AlignedDirections) -> GapSet:
    """Pairwise witness differences ``p_j^c1 - p_j^c2`` for c1 < c2."""
    n_levels, n_cones, dim = aligned.vectors.shape
    pairs = [(a, b) for a in range(n_cones) for b in range(a + 1, n_cones)]
    gaps = np.zeros((n_levels, len(pairs), dim))
    for j in range(n_levels):
        for k, (a, b) in enumerate(pairs):
            gaps[j, k] = aligned.vectors[j, a] - aligned.vectors[j, b]
    return GapSet(gaps, pairs)


def scatters(cones, gapset: GapSet) -> tuple[np.ndarray, np.ndarray]:
    """Between- and within-class scatter matrices.

    The between matrix sums the outer products of all gap vectors; the
    within matrix sums, per cone, the spread of its basis columns around
    their mean. Both are symmetric positive semidefinite d x d arrays.
    """
    cones = list(cones)
    if not cones:
        raise ValueError("need at least one cone")
    dim = cones[0].dim_ambient
    flat = gapset.gaps.reshape(-1, gapset.gaps.shape[-1]) if gapset.gaps.size else np.zeros((0, dim))
    if flat.size and flat.shape[1] != dim:
        raise ValueError("gap vectors and cones live in different ambient dimensions")
    s_b = flat.T @ flat if flat.size else np.zeros((dim, dim))
    s_w = np.zeros((dim, dim))
    for c in cones:
        if c.dim_ambient != dim:
            raise ValueError("cones live in different ambient dimensions")
        if c.is_empty:
            continue
        centered = c.basis - c.basis.mean(axis=1, keepdims=True)
        s_w += centered @ centered.T
    return 0.5 * (s_b + s_b.T), 0.5 * (s_w + s_w.T)


def discriminant_space(s_b, s_w, n_dim: int, eps_rel: float = 1e-6) -> DiscriminantSpace:
    """Leading eigenvectors of ``S_b @ phi = gamma * (S_w + eps*I) @ phi``.

    The ridge ``eps = eps_rel * trace(S_w) / d`` (or ``eps_rel`` when
    the trace vanishes) makes the metric positive definite. The
    ``n_dim`` eigenvectors of the largest eigenvalues are returned with
    unit Euclidean norm.
    """
    sb = linalg.as_matrix(s_b, "s_b")
    sw = linalg.as_matrix(s_w, "s_w")
    d = sb.shape[0]
    if sb.shape != (d, d) or sw.shape != (d, d):
        raise ValueError("scatter matrices must be square with equal shape")
    if not 1 <= n_dim <= d:
        raise ValueError(f"n_dim must be in [1, {d}], got {n_dim}")
    if eps_rel <= 0:
        raise ValueError("eps_rel must be positive")
    tr = float(np.trace(sw))
    eps = eps_rel * tr / d if tr > 0 else eps_rel
    pairs = linalg.sym_generalized_eig(sb, sw + eps * np.eye(d))
    top = pairs[:n_dim]
    basis = np.column_stack([p.vector for p in top])
    values = np.array([p.value for p in top])
    return DiscriminantSpace(basis, values, eps)


def project_cone_to_discriminant(cone: ConvexCone, space: DiscriminantSpace) -> ConvexCone:
    """Cone generators in discriminant coordinates, renormalized.

    Coordinates are ``basis.T @ b`` (the embedding columns need not be
    orthonormal); near-zero images are dropped and the survivors
    renormalized. An annihilated cone comes back as the empty marker.
    """
    if cone.dim_ambient != space.basis.shape[0]:
        raise ValueError(
            f"cone dimension {cone.dim_ambient} does not match embedding rows {space.basis.shape[0]}"
        )
    if cone.is_empty:
        return ConvexCone.empty(space.basis.shape[1])
    cols = space.basis.T @ cone.basis
    projected = ConvexCone.from_generators(cols, drop_tol=1e-10)
    if projected.n_basis < cone.n_basis:
        warnings.warn(
            f"discriminant projection dropped {cone.n_basis - projected.n_basis} generator(s)",
            stacklevel=2,
        )
    return projected

"""Linear subspace models, canonical angles, and the difference subspace.

Subspaces are spanned by orthonormal basis columns taken from the left
singular vectors of the raw (uncentered) feature matrix. The
generalized difference subspace collects the trailing eigenvectors of
the sum of the class projection matrices.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import NumericError

__all__ = [
    "Gds",
    "Subspace",
    "canonical_angles",
    "gds",
    "project_subspace",
    "subspace_from_features",
    "subspace_similarity",
]


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace with an orthonormal d x k basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = linalg.as_matrix(self.basis, "basis")
        if np.max(np.abs(b.T @ b - np.eye(b.shape[1]))) > 1e-10:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def dim_ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class Gds:
    """Generalized difference subspace of a set of class subspaces.

    ``basis`` holds the g eigenvectors of the summed projector with the
    smallest eigenvalues; ``eigenvalues`` is the full spectrum of the
    summed projector in ascending order, matching the basis columns on
    its leading end.
    """

    basis: np.ndarray
    eigenvalues: np.ndarray


def subspace_from_features(features, k: int, rank_tol: float = 1e-10) -> Subspace:
    """k-dimensional subspace of the leading left singular vectors.

    No mean centering is applied. Requesting more dimensions than the
    numerical rank of ``features`` is an error that reports the rank.
    """
    f = linalg.as_matrix(features, "features")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    u, s, _ = linalg.svd(f)
    if s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > rank_tol * s[0]))
    if k > rank:
        raise ValueError(f"requested dimension {k} exceeds numerical rank {rank}")
    return Subspace(u[:, :k])


def canonical_angles(s1: Subspace, s2: Subspace) -> np.ndarray:
    """Cosines of the canonical angles between two subspaces.

    The cosines are the singular values of ``basis1.T @ basis2``,
    clamped to [0, 1] and sorted in descending order; their count is
    ``min(dim)``.
    """
    if s1.dim_ambient != s2.dim_ambient:
        raise ValueError("subspaces live in different ambient dimensions")
    sv = np.linalg.svd(s1.basis.T @ s2.basis, compute_uv=False)
    return np.clip(sv, 0.0, 1.0)


def subspace_similarity(s1: Subspace, s2: Subspace, m: int | None = None) -> float:
    """Mean squared canonical cosine over the first ``m`` angles."""
    c = canonical_angles(s1, s2)
    if m is None:
        m = c.size
    if not 1 <= m <= c.size:
        raise ValueError(f"m must be in [1, {c.size}], got {m}")
    c = c[:m]
    return float(np.mean(c * c))


def gds(subspaces, g: int) -> Gds:
    """Generalized difference subspace of two or more class subspaces.

    Forms ``G = sum_c basis_c @ basis_c.T`` and keeps the eigenvectors
    of the g smallest eigenvalues, the directions least shared by the
    classes. A near-tie between the g-th and (g+1)-th eigenvalue keeps
    the stable (ascending) order and emits a warning.
    """
    subs = list(subspaces)
    if len(subs) < 2:
        raise ValueError(f"need at least 2 subspaces, got {len(subs)}")
    d = subs[0].dim_ambient
    for s in subs:
        if s.dim_ambient != d:
            raise ValueError("subspaces live in different ambient dimensions")
    if not 1 <= g <= d:
        raise ValueError(f"g must be in [1, {d}], got {g}")
    total = np.zeros((d, d))
    for s in subs:
        total += s.basis @ s.basis.T
    vals, vecs = np.linalg.eigh(total)
    if g < d and abs(vals[g - 1] - vals[g]) <= 1e-10 * max(1.0, abs(vals[-1])):
        warnings.warn(
            f"eigenvalue tie at the g={g} boundary; kept the stable order",
            stacklevel=2,
        )
    return Gds(vecs[:, :g], vals)


def project_subspace(s: Subspace, q) -> Subspace:
    """Project a subspace through orthonormal columns ``q`` and re-orthonormalize.

    The projected basis ``q.T @ basis`` is re-orthonormalized, dropping
    rank-deficient directions; a projection of rank zero raises
    NumericError.
    """
    qm = linalg.as_matrix(q, "q")
    if qm.shape[0] != s.dim_ambient:
        raise ValueError(f"q has {qm.shape[0]} rows, expected {s.dim_ambient}")
    if np.max(np.abs(qm.T @ qm - np.eye(qm.shape[1]))) > 1e-10:
        raise ValueError("q does not have orthonormal columns")
    cols = qm.T @ s.basis
    basis = linalg.orthonormalize(cols)
    if basis.shape[1] == 0:
        raise NumericError("projected subspace has rank 0")
    return Subspace(basis)

"""Dense linear algebra helpers: orthonormalization, SVD, generalized eig.

Matrices are plain float64 numpy arrays with columns as vectors. All
routines are deterministic and delegate the heavy lifting to LAPACK via
numpy/scipy.
"""

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import NumericError

__all__ = [
    "EigPair",
    "as_matrix",
    "as_vector",
    "orthonormalize",
    "svd",
    "sym_generalized_eig",
]


class EigPair(NamedTuple):
    """One eigenvalue with its unit-norm eigenvector."""

    value: float
    vector: np.ndarray


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a 2-D contiguous float64 array.

    Raises ValueError if ``a`` is not 2-D with at least one row and one
    column, or contains non-finite entries. Row-major layout makes the
    arithmetic downstream reproducible bit for bit no matter how the
    caller's copy was laid out.
    """
    arr = np.ascontiguousarray(a, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Validate and return ``x`` as a 1-D float64 array."""
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size < 1:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def orthonormalize(m, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis for the column span of ``m``.

    Modified Gram-Schmidt with one re-orthogonalization pass. Columns
    whose residual norm after projection onto the previously accepted
    columns is at most ``rank_tol`` times the largest column norm of
    ``m`` are dropped, so the result has exactly the numerical rank many
    columns. An all-zero input yields a ``(d, 0)`` array.

    Parameters
    ----------
    m : array_like, shape (d, n)
        Input columns.
    rank_tol : float
        Relative rank tolerance.

    Returns
    -------
    ndarray, shape (d, k)
        Columns are orthonormal and span the numerical column space.
    """
    a = as_matrix(m, "m")
    d = a.shape[0]
    scale = float(np.max(np.linalg.norm(a, axis=0)))
    if scale == 0.0:
        return np.zeros((d, 0))
    cols: list[np.ndarray] = []
    for j in range(a.shape[1]):
        v = a[:, j].copy()
        # two projection passes keep orthogonality near machine precision
        for _ in range(2):
            for q in cols:
                v -= (q @ v) * q
        nv = np.linalg.norm(v)
        if nv > rank_tol * scale:
            cols.append(v / nv)
    if not cols:
        return np.zeros((d, 0))
    return np.column_stack(cols)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin singular value decomposition ``m = U @ diag(s) @ V.T``.

    Returns
    -------
    (U, s, V)
        ``U`` is d x k, ``s`` the singular values in descending order,
        ``V`` is n x k, with k = min(d, n). Both factors have
        orthonormal columns.
    """
    a = as_matrix(m, "m")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u, s, vh.T


def sym_generalized_eig(a, b) -> list[EigPair]:
    """Solve ``A @ phi = gamma * B @ phi`` for symmetric A and s.p.d. B.

    Reduces to a standard symmetric problem through the Cholesky factor
    of ``B``: with ``B = L @ L.T`` the eigenvalues of
    ``inv(L) @ A @ inv(L).T`` are the generalized eigenvalues, and the
    eigenvectors map back through ``L.T``.

    Parameters
    ----------
    a, b : array_like, shape (d, d)
        ``a`` symmetric, ``b`` symmetric positive definite.

    Returns
    -------
    list of EigPair
        All d pairs sorted by descending eigenvalue; eigenvectors are
        normalized to unit Euclidean length.

    Raises
    ------
    NumericError
        If ``b`` is not positive definite; the message names the pivot
        (0-based) at which the Cholesky factorization failed.
    """
    am = as_matrix(a, "a")
    bm = as_matrix(b, "b")
    d = am.shape[0]
    if am.shape != (d, d) or bm.shape != (d, d):
        raise ValueError(f"a and b must be square with equal shape, got {am.shape} and {bm.shape}")
    sym_tol = 1e-8
    if np.max(np.abs(am - am.T)) > sym_tol * max(1.0, np.max(np.abs(am))):
        raise ValueError("a is not symmetric")
    if np.max(np.abs(bm - bm.T)) > sym_tol * max(1.0, np.max(np.abs(bm))):
        raise ValueError("b is not symmetric")
    am = 0.5 * (am + am.T)
    bm = 0.5 * (bm + bm.T)

    low, info = scipy.linalg.lapack.dpotrf(bm, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise NumericError(
            f"b is not positive definite: Cholesky failed at pivot {info - 1}"
        )
    if info < 0:
        raise NumericError(f"Cholesky factorization failed (lapack info={info})")

    # C = inv(L) @ A @ inv(L).T, kept symmetric against rounding
    c = scipy.linalg.solve_triangular(low, am, lower=True)
    c = scipy.linalg.solve_triangular(low, c.T, lower=True).T
    c = 0.5 * (c + c.T)
    vals, vecs = np.linalg.eigh(c)
    # back-transform: phi = inv(L).T @ u
    phis = scipy.linalg.solve_triangular(low, vecs, trans="T", lower=True)
    pairs = []
    for i in range(d - 1, -1, -1):
        v = phis[:, i]
        v = v / np.linalg.norm(v)
        pairs.append(EigPair(float(vals[i]), v))
    return pairs

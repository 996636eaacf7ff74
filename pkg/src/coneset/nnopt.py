"""Non-negative least squares and non-negative matrix factorization.

``nnls_solve`` is a Lawson-Hanson style active-set solver; the batched
variant used inside ``nmf`` works on the normal equations with a shared
Gram matrix, which keeps alternating updates cheap for the small ranks
this package targets.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DataError
from .linalg import as_matrix, as_vector

__all__ = ["NnlsSolution", "NmfResult", "nnls_solve", "nmf"]

_DUAL_TOL = 1e-10  # relative KKT tolerance


@dataclass(frozen=True)
class NnlsSolution:
    """Result of one non-negative least squares solve.

    weights satisfy w >= 0 and the KKT conditions at the relative
    tolerance of the solver; residual_norm is ||x - B @ w||_2.
    """

    weights: np.ndarray
    residual_norm: float


@dataclass(frozen=True)
class NmfResult:
    """Factors of F ~= basis @ coeffs with the per-iteration objective."""

    basis: np.ndarray
    coeffs: np.ndarray
    objective_history: list[float] = field(default_factory=list)


def _active_set(solve_passive, gram, h, thresh):
    """Lawson-Hanson iteration shared by the column and Gram variants.

    ``solve_passive(idx)`` returns the unconstrained least squares
    solution restricted to the passive columns ``idx``. The gradient is
    tracked through ``gram``; ``thresh`` is the absolute dual tolerance.
    Deterministic: candidates enter by largest dual value, ties by
    lowest index.
    """
    r = h.size
    w = np.zeros(r)
    passive = np.zeros(r, dtype=bool)
    excluded = np.zeros(r, dtype=bool)
    for _ in range(10 * r + 30):
        grad = h - gram @ w
        cand = (~passive) & (~excluded) & (grad > thresh)
        if not np.any(cand):
            break
        j = int(np.argmax(np.where(cand, grad, -np.inf)))
        passive[j] = True
        for _ in range(10 * r + 30):
            idx = np.flatnonzero(passive)
            z = solve_passive(idx)
            if not np.all(np.isfinite(z)):
                # the passive block is numerically singular: back out the
                # newest column and bar it, keeping the last feasible w
                passive[j] = False
                excluded[j] = True
                break
            if np.all(z > 0):
                w[:] = 0.0
                w[idx] = z
                break
            wp = w[idx]
            neg = z <= 0
            denom = wp - z
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg & (denom > 0), wp / denom, np.inf)
            alpha = float(np.min(ratios))
            if not np.isfinite(alpha):
                passive[j] = False
                excluded[j] = True
                break
            wnew = wp + alpha * (z - wp)
            wnew[wnew < 0] = 0.0
            drop_mask = (wnew <= 0) | (neg & (ratios <= alpha))
            w[idx] = wnew
            drop = idx[drop_mask]
            passive[drop] = False
            w[drop] = 0.0
            if alpha == 0.0 and j in drop:
                # the freshly added column came straight back out: a
                # numerical stall, so bar it from re-entering
                excluded[j] = True
            if not np.any(passive):
                break
    return w


def nnls_solve(basis, x, tol: float = _DUAL_TOL) -> NnlsSolution:
    """Minimize ``||x - basis @ w||_2`` subject to ``w >= 0``.

    Lawson-Hanson active-set iteration: columns enter the passive set by
    largest dual value, the passive subproblem is solved by least
    squares on the actual columns, and infeasible steps are cut back to
    the boundary. Finite and deterministic for fixed input. Zero columns
    of ``basis`` never activate and keep weight 0.

    Parameters
    ----------
    basis : array_like, shape (d, r)
        Dictionary columns; must not be all zero.
    x : array_like, shape (d,)
        Target vector.
    tol : float
        Relative dual feasibility tolerance, scaled by
        ``max(abs(basis.T @ x))``.

    Returns
    -------
    NnlsSolution
    """
    b = as_matrix(basis, "basis")
    v = as_vector(x, "x")
    d, r = b.shape
    if v.size != d:
        raise ValueError(f"x has length {v.size}, expected {d}")
    if not np.any(b):
        raise ValueError("basis is all zeros")

    h = b.T @ v
    href = float(np.max(np.abs(h)))
    if href == 0.0:
        return NnlsSolution(np.zeros(r), float(np.linalg.norm(v)))

    def solve_passive(idx):
        z, *_ = np.linalg.lstsq(b[:, idx], v, rcond=None)
        return z

    w = _active_set(solve_passive, b.T @ b, h, tol * href)
    residual = float(np.linalg.norm(v - b @ w))
    return NnlsSolution(w, residual)


def _nnls_gram(gram, h, thresh, cache=None):
    """Active-set NNLS on the normal equations, absolute tolerance.

    ``cache`` maps a passive index set to the inverse of its Gram block;
    passing one shared dict amortizes the factorizations over repeated
    solves against the same ``gram`` (the cone projection and NMF inner
    loops revisit a handful of supports thousands of times).
    """
    if cache is None:
        cache = {}

    def solve_passive(idx):
        key = idx.tobytes()
        inv = cache.get(key)
        if inv is None:
            sub = gram[np.ix_(idx, idx)]
            try:
                inv = np.linalg.inv(sub)
            except np.linalg.LinAlgError:
                inv = np.linalg.pinv(sub)
            if not np.all(np.isfinite(inv)):
                inv = np.linalg.pinv(sub)
            cache[key] = inv
        return inv @ h[idx]

    return _active_set(solve_passive, gram, h, thresh)


def _nnls_multi(b, targets, tol: float = _DUAL_TOL, warm=None) -> np.ndarray:
    """Column-wise NNLS against a fixed dictionary.

    Solves ``min ||targets[:, j] - b @ w|| s.t. w >= 0`` for every
    column. Columns whose unconstrained solution is already feasible are
    answered in one shared Cholesky solve; the rest fall back to the
    active-set iteration. The result for each column is independent of
    the other columns.

    ``warm`` is a mutable list of per-column support guesses (index
    arrays or None), updated in place. A guess that passes the full KKT
    check answers its column with one cached block solve, which pays off
    across the alternating factorization sweeps.
    """
    r = b.shape[1]
    n = targets.shape[1]
    gram = b.T @ b
    hs = b.T @ targets
    out = np.zeros((r, n))
    remaining = np.arange(n)
    try:
        cho = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
        z = scipy.linalg.cho_solve(cho, hs, check_finite=False)
        if np.all(np.isfinite(z)):
            ok = np.all(z >= 0, axis=0)
            out[:, ok] = z[:, ok]
            remaining = np.flatnonzero(~ok)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        pass
    cache: dict = {}
    for j in remaining:
        h = hs[:, j]
        href = float(np.abs(h).max())
        if href == 0.0:
            continue
        thresh = tol * href
        if warm is not None:
            idx = warm[j]
            if idx is not None and idx.size:
                key = idx.tobytes()
                inv = cache.get(key)
                if inv is None:
                    sub = gram[np.ix_(idx, idx)]
                    try:
                        inv = np.linalg.inv(sub)
                    except np.linalg.LinAlgError:
                        inv = np.linalg.pinv(sub)
                    if not np.all(np.isfinite(inv)):
                        inv = np.linalg.pinv(sub)
                    cache[key] = inv
                zj = inv @ h[idx]
                if (zj > 0.0).all() and np.isfinite(zj).all():
                    grad = h - gram[:, idx] @ zj
                    if (grad <= thresh).all():
                        out[idx, j] = zj
                        continue
        w = _nnls_gram(gram, h, thresh, cache=cache)
        out[:, j] = w
        if warm is not None:
            warm[j] = np.flatnonzero(w > 0.0)
    return out


def nmf(features, rank: int, *, max_iter: int = 200, rel_tol: float = 1e-5,
        seed: int = 0) -> NmfResult:
    """Non-negative matrix factorization by alternating NNLS.

    Both factors are updated to their exact constrained minimizers each
    outer iteration, so the recorded Frobenius objective is
    non-increasing. The basis is initialized from seeded uniform (0, 1]
    entries. A basis column that collapses to zero is re-initialized
    once from the same stream (with its coefficient row cleared, which
    leaves the objective untouched); if it collapses again it stays
    frozen at zero.

    Parameters
    ----------
    features : array_like, shape (d, n)
        Non-negative data, one observation per column.
    rank : int
        Number of basis columns, ``1 <= rank <= min(d, n)``.
    max_iter : int
        Maximum outer iterations.
    rel_tol : float
        Stop when the relative objective decrease falls below this.
    seed : int
        Seed for the initialization stream.

    Returns
    -------
    NmfResult
        ``basis`` (d x rank), ``coeffs`` (rank x n), and the objective
        value after each outer iteration.
    """
    f = as_matrix(features, "features")
    neg = np.argwhere(f < 0)
    if neg.size:
        i, j = neg[0]
        raise DataError(f"features contain a negative entry at row {i}, column {j}")
    d, n = f.shape
    if not 1 <= rank <= min(d, n):
        raise ValueError(f"rank must be in [1, {min(d, n)}], got {rank}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    rng = np.random.default_rng(seed)
    basis = 1.0 - rng.random((d, rank))
    coeffs = np.zeros((rank, n))
    reinitialized = np.zeros(rank, dtype=bool)
    history: list[float] = []
    f_prev = None
    warm_coeffs: list = [None] * n
    warm_basis: list = [None] * d
    for _ in range(max_iter):
        coeffs = _nnls_multi(basis, f, warm=warm_coeffs)
        basis = _nnls_multi(coeffs.T, f.T, warm=warm_basis).T
        norms = np.linalg.norm(basis, axis=0)
        for j in np.flatnonzero(norms == 0):
            if reinitialized[j]:
                continue  # frozen at zero from here on
            basis[:, j] = 1.0 - rng.random(d)
            coeffs[j, :] = 0.0
            reinitialized[j] = True
        obj = float(np.linalg.norm(f - basis @ coeffs))
        history.append(obj)
        if f_prev is not None and f_prev - obj < rel_tol * max(f_prev, 1e-300):
            break
        f_prev = obj
    return NmfResult(basis, coeffs, history)

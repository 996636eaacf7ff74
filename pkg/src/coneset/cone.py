"""Convex cone models: construction, projection, and angles between cones.

A cone is represented by its generating basis ``{b_i}`` with unit-norm
columns; membership means a non-negative combination of the columns.
Angles between two cones are found one at a time by an alternating
search, then the searched subspace is deflated so later angles come out
orthogonal to the earlier ones.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DataError, NumericError
from .nnopt import _nnls_gram, nmf, nnls_solve

__all__ = [
    "AlsOptions",
    "AngleSpectrum",
    "ConvexCone",
    "cone_angles",
    "cone_from_features",
    "cone_similarity",
    "project_cone_to_subspace",
    "project_to_cone",
    "vector_cone_angle",
]

_DROP_TOL = 1e-10  # norm below which a projected basis column is dropped


@dataclass(frozen=True, eq=False)
class ConvexCone:
    """Convex cone spanned by non-negative combinations of unit columns.

    ``basis`` is d x r with unit-norm columns. A cone with zero columns
    is the explicit "empty cone" marker produced when projection
    annihilates every generator; callers score it as "all angles 90
    degrees" rather than raising.
    """

    basis: np.ndarray

    def __post_init__(self):
        # Contiguous layout keeps matmul results bit-identical between a
        # freshly fitted basis and the same basis loaded from disk.
        b = np.ascontiguousarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError("basis must be 2-D")
        if not np.all(np.isfinite(b)):
            raise ValueError("basis contains non-finite entries")
        if b.shape[1]:
            norms = np.linalg.norm(b, axis=0)
            if np.max(np.abs(norms - 1.0)) > 1e-12:
                raise ValueError("basis columns must have unit norm")
        object.__setattr__(self, "basis", b)

    @property
    def dim_ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def n_basis(self) -> int:
        return self.basis.shape[1]

    @property
    def is_empty(self) -> bool:
        return self.basis.shape[1] == 0

    @classmethod
    def empty(cls, dim: int) -> "ConvexCone":
        return cls(np.zeros((dim, 0)))

    @classmethod
    def from_generators(cls, columns, drop_tol: float = _DROP_TOL) -> "ConvexCone":
        """Cone from raw generator columns: drop near-zero, normalize."""
        cols = np.asarray(columns, dtype=float)
        if cols.ndim != 2:
            raise ValueError("columns must be 2-D")
        norms = np.linalg.norm(cols, axis=0)
        keep = norms > drop_tol
        if not np.any(keep):
            return cls.empty(cols.shape[0])
        return cls(cols[:, keep] / norms[keep])


@dataclass(frozen=True)
class AlsOptions:
    """Controls for the alternating angle search.

    restarts independent seeded starts are run per angle and the pair
    with the largest correlation is kept.
    """

    tol: float = 1e-6
    max_iter: int = 1000
    restarts: int = 5
    seed: int = 0


@dataclass(frozen=True, eq=False)
class AngleSpectrum:
    """Cosines of the angles between two cones with their witnesses.

    Row i of ``p_vectors``/``q_vectors`` is the witness pair for angle
    i, living in the (deflated) first and second cone. Entries decided
    degenerate (an emptied cone or an exhausted redraw budget) carry
    cosine 0, zero witnesses, and converged=True.
    """

    cosines: np.ndarray
    p_vectors: np.ndarray
    q_vectors: np.ndarray
    converged: np.ndarray

    def __len__(self) -> int:
        return self.cosines.size


def cone_from_features(features, rank: int, *, max_iter: int = 200,
                       rel_tol: float = 1e-5, seed: int = 0) -> ConvexCone:
    """Learn a cone for one image set by NMF on its feature columns.

    The NMF basis columns are dropped if zero and normalized to unit
    length; the cone may therefore end up with fewer than ``rank``
    generators.

    Parameters
    ----------
    features : array_like, shape (d, n)
        Non-negative feature vectors, one per column.
    rank : int
        Requested number of generators, ``1 <= rank <= min(d, n)``.

    Raises
    ------
    DataError
        On a negative entry (naming its position) or all-zero input.
    """
    f = linalg.as_matrix(features, "features")
    neg = np.argwhere(f < 0)
    if neg.size:
        i, j = neg[0]
        raise DataError(f"features contain a negative entry at row {i}, column {j}")
    if not np.any(f):
        raise DataError("features are all zero")
    result = nmf(f, rank, max_iter=max_iter, rel_tol=rel_tol, seed=seed)
    cone = ConvexCone.from_generators(result.basis, drop_tol=1e-12)
    if cone.is_empty:
        raise NumericError("factorization produced no non-zero basis vectors")
    return cone


def project_to_cone(cone: ConvexCone, x) -> tuple[np.ndarray, np.ndarray]:
    """Nearest point of the cone and its generator weights.

    Returns ``(xhat, weights)`` with ``xhat = basis @ weights`` and
    ``weights >= 0``. Projection onto the empty cone is the origin.
    """
    v = linalg.as_vector(x, "x")
    if v.size != cone.dim_ambient:
        raise ValueError(f"x has length {v.size}, expected {cone.dim_ambient}")
    if cone.is_empty:
        return np.zeros(cone.dim_ambient), np.zeros(0)
    sol = nnls_solve(cone.basis, v)
    return cone.basis @ sol.weights, sol.weights


def vector_cone_angle(cone: ConvexCone, x) -> float:
    """Cosine of the smallest angle between vector ``x`` and the cone.

    cos = x.T @ xhat / (||x|| ||xhat||) with xhat the cone projection of
    x; returns 0.0 when the projection vanishes (x in the polar cone).
    A zero ``x`` is rejected.
    """
    v = linalg.as_vector(x, "x")
    nx = np.linalg.norm(v)
    if nx == 0.0:
        raise ValueError("x must be non-zero")
    xhat, _ = project_to_cone(cone, v)
    nh = np.linalg.norm(xhat)
    if nh <= 1e-12 * nx:
        return 0.0
    return float(np.clip((v @ xhat) / (nx * nh), 0.0, 1.0))


def project_cone_to_subspace(cone: ConvexCone, q, mode: str = "coords",
                             drop_tol: float = _DROP_TOL) -> ConvexCone:
    """Project cone generators through an orthonormal basis ``q``.

    mode="coords" maps generators to subspace coordinates ``q.T @ b``
    (ambient dimension k); mode="complement" projects them onto the
    orthogonal complement ``b - q @ (q.T @ b)`` (ambient dimension d).
    Projected columns with norm <= ``drop_tol`` (default 1e-10) are
    dropped and the rest renormalized; annihilating every generator
    yields the empty cone.
    """
    qm = linalg.as_matrix(q, "q")
    if qm.shape[0] != cone.dim_ambient:
        raise ValueError(f"q has {qm.shape[0]} rows, expected {cone.dim_ambient}")
    if np.max(np.abs(qm.T @ qm - np.eye(qm.shape[1]))) > 1e-10:
        raise ValueError("q does not have orthonormal columns")
    if mode == "coords":
        if cone.is_empty:
            return ConvexCone.empty(qm.shape[1])
        cols = qm.T @ cone.basis
    elif mode == "complement":
        if cone.is_empty:
            return ConvexCone.empty(cone.dim_ambient)
        cols = cone.basis - qm @ (qm.T @ cone.basis)
    else:
        raise ValueError(f"mode must be 'coords' or 'complement', got {mode!r}")
    return ConvexCone.from_generators(cols, drop_tol=drop_tol)


class _Projector:
    """Caches the Gram matrix and its support blocks for one cone basis.

    Consecutive projections inside the alternating search use nearby
    targets, so the optimal support seldom changes; the last support is
    tried first and accepted only when the full KKT conditions hold, so
    the fast path returns exactly an NNLS optimum.
    """

    def __init__(self, cone: ConvexCone):
        self.basis = cone.basis
        self.bt = np.ascontiguousarray(cone.basis.T)
        self.gram = self.bt @ cone.basis
        self.cache: dict = {}
        self.warm = None

    def project(self, y: np.ndarray) -> np.ndarray:
        h = self.bt @ y
        href = float(np.abs(h).max())
        if href == 0.0:
            return np.zeros(y.size)
        thresh = 1e-10 * href
        idx = self.warm
        if idx is not None and idx.size:
            inv = self.cache.get(idx.tobytes())
            if inv is not None:
                z = inv @ h[idx]
                if (z > 0.0).all() and np.isfinite(z).all():
                    grad = h - self.gram[:, idx] @ z
                    if (grad <= thresh).all():
                        w = np.zeros(h.size)
                        w[idx] = z
                        return self.basis @ w
        w = _nnls_gram(self.gram, h, thresh, cache=self.cache)
        self.warm = np.flatnonzero(w > 0.0)
        return self.basis @ w


class _Degenerate(Exception):
    """Raised when the redraw budget of the angle search is exhausted."""


def _als_run(projectors, rng, tol, max_iter, y0=None):
    """One alternating search from a random (or supplied) start.

    Iterates y -> mean of the normalized cone projections of y until the
    update moves less than ``tol``. A vanishing projection triggers a
    redraw of y; ten consecutive failures raise ``_Degenerate``.
    Returns ``(p_list, converged)`` with one unit vector per cone.
    """
    dim = projectors[0].basis.shape[0]
    scale = 1.0 / len(projectors)
    y = rng.standard_normal(dim) if y0 is None else y0
    failures = 0
    ps = None
    converged = False
    it = 0
    while it < max_iter:
        ny = np.sqrt(y @ y)
        ps = []
        for proj in projectors:
            z = proj.project(y)
            nz = np.sqrt(z @ z)
            if nz <= 1e-12 * ny:
                ps = None
                break
            ps.append(z / nz)
        if ps is None:
            failures += 1
            if failures >= 10:
                raise _Degenerate
            y = rng.standard_normal(dim)
            continue
        failures = 0
        yhat = ps[0] + ps[1] if len(ps) == 2 else sum(ps[1:], ps[0])
        yhat = yhat * scale
        step = yhat - y
        if np.sqrt(step @ step) < tol:
            converged = True
            y = yhat
            break
        y = yhat
        it += 1
    return ps, y, converged


def _pair_objective(ps):
    """Sum of pairwise correlations, the quantity the search maximizes."""
    total = 0.0
    for a in range(len(ps)):
        for b in range(a + 1, len(ps)):
            total += float(ps[a] @ ps[b])
    return total


def _flip_start(ps):
    """Start vector averaging the witnesses with disagreeing signs flipped.

    A run can settle with some witnesses anti-correlated even though the
    mirrored directions also belong to their cones (a sign-symmetric
    cone has both). Restarting from the sign-corrected average escapes
    that fixed point without new randomness; signs are chosen greedily
    against the already accepted witnesses.
    """
    signs = [1.0]
    for c in range(1, len(ps)):
        dot = sum(signs[b] * float(ps[c] @ ps[b]) for b in range(c))
        signs.append(1.0 if dot >= 0.0 else -1.0)
    return np.mean([s * p for s, p in zip(signs, ps)], axis=0)


def _has_negative_pair(ps):
    for a in range(len(ps)):
        for b in range(a + 1, len(ps)):
            if float(ps[a] @ ps[b]) < 0.0:
                return True
    return False


def _min_pairwise(ps):
    lo = 1.0
    for a in range(len(ps)):
        for b in range(a + 1, len(ps)):
            lo = min(lo, float(ps[a] @ ps[b]))
    return lo


def _search_directions(cones, level: int, opts: AlsOptions, refine: bool = True):
    """Best witness tuple for one angle level across ``opts.restarts`` starts.

    Returns ``(p_list, anchor, converged)`` for the start with the
    largest pairwise correlation. A start that exhausts its redraw
    budget contributes nothing; ``_Degenerate`` is raised only when
    every start does. A start settling with anti-correlated witnesses
    gets one extra run from the sign-corrected average, and both
    outcomes compete on correlation.

    With ``refine`` a winner whose witnesses all agree to within double
    resolution is polished at a near-machine tolerance: such witnesses
    describe one shared direction, and any residual disagreement
    between them would survive deflation as a spurious direction for
    the next level. Callers skip the polish when no deflation follows.
    """
    projectors = [_Projector(c) for c in cones]
    best = None
    for restart in range(opts.restarts):
        rng = np.random.default_rng([opts.seed, level, restart])
        try:
            runs = [_als_run(projectors, rng, opts.tol, opts.max_iter)]
        except _Degenerate:
            continue
        if _has_negative_pair(runs[0][0]):
            try:
                runs.append(_als_run(projectors, rng, opts.tol,
                                     opts.max_iter, y0=_flip_start(runs[0][0])))
            except _Degenerate:
                pass
        for ps, anchor, converged in runs:
            score = _pair_objective(ps)
            if best is None or score > best[0]:
                best = (score, ps, anchor, converged)
    if best is None:
        raise _Degenerate
    score, ps, anchor, converged = best
    if refine and len(ps) >= 2 and _min_pairwise(ps) >= 1.0 - 1e-8:
        rng = np.random.default_rng([opts.seed, level, opts.restarts])
        try:
            fine, y, conv = _als_run(projectors, rng, min(opts.tol, 1e-13),
                                     300, y0=anchor)
            ps, anchor, converged = fine, y, converged or conv
        except _Degenerate:
            pass
    return ps, anchor, converged


def cone_angles(cone1: ConvexCone, cone2: ConvexCone, m: int | None = None,
                opts: AlsOptions = AlsOptions()) -> AngleSpectrum:
    """First ``m`` angles between two cones by alternating search.

    Angle 1 maximizes the correlation p.T @ q over unit vectors p in
    cone1 and q in cone2 via the alternating iteration; each later angle
    repeats the search after both cones are deflated onto the orthogonal
    complement of the span of all earlier witness pairs. If a deflated
    cone becomes empty the remaining cosines are 0 and flagged
    converged. A non-convergent search keeps its final pair with
    converged=False.

    Parameters
    ----------
    cone1, cone2 : ConvexCone
        Cones in a common ambient space.
    m : int, optional
        Number of angles, ``1 <= m <= min(n_basis)``; defaults to the
        minimum basis count.
    opts : AlsOptions

    Returns
    -------
    AngleSpectrum
    """
    if cone1.dim_ambient != cone2.dim_ambient:
        raise ValueError("cones live in different ambient dimensions")
    r_min = min(cone1.n_basis, cone2.n_basis)
    if m is None:
        m = r_min
    if not 1 <= m <= r_min:
        raise ValueError(f"m must be in [1, {r_min}], got {m}")

    dim = cone1.dim_ambient
    cosines = np.zeros(m)
    p_vectors = np.zeros((m, dim))
    q_vectors = np.zeros((m, dim))
    converged = np.zeros(m, dtype=bool)
    # Generators inside the witness span up to the search noise must be
    # dropped during deflation, or their residue renormalizes into a
    # fake direction.
    drop_tol = max(1e-10, np.sqrt(opts.tol))
    witnesses: list[np.ndarray] = []
    for i in range(m):
        if witnesses:
            span = linalg.orthonormalize(
                np.column_stack(witnesses), rank_tol=1e-10
            )
            ca = project_cone_to_subspace(
                cone1, span, mode="complement", drop_tol=drop_tol
            )
            cb = project_cone_to_subspace(
                cone2, span, mode="complement", drop_tol=drop_tol
            )
        else:
            ca, cb = cone1, cone2
        if ca.is_empty or cb.is_empty:
            converged[i:] = True
            break
        try:
            ps, _, conv = _search_directions([ca, cb], i, opts,
                                             refine=i < m - 1)
        except _Degenerate:
            converged[i:] = True
            break
        p, q = ps
        cosines[i] = np.clip(p @ q, 0.0, 1.0)
        p_vectors[i] = p
        q_vectors[i] = q
        converged[i] = conv
        witnesses.extend([p, q])
    return AngleSpectrum(cosines, p_vectors, q_vectors, converged)


def cone_similarity(spectrum: AngleSpectrum, m: int | None = None) -> float:
    """Mean squared cosine over the first ``m`` angles of a spectrum."""
    n = len(spectrum)
    if m is None:
        m = n
    if not 1 <= m <= n:
        raise ValueError(f"m must be in [1, {n}], got {m}")
    c = spectrum.cosines[:m]
    return float(np.mean(c * c))


def angles_degrees(spectrum: AngleSpectrum) -> np.ndarray:
    """Angles of a spectrum in degrees."""
    return np.degrees(np.arccos(np.clip(spectrum.cosines, -1.0, 1.0)))

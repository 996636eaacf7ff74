"""Training, prediction, and persistence for the four set classifiers.

Methods: MSM and MCM compare a query subspace/cone against per-class
reference models in the ambient feature space; CMSM and CMCM first map
all models into a learned embedding (difference subspace or
discriminant space) and compare there.

Every random choice is seeded. Factorization seeds derive from a
content hash of the canonicalized feature matrix, so results do not
depend on image order, on positive rescaling of a set, or on the order
in which queries are evaluated.
"""

import hashlib
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg
from .cone import AlsOptions, ConvexCone, cone_angles, cone_from_features
from .data import FeatureSet
from .discriminant import (DiscriminantSpace, GapSet, align_cones,
                           discriminant_space, gap_vectors,
                           project_cone_to_discriminant, scatters)
from .errors import DataError
from .subspace import (Gds, Subspace, canonical_angles, gds, project_subspace,
                       subspace_from_features)

__all__ = [
    "METHODS",
    "ModelConfig",
    "Prediction",
    "TrainedModel",
    "load_model",
    "predict",
    "probe_cosines",
    "save_model",
    "train",
]

METHODS = ("MSM", "CMSM", "MCM", "CMCM")
_CONE_METHODS = ("MCM", "CMCM")
_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    """Configuration shared by training and prediction.

    ref_dim/in_dim are the reference and query model dimensions
    (subspace dimension or cone rank). n_angles caps how many angles
    enter the similarity (None means all available). disc_dim is the
    embedding dimension, required for CMSM/CMCM and ignored otherwise;
    n_gaps the number of alignment levels for CMCM (None picks the
    smallest class cone rank). Fields irrelevant to the chosen method
    are stored unchanged.
    """

    method: str
    ref_dim: int
    in_dim: int
    n_angles: int | None = None
    disc_dim: int | None = None
    n_gaps: int | None = None
    eps_rel: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if self.ref_dim < 1 or self.in_dim < 1:
            raise ValueError("ref_dim and in_dim must be >= 1")
        if self.n_angles is not None and self.n_angles < 1:
            raise ValueError("n_angles must be >= 1")
        if self.disc_dim is not None and self.disc_dim < 1:
            raise ValueError("disc_dim must be >= 1")
        if self.n_gaps is not None and self.n_gaps < 1:
            raise ValueError("n_gaps must be >= 1")
        if self.eps_rel <= 0:
            raise ValueError("eps_rel must be positive")


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """Per-class reference models plus the optional embedding.

    For CMSM/CMCM the class models live in embedding coordinates and
    ``embedding`` holds the map from ambient space.
    """

    config: ModelConfig
    class_labels: list[str]
    class_models: list
    embedding: object | None = None

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    @property
    def feature_dim(self) -> int:
        if isinstance(self.embedding, DiscriminantSpace):
            return self.embedding.basis.shape[0]
        if isinstance(self.embedding, Gds):
            return self.embedding.basis.shape[0]
        return self.class_models[0].dim_ambient


@dataclass(frozen=True)
class Prediction:
    """Predicted label with the per-class similarity scores."""

    label: str
    scores: np.ndarray


def _derive_seed(*parts) -> int:
    """Deterministic 63-bit seed from a mix of ints, strings, and bytes."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        if isinstance(part, bytes):
            h.update(part)
        else:
            h.update(str(part).encode())
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "big") >> 1


def _canonicalize(features: np.ndarray, set_name: str) -> tuple[np.ndarray, bytes]:
    """Sort columns lexicographically and scale to unit max magnitude.

    The canonical form is identical for any column permutation and (up
    to rounding) any positive rescaling of the input, which makes the
    content hash and everything seeded from it invariant too. Returns
    the canonical matrix and its content digest.
    """
    order = np.lexsort(features[::-1])
    canon = np.ascontiguousarray(features[:, order])
    scale = float(np.max(np.abs(canon)))
    if scale == 0.0:
        raise DataError(f"feature set {set_name!r} is all zeros")
    canon = canon / scale
    h = hashlib.blake2b(digest_size=16)
    h.update(np.asarray(canon.shape, dtype=np.int64).tobytes())
    h.update(canon.tobytes())
    return canon, h.digest()


def _check_non_negative(features: np.ndarray, set_name: str) -> None:
    neg = np.argwhere(features < 0)
    if neg.size:
        i, j = neg[0]
        raise DataError(
            f"set {set_name!r} has a negative feature at row {i}, column {j}; "
            "cone methods need non-negative features"
        )


def _fit_cone(features: np.ndarray, rank: int, config: ModelConfig,
              set_name: str) -> tuple[ConvexCone, bytes]:
    _check_non_negative(features, set_name)
    canon, digest = _canonicalize(features, set_name)
    seed = _derive_seed(config.seed, digest)
    return cone_from_features(canon, rank, seed=seed), digest


def _fit_subspace(features: np.ndarray, k: int, set_name: str) -> tuple[Subspace, bytes]:
    canon, digest = _canonicalize(features, set_name)
    return subspace_from_features(canon, k), digest


def train(config: ModelConfig, train_sets) -> TrainedModel:
    """Fit per-class models (and the embedding, for CMSM/CMCM).

    Parameters
    ----------
    config : ModelConfig
    train_sets : sequence of (FeatureSet, label)
        Each class's sets are pooled by column concatenation before a
        single reference model is fit.
    """
    pairs = list(train_sets)
    if not pairs:
        raise ValueError("no training sets")
    dim = pairs[0][0].feature_dim
    grouped: dict[str, list[FeatureSet]] = {}
    for fs, label in pairs:
        if fs.feature_dim != dim:
            raise DataError(
                f"set {fs.set_id!r} has dimension {fs.feature_dim}, expected {dim}"
            )
        grouped.setdefault(str(label), []).append(fs)
    labels = sorted(grouped)

    is_cone = config.method in _CONE_METHODS
    ambient = []
    for label in labels:
        members = grouped[label]
        if is_cone:
            for fs in members:
                _check_non_negative(fs.features, fs.set_id)
        pooled = np.concatenate([fs.features for fs in members], axis=1)
        if is_cone:
            model, _ = _fit_cone(pooled, config.ref_dim, config, label)
        else:
            model, _ = _fit_subspace(pooled, config.ref_dim, label)
        ambient.append(model)

    if config.method in ("MSM", "MCM"):
        return TrainedModel(config, labels, ambient, None)

    if config.disc_dim is None:
        raise ValueError(f"{config.method} requires disc_dim")

    if config.method == "CMSM":
        if len(ambient) == 1:
            # one class has no between-class structure; keep the full space
            total = ambient[0].basis @ ambient[0].basis.T
            vals = np.linalg.eigh(total)[0]
            embedding = Gds(np.eye(dim), vals)
        else:
            embedding = gds(ambient, config.disc_dim)
        models = [project_subspace(s, embedding.basis) for s in ambient]
        return TrainedModel(config, labels, models, embedding)

    # CMCM
    if len(ambient) == 1:
        gaps = GapSet(np.zeros((0, 0, dim)), [])
    else:
        n_gaps = config.n_gaps
        if n_gaps is None:
            n_gaps = min(c.n_basis for c in ambient)
        opts = AlsOptions(seed=_derive_seed(config.seed, "align"))
        aligned = align_cones(ambient, n_gaps, opts)
        if aligned.truncated:
            warnings.warn(
                f"alignment stopped after {aligned.n_levels} of {aligned.requested} levels",
                stacklevel=2,
            )
        gaps = gap_vectors(aligned)
    s_b, s_w = scatters(ambient, gaps)
    embedding = discriminant_space(s_b, s_w, config.disc_dim, config.eps_rel)
    models = [project_cone_to_discriminant(c, embedding) for c in ambient]
    for label, m in zip(labels, models):
        if m.is_empty:
            warnings.warn(f"class {label!r} cone vanished in the embedding", stacklevel=2)
    return TrainedModel(config, labels, models, embedding)


def probe_cosines(model: TrainedModel, query: FeatureSet) -> list[np.ndarray]:
    """Angle cosines between the query model and every class model.

    The query is modeled with ``config.in_dim``, mapped through the
    embedding when the model has one, and compared against each class;
    element i of the result is the full cosine spectrum against class i
    (an empty array when either side degenerated, which scores as
    similarity 0).
    """
    config = model.config
    if config.method in _CONE_METHODS:
        qcone, digest = _fit_cone(query.features, config.in_dim, config, query.set_id)
        if config.method == "CMCM":
            qcone = project_cone_to_discriminant(qcone, model.embedding)
            if qcone.is_empty:
                warnings.warn(
                    f"query set {query.set_id!r} vanished in the embedding; all similarities are 0",
                    stacklevel=2,
                )
                return [np.zeros(0) for _ in model.class_models]
        out = []
        for ci, cls in enumerate(model.class_models):
            if cls.is_empty:
                out.append(np.zeros(0))
                continue
            opts = AlsOptions(seed=_derive_seed(config.seed, ci, digest))
            spectrum = cone_angles(qcone, cls, opts=opts)
            out.append(spectrum.cosines)
        return out

    qsub, _ = _fit_subspace(query.features, config.in_dim, query.set_id)
    if config.method == "CMSM":
        qsub = project_subspace(qsub, model.embedding.basis)
    return [canonical_angles(qsub, cls) for cls in model.class_models]


def _similarity(cosines: np.ndarray, n_angles: int | None) -> float:
    if cosines.size == 0:
        return 0.0
    m = cosines.size if n_angles is None else min(n_angles, cosines.size)
    c = cosines[:m]
    return float(np.mean(c * c))


def predict(model: TrainedModel, query: FeatureSet,
            n_angles: int | None = None) -> Prediction:
    """Classify one query set by maximal similarity.

    ``n_angles`` overrides the configured angle count; ties pick the
    lowest class index. The query must match the training feature
    dimension.
    """
    if query.feature_dim != model.feature_dim:
        raise DataError(
            f"query set {query.set_id!r} has dimension {query.feature_dim}, "
            f"model expects {model.feature_dim}"
        )
    if n_angles is None:
        n_angles = model.config.n_angles
    cos_lists = probe_cosines(model, query)
    scores = np.array([_similarity(c, n_angles) for c in cos_lists])
    return Prediction(model.class_labels[int(np.argmax(scores))], scores)


def save_model(model: TrainedModel, path) -> Path:
    """Write a model directory: ``model.json`` plus one CSV per matrix.

    Matrices are serialized with 17 significant digits, so loading the
    directory reproduces them bit for bit.
    """
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    config = model.config
    doc = {
        "schema_version": _SCHEMA_VERSION,
        "config": {
            "method": config.method,
            "ref_dim": config.ref_dim,
            "in_dim": config.in_dim,
            "n_angles": config.n_angles,
            "disc_dim": config.disc_dim,
            "n_gaps": config.n_gaps,
            "eps_rel": config.eps_rel,
            "seed": config.seed,
        },
        "class_labels": list(model.class_labels),
        "class_models": [],
        "embedding": None,
    }
    for i, cm in enumerate(model.class_models):
        name = f"class_{i:03d}.csv"
        _save_matrix(out / name, cm.basis)
        doc["class_models"].append(
            {"file": name, "rows": cm.basis.shape[0], "cols": cm.basis.shape[1]}
        )
    emb = model.embedding
    if isinstance(emb, DiscriminantSpace):
        _save_matrix(out / "embedding.csv", emb.basis)
        _save_matrix(out / "embedding_eigenvalues.csv", emb.eigenvalues.reshape(1, -1))
        doc["embedding"] = {
            "kind": "discriminant",
            "file": "embedding.csv",
            "rows": emb.basis.shape[0],
            "cols": emb.basis.shape[1],
            "eigenvalues_file": "embedding_eigenvalues.csv",
            "regularization_eps": emb.regularization_eps,
        }
    elif isinstance(emb, Gds):
        _save_matrix(out / "embedding.csv", emb.basis)
        _save_matrix(out / "embedding_eigenvalues.csv", emb.eigenvalues.reshape(1, -1))
        doc["embedding"] = {
            "kind": "gds",
            "file": "embedding.csv",
            "rows": emb.basis.shape[0],
            "cols": emb.basis.shape[1],
            "eigenvalues_file": "embedding_eigenvalues.csv",
        }
    with open(out / "model.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def load_model(path) -> TrainedModel:
    """Load a model directory written by :func:`save_model`."""
    root = Path(path)
    mpath = root / "model.json"
    if not mpath.is_file():
        raise DataError(f"model description not found: {mpath}")
    try:
        with open(mpath, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(
            f"{mpath}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    version = doc.get("schema_version")
    if version != _SCHEMA_VERSION:
        raise DataError(
            f"{mpath}: unsupported schema version {version!r}, expected {_SCHEMA_VERSION}"
        )
    try:
        cfg = doc["config"]
        config = ModelConfig(
            method=cfg["method"],
            ref_dim=cfg["ref_dim"],
            in_dim=cfg["in_dim"],
            n_angles=cfg["n_angles"],
            disc_dim=cfg["disc_dim"],
            n_gaps=cfg["n_gaps"],
            eps_rel=cfg["eps_rel"],
            seed=cfg["seed"],
        )
        labels = [str(v) for v in doc["class_labels"]]
        model_docs = doc["class_models"]
        emb_doc = doc["embedding"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{mpath}: malformed model description: {exc}") from None
    if len(model_docs) != len(labels):
        raise DataError(f"{mpath}: {len(labels)} labels but {len(model_docs)} class models")

    is_cone = config.method in _CONE_METHODS
    models = []
    for md in model_docs:
        mat = _load_matrix(root / md["file"], md["rows"], md["cols"])
        models.append(ConvexCone(mat) if is_cone else Subspace(mat))

    embedding = None
    if emb_doc is not None:
        basis = _load_matrix(root / emb_doc["file"], emb_doc["rows"], emb_doc["cols"])
        vals = _load_matrix(root / emb_doc["eigenvalues_file"], 1, None).ravel()
        if emb_doc["kind"] == "discriminant":
            embedding = DiscriminantSpace(basis, vals, float(emb_doc["regularization_eps"]))
        elif emb_doc["kind"] == "gds":
            embedding = Gds(basis, vals)
        else:
            raise DataError(f"{mpath}: unknown embedding kind {emb_doc['kind']!r}")
    return TrainedModel(config, labels, models, embedding)


def _save_matrix(path: Path, mat: np.ndarray) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for row in np.atleast_2d(np.asarray(mat, dtype=float)):
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write("\n")


def _load_matrix(path: Path, rows: int, cols: int | None) -> np.ndarray:
    if not path.is_file():
        raise DataError(f"model matrix file not found: {path}")
    data = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data.append([float(v) for v in line.split(",")])
            except ValueError:
                raise DataError(f"{path}: line {lineno}: non-numeric value") from None
    if cols == 0 or rows == 0:
        if data:
            raise DataError(f"{path}: expected an empty matrix, found rows")
        return np.zeros((rows, cols if cols is not None else 0))
    arr = np.array(data, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != rows or (cols is not None and arr.shape[1] != cols):
        raise DataError(
            f"{path}: expected shape ({rows}, {cols}), got {tuple(arr.shape) if arr.size else (0, 0)}"
        )
    return arr

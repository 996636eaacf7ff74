"""Datasets of image sets: manifest I/O and a synthetic generator.

A dataset is a list of feature sets (one d x N matrix per image set)
with a class label and a train/test split marker each. On disk it is a
JSON manifest next to one CSV per set, each CSV holding one feature
vector per row at full decimal precision.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError

__all__ = [
    "Dataset",
    "DatasetEntry",
    "FeatureSet",
    "SynthSpec",
    "generate_synthetic",
    "load_dataset",
    "load_feature_csv",
    "save_dataset",
    "split_dataset",
]

_SPLITS = ("train", "test")


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """One image set: a d x N matrix of feature columns and an id."""

    features: np.ndarray
    set_id: str

    def __post_init__(self):
        f = np.asarray(self.features, dtype=float)
        if f.ndim != 2 or f.shape[0] < 1 or f.shape[1] < 1:
            raise ValueError(f"features of set {self.set_id!r} must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(f)):
            raise ValueError(f"features of set {self.set_id!r} contain non-finite entries")
        object.__setattr__(self, "features", f)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[0]

    @property
    def n_images(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class DatasetEntry:
    feature_set: FeatureSet
    label: str
    split: str


@dataclass(frozen=True)
class Dataset:
    """Feature sets with labels and splits, all of one feature dimension.

    Every label that appears anywhere must appear in the train split.
    """

    feature_dim: int
    sets: list[DatasetEntry] = field(default_factory=list)

    def __post_init__(self):
        train_labels = set()
        labels = set()
        for entry in self.sets:
            if entry.feature_set.feature_dim != self.feature_dim:
                raise DataError(
                    f"set {entry.feature_set.set_id!r} has dimension "
                    f"{entry.feature_set.feature_dim}, expected {self.feature_dim}"
                )
            if entry.split not in _SPLITS:
                raise DataError(f"set {entry.feature_set.set_id!r} has unknown split {entry.split!r}")
            labels.add(entry.label)
            if entry.split == "train":
                train_labels.add(entry.label)
        missing = sorted(labels - train_labels)
        if missing:
            raise DataError(f"labels missing from the train split: {', '.join(missing)}")

    def train_sets(self) -> list[tuple[FeatureSet, str]]:
        return [(e.feature_set, e.label) for e in self.sets if e.split == "train"]

    def test_sets(self) -> list[tuple[FeatureSet, str]]:
        return [(e.feature_set, e.label) for e in self.sets if e.split == "test"]


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the synthetic cone-structured generator."""

    n_classes: int = 3
    sets_per_class: int = 4
    images_per_set: int = 20
    feature_dim: int = 16
    cone_rank: int = 3
    noise_sigma: float = 0.05
    class_separation: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 1 or self.sets_per_class < 1 or self.images_per_set < 1:
            raise ValueError("counts must be >= 1")
        if self.feature_dim < 1:
            raise ValueError("feature_dim must be >= 1")
        if not 1 <= self.cone_rank <= self.feature_dim:
            raise ValueError(
                f"cone_rank must be in [1, {self.feature_dim}], got {self.cone_rank}"
            )
        if self.feature_dim < self.n_classes:
            raise ValueError("feature_dim must be >= n_classes")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not 0.0 <= self.class_separation <= 1.0:
            raise ValueError("class_separation must be in [0, 1]")


def generate_synthetic(spec: SynthSpec) -> Dataset:
    """Sample a dataset of non-negative image sets with cone structure.

    Each class owns ``cone_rank`` non-negative prototype directions. A
    prototype mixes a dense random profile (support shared by all
    classes) with a profile confined to the class's own coordinate block
    and carrying a strong per-prototype anchor coordinate; the blend
    weight is ``class_separation``, so separation 1 gives disjoint
    supports and 0 fully shared ones. Every image is a non-negative
    random combination of its class prototypes plus Gaussian noise
    truncated at zero. Fully deterministic for a fixed spec.

    All sets are marked train; use :func:`split_dataset` to carve out a
    test split.
    """
    rng = np.random.default_rng(spec.seed)
    d, c, r = spec.feature_dim, spec.n_classes, spec.cone_rank
    s = spec.class_separation
    bounds = np.linspace(0, d, c + 1).astype(int)

    prototypes = []
    for ci in range(c):
        block = slice(bounds[ci], bounds[ci + 1])
        width = bounds[ci + 1] - bounds[ci]
        protos = np.zeros((d, r))
        for pi in range(r):
            own = np.zeros(d)
            own[block] = 0.4 * rng.uniform(0.0, 1.0, size=width)
            own[bounds[ci] + pi % width] += 1.0
            shared = rng.uniform(0.0, 1.0, size=d)
            p = (1.0 - s) * shared + s * own
            protos[:, pi] = p / np.linalg.norm(p)
        prototypes.append(protos)

    entries = []
    for ci in range(c):
        label = f"class{ci}"
        for si in range(spec.sets_per_class):
            coeffs = rng.uniform(0.0, 1.0, size=(r, spec.images_per_set))
            images = prototypes[ci] @ coeffs
            noise = rng.normal(0.0, 1.0, size=images.shape)
            images = np.maximum(images + spec.noise_sigma * noise, 0.0)
            fs = FeatureSet(images, f"{label}-set{si:02d}")
            entries.append(DatasetEntry(fs, label, "train"))
    return Dataset(d, entries)


def split_dataset(dataset: Dataset, fraction: float, seed: int = 0) -> Dataset:
    """Reassign splits: a seeded per-class shuffle marks ``floor(n * fraction)``
    sets train and the rest test.

    Raises ValueError if any class would keep no training set.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    by_label: dict[str, list[int]] = {}
    for i, entry in enumerate(dataset.sets):
        by_label.setdefault(entry.label, []).append(i)
    split_of = ["test"] * len(dataset.sets)
    for label in sorted(by_label):
        idx = np.array(by_label[label])
        perm = rng.permutation(idx.size)
        n_train = math.floor(idx.size * fraction)
        if n_train < 1:
            raise ValueError(
                f"fraction {fraction} leaves class {label!r} with no training sets"
            )
        for k in perm[:n_train]:
            split_of[idx[k]] = "train"
    entries = [
        DatasetEntry(e.feature_set, e.label, split_of[i])
        for i, e in enumerate(dataset.sets)
    ]
    return Dataset(dataset.feature_dim, entries)


def load_feature_csv(path, feature_dim: int | None = None) -> np.ndarray:
    """Read one feature CSV (one vector per row) into a d x N matrix.

    Raises DataError for a missing file, a ragged or non-numeric row
    (reporting the 1-based line number), or a width different from
    ``feature_dim`` when given.
    """
    p = Path(path)
    if not p.is_file():
        raise DataError(f"feature file not found: {p}")
    rows = []
    width = None
    with open(p, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                row = [float(v) for v in parts]
            except ValueError:
                raise DataError(f"{p}: line {lineno}: non-numeric value") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DataError(
                    f"{p}: line {lineno}: expected {width} values, got {len(row)}"
                )
            if not all(math.isfinite(v) for v in row):
                raise DataError(f"{p}: line {lineno}: non-finite value")
            rows.append(row)
    if not rows:
        raise DataError(f"{p}: no feature rows")
    if feature_dim is not None and width != feature_dim:
        raise DataError(f"{p}: rows have {width} values, expected {feature_dim}")
    return np.array(rows, dtype=float).T


def load_dataset(manifest_path) -> Dataset:
    """Load a dataset from its JSON manifest.

    The manifest holds ``feature_dim`` and a list of set descriptors
    with ``id``, ``path`` (relative to the manifest), ``label``, and
    ``split``. Every referenced CSV is loaded and validated against
    ``feature_dim``.
    """
    mp = Path(manifest_path)
    if not mp.is_file():
        raise DataError(f"manifest not found: {mp}")
    try:
        with open(mp, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(
            f"{mp}: manifest parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict) or "feature_dim" not in doc or "sets" not in doc:
        raise DataError(f"{mp}: manifest must contain 'feature_dim' and 'sets'")
    feature_dim = doc["feature_dim"]
    if not isinstance(feature_dim, int) or feature_dim < 1:
        raise DataError(f"{mp}: feature_dim must be a positive integer")
    entries = []
    for i, item in enumerate(doc["sets"]):
        if not isinstance(item, dict):
            raise DataError(f"{mp}: sets[{i}] is not an object")
        for key in ("id", "path", "label", "split"):
            if key not in item:
                raise DataError(f"{mp}: sets[{i}] is missing {key!r}")
        if item["split"] not in _SPLITS:
            raise DataError(f"{mp}: sets[{i}] has unknown split {item['split']!r}")
        features = load_feature_csv(mp.parent / item["path"], feature_dim)
        entries.append(
            DatasetEntry(FeatureSet(features, str(item["id"])), str(item["label"]), item["split"])
        )
    return Dataset(feature_dim, entries)


def save_dataset(dataset: Dataset, out_dir) -> Path:
    """Write a dataset as ``manifest.json`` plus one CSV per set.

    Values are serialized with 17 significant digits, so a load after a
    save reproduces every matrix bit for bit. Returns the manifest path.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sets_doc = []
    for i, entry in enumerate(dataset.sets):
        rel = f"set_{i:04d}.csv"
        _write_matrix_csv(out / rel, entry.feature_set.features.T)
        sets_doc.append(
            {
                "id": entry.feature_set.set_id,
                "path": rel,
                "label": entry.label,
                "split": entry.split,
            }
        )
    doc = {"feature_dim": dataset.feature_dim, "sets": sets_doc}
    manifest = out / "manifest.json"
    with open(manifest, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _write_matrix_csv(path, rows: np.ndarray) -> None:
    """One matrix row per line, 17 significant digits."""
    with open(path, "w", encoding="ascii") as fh:
        for row in np.atleast_2d(rows):
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write("\n")

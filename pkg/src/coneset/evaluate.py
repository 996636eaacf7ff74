"""Evaluation: accuracy, verification metrics, and gap visualization.

The ROC is the pooled genuine/impostor threshold sweep over all
distinct scores; its trapezoidal area equals the pairwise-counting AUC
estimator. Gap vectors are rendered as 8-bit graymaps with an Otsu
highlight mask.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset
from .errors import DataError
from .pipeline import TrainedModel, probe_cosines

__all__ = [
    "EvalReport",
    "GapImage",
    "evaluate_model",
    "gap_image",
    "otsu_threshold",
    "roc_auc",
    "roc_curve",
    "roc_eer",
    "write_pgm",
]


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Classification and verification summary over a test split.

    ``confusion[i, j]`` counts sets of true class i predicted as class
    j, indexed by ``labels``. ``angle_sweep`` is a list of (m, accuracy)
    rows or None when no sweep was requested.
    """

    accuracy: float
    per_class_accuracy: dict[str, float]
    confusion: np.ndarray
    labels: list[str]
    roc_points: np.ndarray
    auc: float
    eer: float
    angle_sweep: list[tuple[int, float]] | None = None

    def to_json_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class_accuracy": {k: float(v) for k, v in self.per_class_accuracy.items()},
            "confusion": [[int(v) for v in row] for row in self.confusion],
            "labels": list(self.labels),
            "roc_points": [[float(f), float(t)] for f, t in self.roc_points],
            "auc": self.auc,
            "eer": self.eer,
            "angle_sweep": (
                None if self.angle_sweep is None
                else [[int(m), float(a)] for m, a in self.angle_sweep]
            ),
        }


def evaluate_model(model: TrainedModel, dataset: Dataset,
                   n_angles: int | None = None, sweep: bool = False) -> EvalReport:
    """Score every test set of ``dataset`` against ``model``.

    Classification uses ``n_angles`` (or the configured count) angles;
    genuine/impostor scores for the ROC are the similarities to the true
    and the other classes. With ``sweep=True`` the per-pair spectra are
    computed once and truncated to every m up to the available angle
    count (capped by ``n_angles``), reporting accuracy per m.
    """
    tests = dataset.test_sets()
    if not tests:
        raise DataError("dataset has no test sets")
    labels = model.class_labels
    index = {lab: i for i, lab in enumerate(labels)}
    for _, label in tests:
        if label not in index:
            raise DataError(f"test label {label!r} is not in the model")

    all_cosines = [probe_cosines(model, fs) for fs, _ in tests]

    base_m = n_angles if n_angles is not None else model.config.n_angles
    preds, genuine, impostor = [], [], []
    confusion = np.zeros((len(labels), len(labels)), dtype=int)
    for (fs, label), cos_lists in zip(tests, all_cosines):
        scores = np.array([_mean_sq(c, base_m) for c in cos_lists])
        pred = int(np.argmax(scores))
        true = index[label]
        preds.append(pred)
        confusion[true, pred] += 1
        genuine.append(scores[true])
        impostor.extend(scores[i] for i in range(len(labels)) if i != true)

    accuracy = float(np.trace(confusion) / confusion.sum())
    per_class = {}
    for i, lab in enumerate(labels):
        total = confusion[i].sum()
        if total:
            per_class[lab] = float(confusion[i, i] / total)

    points = roc_curve(genuine, impostor)
    report_sweep = None
    if sweep:
        available = min(
            (c.size for cos_lists in all_cosines for c in cos_lists), default=0
        )
        if base_m is not None:
            available = min(available, base_m)
        report_sweep = []
        for m in range(1, available + 1):
            hits = 0
            for (fs, label), cos_lists in zip(tests, all_cosines):
                scores = np.array([_mean_sq(c, m) for c in cos_lists])
                hits += int(np.argmax(scores)) == index[label]
            report_sweep.append((m, hits / len(tests)))

    return EvalReport(
        accuracy=accuracy,
        per_class_accuracy=per_class,
        confusion=confusion,
        labels=list(labels),
        roc_points=points,
        auc=roc_auc(points),
        eer=roc_eer(points),
        angle_sweep=report_sweep,
    )


def _mean_sq(cosines: np.ndarray, m: int | None) -> float:
    if cosines.size == 0:
        return 0.0
    k = cosines.size if m is None else min(m, cosines.size)
    c = cosines[:k]
    return float(np.mean(c * c))


def roc_curve(genuine, impostor) -> np.ndarray:
    """ROC points (fpr, tpr) from a pooled descending threshold sweep.

    One point per distinct score with the accept rule ``score >=
    threshold``, preceded by (0, 0); the final point is (1, 1). Points
    are non-decreasing in both coordinates.
    """
    g = np.asarray(genuine, dtype=float)
    im = np.asarray(impostor, dtype=float)
    if g.size == 0 or im.size == 0:
        raise ValueError("genuine and impostor score lists must be non-empty")
    thresholds = np.unique(np.concatenate([g, im]))[::-1]
    points = [(0.0, 0.0)]
    for t in thresholds:
        points.append((float(np.mean(im >= t)), float(np.mean(g >= t))))
    return np.array(points)


def roc_auc(points) -> float:
    """Trapezoidal area under an ROC polyline sorted by fpr."""
    pts = np.asarray(points, dtype=float)
    return float(np.trapezoid(pts[:, 1], pts[:, 0]))


def roc_eer(points) -> float:
    """Equal error rate: fpr where the ROC crosses fpr = 1 - tpr.

    Found by linear interpolation along the polyline; fpr - fnr is
    non-decreasing along the sweep so the first sign change is the
    crossing.
    """
    pts = np.asarray(points, dtype=float)
    diffs = pts[:, 0] - (1.0 - pts[:, 1])
    for k in range(len(pts)):
        if diffs[k] == 0.0:
            return float(pts[k, 0])
        if k + 1 < len(pts) and diffs[k] < 0.0 < diffs[k + 1]:
            f0, t0 = pts[k]
            f1, t1 = pts[k + 1]
            df, dt = f1 - f0, t1 - t0
            if df + dt == 0.0:
                return float(f0)
            u = (1.0 - t0 - f0) / (df + dt)
            return float(f0 + u * df)
    return float(pts[-1, 0])


def otsu_threshold(values) -> int:
    """Otsu's threshold on 8-bit values.

    Maximizes the between-class variance of the 256-bin histogram split
    into {v <= t} and {v > t}; ties pick the smallest t.
    """
    v = np.asarray(values).ravel()
    if v.size == 0:
        raise ValueError("values must be non-empty")
    iv = v.astype(np.int64)
    if np.any(iv != v) or iv.min() < 0 or iv.max() > 255:
        raise ValueError("values must be integers in [0, 255]")
    hist = np.bincount(iv, minlength=256).astype(float)
    total = float(v.size)
    csum = np.cumsum(hist)
    cmoment = np.cumsum(hist * np.arange(256))
    best_t, best_var = 0, -1.0
    for t in range(256):
        n0 = csum[t]
        n1 = total - n0
        if n0 == 0.0 or n1 == 0.0:
            var = 0.0
        else:
            mu0 = cmoment[t] / n0
            mu1 = (cmoment[255] - cmoment[t]) / n1
            var = n0 * n1 * (mu0 - mu1) ** 2
        if var > best_var:
            best_var = var
            best_t = t
    return best_t


@dataclass(frozen=True, eq=False)
class GapImage:
    """8-bit rendering of one gap vector with its Otsu highlight mask.

    ``values`` holds the per-image min-max scaled gray levels
    (row-major); ``vmin``/``vmax`` record the scaling for the metadata
    comment.
    """

    width: int
    height: int
    values: np.ndarray
    highlight_mask: np.ndarray
    vmin: float
    vmax: float


def gap_image(vector, width: int, height: int) -> GapImage:
    """Render a vector as a width x height graymap.

    Values are min-max scaled to 0..255 per image, signs included, so a
    gap vector shows both cones' sides at the two ends of the gray
    range. A constant vector (an all-zero gap included) renders as all
    zeros with an empty mask. The mask highlights pixels strictly above
    the Otsu threshold. Callers wanting a magnitude rendering pass
    ``np.abs(vector)`` themselves, as the mean-of-absolute-gaps image
    does.
    """
    v = np.asarray(vector, dtype=float).ravel()
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    if v.size != width * height:
        raise ValueError(
            f"vector of length {v.size} cannot be reshaped to {width}x{height}"
        )
    a = v.reshape(height, width)
    vmin = float(a.min())
    vmax = float(a.max())
    if vmax > vmin:
        scaled = np.rint((a - vmin) / (vmax - vmin) * 255.0).astype(np.uint8)
    else:
        scaled = np.zeros((height, width), dtype=np.uint8)
    t = otsu_threshold(scaled)
    return GapImage(width, height, scaled, scaled > t, vmin, vmax)


def write_pgm(path, values: np.ndarray, comment: str | None = None) -> None:
    """Write a binary (P5) graymap of 8-bit values."""
    a = np.asarray(values)
    if a.dtype != np.uint8 or a.ndim != 2:
        raise ValueError("values must be a 2-D uint8 array")
    h, w = a.shape
    header = b"P5\n"
    if comment:
        header += b"# " + comment.encode("ascii") + b"\n"
    header += f"{w} {h}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(a.tobytes())

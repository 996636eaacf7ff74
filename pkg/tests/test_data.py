"""Tests for dataset IO and the synthetic generator."""

import json

import numpy as np
import pytest

from coneset.cone import cone_angles, cone_from_features, cone_similarity, project_to_cone
from coneset.data import (
    Dataset,
    DatasetEntry,
    FeatureSet,
    SynthSpec,
    generate_synthetic,
    load_dataset,
    load_feature_csv,
    save_dataset,
    split_dataset,
)
from coneset.errors import DataError


def small_spec(**overrides):
    base = dict(
        n_classes=3,
        sets_per_class=4,
        images_per_set=10,
        feature_dim=12,
        cone_rank=2,
        noise_sigma=0.05,
        class_separation=0.9,
        seed=0,
    )
    base.update(overrides)
    return SynthSpec(**base)


class TestGenerateSynthetic:
    def test_counts_and_dims(self):
        ds = generate_synthetic(small_spec())
        assert ds.feature_dim == 12
        assert len(ds.sets) == 12
        for entry in ds.sets:
            assert entry.feature_set.features.shape == (12, 10)
            assert entry.split == "train"
        labels = {e.label for e in ds.sets}
        assert labels == {"class0", "class1", "class2"}

    def test_deterministic(self):
        d1 = generate_synthetic(small_spec())
        d2 = generate_synthetic(small_spec())
        for e1, e2 in zip(d1.sets, d2.sets):
            assert np.array_equal(e1.feature_set.features, e2.feature_set.features)
            assert e1.feature_set.set_id == e2.feature_set.set_id

    def test_non_negative_features(self):
        ds = generate_synthetic(small_spec(noise_sigma=0.5))
        for entry in ds.sets:
            assert np.all(entry.feature_set.features >= 0)

    def test_noiseless_separated_data_lies_in_its_cone(self):
        ds = generate_synthetic(small_spec(noise_sigma=0.0, class_separation=1.0))
        entry = ds.sets[0]
        f = entry.feature_set.features
        cone = cone_from_features(f, 2, seed=0)
        for i in range(f.shape[1]):
            xhat, _ = project_to_cone(cone, f[:, i])
            assert np.linalg.norm(f[:, i] - xhat) <= 1e-8

    def test_separability_precondition(self):
        ds = generate_synthetic(
            small_spec(noise_sigma=0.01, class_separation=1.0, images_per_set=20)
        )
        by_label = {}
        for entry in ds.sets:
            by_label.setdefault(entry.label, []).append(entry.feature_set.features)
        cones = {
            lab: cone_from_features(np.hstack(sets), 2, seed=1)
            for lab, sets in by_label.items()
        }
        labs = sorted(cones)
        for i, la in enumerate(labs):
            refit = cone_from_features(np.hstack(by_label[la]), 2, seed=7)
            self_sim = cone_similarity(cone_angles(cones[la], refit))
            assert self_sim >= 0.9
            for lb in labs[i + 1 :]:
                cross = cone_similarity(cone_angles(cones[la], cones[lb]))
                assert cross <= 0.2

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            small_spec(cone_rank=13)
        with pytest.raises(ValueError):
            small_spec(n_classes=0)
        with pytest.raises(ValueError):
            small_spec(class_separation=1.5)
        with pytest.raises(ValueError):
            small_spec(noise_sigma=-0.1)


class TestSplitDataset:
    def test_half_split_counts(self):
        ds = split_dataset(generate_synthetic(small_spec()), 0.5, seed=0)
        for lab in ("class0", "class1", "class2"):
            train = [e for e in ds.sets if e.label == lab and e.split == "train"]
            test = [e for e in ds.sets if e.label == lab and e.split == "test"]
            assert len(train) == 2
            assert len(test) == 2

    def test_seeded_repeatability(self):
        base = generate_synthetic(small_spec())
        s1 = split_dataset(base, 0.5, seed=3)
        s2 = split_dataset(base, 0.5, seed=3)
        assert [e.split for e in s1.sets] == [e.split for e in s2.sets]

    def test_single_set_class_rejected(self):
        ds = generate_synthetic(small_spec(sets_per_class=1))
        with pytest.raises(ValueError):
            split_dataset(ds, 0.5, seed=0)

    def test_fraction_bounds(self):
        ds = generate_synthetic(small_spec())
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(ValueError):
                split_dataset(ds, bad, seed=0)


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path):
        ds = split_dataset(generate_synthetic(small_spec()), 0.5, seed=1)
        manifest = save_dataset(ds, tmp_path / "out")
        loaded = load_dataset(manifest)
        assert loaded.feature_dim == ds.feature_dim
        assert len(loaded.sets) == len(ds.sets)
        for a, b in zip(ds.sets, loaded.sets):
            assert a.label == b.label
            assert a.split == b.split
            assert np.array_equal(a.feature_set.features, b.feature_set.features)

    def test_manifest_is_sorted_json(self, tmp_path):
        ds = generate_synthetic(small_spec(sets_per_class=1, n_classes=2))
        manifest = save_dataset(ds, tmp_path / "out")
        doc = json.loads(manifest.read_text())
        assert doc["feature_dim"] == 12
        assert {s["split"] for s in doc["sets"]} == {"train"}


class TestLoaderErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_dataset(tmp_path / "nope.json")

    def test_ragged_row_reports_line(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("1,2,3\n1,2\n")
        with pytest.raises(DataError, match="line 2"):
            load_feature_csv(p)

    def test_non_numeric_reports_line(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("1,2\nx,4\n")
        with pytest.raises(DataError, match="line 2"):
            load_feature_csv(p)

    def test_width_mismatch(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("1,2,3\n4,5,6\n")
        with pytest.raises(DataError):
            load_feature_csv(p, feature_dim=4)

    def test_label_only_in_test_split_rejected(self, tmp_path):
        root = tmp_path / "d"
        root.mkdir()
        (root / "a.csv").write_text("1,2\n3,4\n")
        manifest = {
            "feature_dim": 2,
            "sets": [{"id": "a", "path": "a.csv", "label": "x", "split": "test"}],
        }
        (root / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(DataError, match="train"):
            load_dataset(root / "manifest.json")

    def test_malformed_manifest_reports_location(self, tmp_path):
        p = tmp_path / "manifest.json"
        p.write_text('{"feature_dim": 2,')
        with pytest.raises(DataError, match="line"):
            load_dataset(p)

    def test_dimension_mismatch_across_sets(self, tmp_path):
        root = tmp_path / "d"
        root.mkdir()
        (root / "a.csv").write_text("1,2\n")
        (root / "b.csv").write_text("1,2,3\n")
        manifest = {
            "feature_dim": 2,
            "sets": [
                {"id": "a", "path": "a.csv", "label": "x", "split": "train"},
                {"id": "b", "path": "b.csv", "label": "x", "split": "train"},
            ],
        }
        (root / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(DataError):
            load_dataset(root / "manifest.json")


class TestValidation:
    def test_feature_set_requires_2d_finite(self):
        with pytest.raises(ValueError):
            FeatureSet(np.array([1.0, 2.0]), "x")
        with pytest.raises(ValueError):
            FeatureSet(np.array([[np.nan, 1.0]]), "x")

    def test_dataset_requires_train_presence(self):
        fs = FeatureSet(np.ones((2, 3)), "a")
        with pytest.raises(DataError):
            Dataset(2, [DatasetEntry(fs, "only-test", "test")])

    def test_dataset_split_values_checked(self):
        fs = FeatureSet(np.ones((2, 3)), "a")
        with pytest.raises(DataError):
            Dataset(2, [DatasetEntry(fs, "x", "validation")])

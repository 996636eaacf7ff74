"""Command line interface.

Subcommands: gen, train, predict, eval, angles, gaps. JSON reports go
to stdout unless --out is given. Exit codes: 0 success, 2 usage or
configuration error, 3 data error, 4 numerical failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .cone import AlsOptions, ConvexCone, angles_degrees, cone_angles, cone_from_features
from .data import (
    FeatureSet,
    SynthSpec,
    generate_synthetic,
    load_dataset,
    load_feature_csv,
    save_dataset,
    split_dataset,
)
from .discriminant import DiscriminantSpace, align_cones, gap_vectors
from .errors import DataError, NumericError
from .evaluate import evaluate_model, gap_image, write_pgm
from .pipeline import METHODS, ModelConfig, load_model, predict, save_model, train

__all__ = ["main"]


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _config_from_args(args) -> ModelConfig:
    return ModelConfig(
        method=args.method,
        ref_dim=args.ref_dim,
        in_dim=args.in_dim,
        n_angles=args.n_angles,
        disc_dim=args.disc_dim,
        n_gaps=args.n_gaps,
        eps_rel=args.eps_rel,
        seed=args.seed,
    )


def cmd_gen(args) -> int:
    spec = SynthSpec(
        n_classes=args.n_classes,
        sets_per_class=args.sets_per_class,
        images_per_set=args.images_per_set,
        feature_dim=args.feature_dim,
        cone_rank=args.cone_rank,
        noise_sigma=args.noise_sigma,
        class_separation=args.class_separation,
        seed=args.seed,
    )
    dataset = generate_synthetic(spec)
    if args.train_fraction is not None:
        dataset = split_dataset(dataset, args.train_fraction, seed=spec.seed)
    manifest = save_dataset(dataset, args.out_dir)
    print(manifest)
    return 0


def cmd_train(args) -> int:
    dataset = load_dataset(args.manifest)
    config = _config_from_args(args)
    model = train(config, dataset.train_sets())
    save_model(model, args.model_out)
    for label, cm in zip(model.class_labels, model.class_models):
        count = cm.n_basis if isinstance(cm, ConvexCone) else cm.dim
        print(f"{label}: {count} basis vectors")
    if isinstance(model.embedding, DiscriminantSpace):
        top = model.embedding.eigenvalues[:10]
        print("top eigenvalues: " + ", ".join(format(v, ".6g") for v in top))
    print(f"model written to {args.model_out}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    results = []
    for path in args.sets:
        features = load_feature_csv(path)
        fs = FeatureSet(features, Path(path).name)
        pred = predict(model, fs, n_angles=args.n_angles)
        results.append(
            {
                "set": str(path),
                "label": pred.label,
                "scores": {
                    lab: float(s) for lab, s in zip(model.class_labels, pred.scores)
                },
            }
        )
    _emit({"predictions": results}, args.out)
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    dataset = load_dataset(args.manifest)
    report = evaluate_model(model, dataset, n_angles=args.n_angles, sweep=args.sweep)
    _emit(report.to_json_dict(), args.out)
    return 0


def _fit_set_cone(path, rank: int, seed: int) -> ConvexCone:
    features = load_feature_csv(path)
    return cone_from_features(features, rank, seed=seed)


def cmd_angles(args) -> int:
    pairs = []
    if args.model:
        model = load_model(args.model)
        if not isinstance(model.class_models[0], ConvexCone):
            raise ValueError("angle tables need a cone model (MCM or CMCM)")
        labels = model.class_labels
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                a, b = model.class_models[i], model.class_models[j]
                if a.is_empty or b.is_empty:
                    continue
                opts = AlsOptions(seed=model.config.seed)
                spec = cone_angles(a, b, m=args.n_angles, opts=opts)
                pairs.append((labels[i], labels[j], spec))
    else:
        if not (args.set_a and args.set_b):
            raise ValueError("need either --model or both --set-a and --set-b")
        if args.rank is None:
            raise ValueError("--rank is required with --set-a/--set-b")
        ca = _fit_set_cone(args.set_a, args.rank, args.seed)
        cb = _fit_set_cone(args.set_b, args.rank, args.seed)
        opts = AlsOptions(seed=args.seed)
        spec = cone_angles(ca, cb, m=args.n_angles, opts=opts)
        pairs.append((str(args.set_a), str(args.set_b), spec))

    if args.json:
        doc = {
            "pairs": [
                {
                    "a": a,
                    "b": b,
                    "cosines": [float(v) for v in spec.cosines],
                    "degrees": [float(v) for v in angles_degrees(spec)],
                    "converged": [bool(v) for v in spec.converged],
                }
                for a, b, spec in pairs
            ]
        }
        _emit(doc, args.out)
    else:
        lines = []
        for a, b, spec in pairs:
            lines.append(f"{a} vs {b}")
            degs = angles_degrees(spec)
            for i, (c, deg, conv) in enumerate(zip(spec.cosines, degs, spec.converged), start=1):
                flag = "yes" if conv else "no"
                lines.append(f"  angle {i}: cos={c:.6f} theta={deg:8.4f} deg converged={flag}")
        text = "\n".join(lines)
        if args.out:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
    return 0


def cmd_gaps(args) -> int:
    if args.width * args.height <= 0:
        raise ValueError("width and height must be positive")
    seed = args.seed
    if args.model:
        model = load_model(args.model)
        if model.config.method != "MCM":
            raise ValueError("gap maps from a model need ambient cones (method MCM)")
        cones = model.class_models
        names = model.class_labels
        seed = model.config.seed
    else:
        if not (args.set_a and args.set_b):
            raise ValueError("need either --model or both --set-a and --set-b")
        if args.rank is None:
            raise ValueError("--rank is required with --set-a/--set-b")
        cones = [
            _fit_set_cone(args.set_a, args.rank, seed),
            _fit_set_cone(args.set_b, args.rank, seed),
        ]
        names = [Path(args.set_a).stem, Path(args.set_b).stem]
    dim = cones[0].dim_ambient
    if dim != args.width * args.height:
        raise ValueError(
            f"feature dimension {dim} does not match {args.width}x{args.height}"
        )
    n_gaps = args.n_gaps if args.n_gaps is not None else min(c.n_basis for c in cones)
    aligned = align_cones(cones, n_gaps, AlsOptions(seed=seed))
    gapset = gap_vectors(aligned)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for k, (a, b) in enumerate(gapset.pairs):
        stem = f"gap_{names[a]}_{names[b]}"
        vectors = gapset.gaps[:, k, :]
        for j in range(vectors.shape[0]):
            img = gap_image(vectors[j], args.width, args.height)
            written += _write_gap_pair(out_dir, f"{stem}_{j + 1:02d}", img)
        if vectors.shape[0]:
            mean_abs = np.mean(np.abs(vectors), axis=0)
            img = gap_image(mean_abs, args.width, args.height)
            written += _write_gap_pair(out_dir, f"{stem}_mean", img)
    for path in written:
        print(path)
    return 0


def _write_gap_pair(out_dir: Path, stem: str, img) -> list[Path]:
    comment = f"minmax scaling per image: min={img.vmin:.17g} max={img.vmax:.17g}"
    values_path = out_dir / f"{stem}.pgm"
    mask_path = out_dir / f"{stem}_mask.pgm"
    write_pgm(values_path, img.values, comment)
    write_pgm(mask_path, img.highlight_mask.astype(np.uint8) * 255, comment)
    return [values_path, mask_path]


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--ref-dim", type=int, required=True)
    p.add_argument("--in-dim", type=int, required=True)
    p.add_argument("--n-angles", type=int, default=None)
    p.add_argument("--disc-dim", type=int, default=None)
    p.add_argument("--n-gaps", type=int, default=None)
    p.add_argument("--eps-rel", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coneset",
        description="Convex cone and subspace models for image-set classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("out_dir")
    p.add_argument("--n-classes", type=int, default=3)
    p.add_argument("--sets-per-class", type=int, default=4)
    p.add_argument("--images-per-set", type=int, default=20)
    p.add_argument("--feature-dim", type=int, default=16)
    p.add_argument("--cone-rank", type=int, default=3)
    p.add_argument("--noise-sigma", type=float, default=0.05)
    p.add_argument("--class-separation", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.5,
                   help="per-class train fraction; the rest becomes the test split")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train a model from a dataset manifest")
    p.add_argument("manifest")
    p.add_argument("model_out")
    _add_model_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify feature CSV files")
    p.add_argument("model")
    p.add_argument("sets", nargs="+")
    p.add_argument("--n-angles", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="evaluate a model on a manifest's test split")
    p.add_argument("model")
    p.add_argument("manifest")
    p.add_argument("--n-angles", type=int, default=None)
    p.add_argument("--sweep", action="store_true",
                   help="also report accuracy for every angle count up to the available maximum")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("angles", help="angle table between cones")
    p.add_argument("--model", default=None)
    p.add_argument("--set-a", default=None)
    p.add_argument("--set-b", default=None)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--n-angles", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("gaps", help="write gap maps between cones as PGM images")
    p.add_argument("out_dir")
    p.add_argument("--model", default=None)
    p.add_argument("--set-a", default=None)
    p.add_argument("--set-b", default=None)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--n-gaps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gaps)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

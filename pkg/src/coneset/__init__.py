"""Convex cone and subspace models for image-set classification.

An image set becomes either a linear subspace (PCA basis) or a convex
cone (non-negative basis from NMF, projection by non-negative least
squares). Sets are compared through canonical angles between subspaces
or their cone analogue found by alternating projections, and classified
by nearest model. Constrained variants first move every model into a
discriminant space learned from between-class gaps.
"""

from .cone import (
    AlsOptions,
    AngleSpectrum,
    ConvexCone,
    angles_degrees,
    cone_angles,
    cone_from_features,
    cone_similarity,
    project_cone_to_subspace,
    project_to_cone,
    vector_cone_angle,
)
from .data import (
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
from .discriminant import (
    AlignedDirections,
    DiscriminantSpace,
    GapSet,
    align_cones,
    discriminant_space,
    gap_vectors,
    project_cone_to_discriminant,
    scatters,
)
from .errors import DataError, NumericError
from .evaluate import (
    EvalReport,
    GapImage,
    evaluate_model,
    gap_image,
    otsu_threshold,
    roc_auc,
    roc_curve,
    roc_eer,
    write_pgm,
)
from .linalg import orthonormalize, sym_generalized_eig
from .nnopt import NmfResult, NnlsSolution, nmf, nnls_solve
from .pipeline import (
    METHODS,
    ModelConfig,
    Prediction,
    TrainedModel,
    load_model,
    predict,
    probe_cosines,
    save_model,
    train,
)
from .subspace import (
    Gds,
    Subspace,
    canonical_angles,
    gds,
    project_subspace,
    subspace_from_features,
    subspace_similarity,
)

__version__ = "0.1.0"

__all__ = [
    "AlignedDirections",
    "AlsOptions",
    "AngleSpectrum",
    "ConvexCone",
    "DataError",
    "Dataset",
    "DatasetEntry",
    "DiscriminantSpace",
    "EvalReport",
    "FeatureSet",
    "GapImage",
    "GapSet",
    "Gds",
    "METHODS",
    "ModelConfig",
    "NmfResult",
    "NnlsSolution",
    "NumericError",
    "Prediction",
    "Subspace",
    "SynthSpec",
    "TrainedModel",
    "align_cones",
    "angles_degrees",
    "canonical_angles",
    "cone_angles",
    "cone_from_features",
    "cone_similarity",
    "discriminant_space",
    "evaluate_model",
    "gap_image",
    "gap_vectors",
    "gds",
    "generate_synthetic",
    "load_dataset",
    "load_feature_csv",
    "load_model",
    "nmf",
    "nnls_solve",
    "orthonormalize",
    "otsu_threshold",
    "predict",
    "probe_cosines",
    "project_cone_to_discriminant",
    "project_cone_to_subspace",
    "project_subspace",
    "project_to_cone",
    "roc_auc",
    "roc_curve",
    "roc_eer",
    "save_dataset",
    "save_model",
    "scatters",
    "split_dataset",
    "subspace_from_features",
    "subspace_similarity",
    "sym_generalized_eig",
    "train",
    "vector_cone_angle",
    "write_pgm",
]

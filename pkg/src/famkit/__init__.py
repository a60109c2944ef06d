"""famkit: feature activation maps for similarity-comparison classifiers.

Computes visual explanations for models that classify by comparing
embeddings (few-shot, contrastive, retrieval) instead of an FC classifier,
and evaluates them with energy-proportion/IoU localization and average
drop / increase-in-confidence faithfulness metrics.
"""

from .cam import ClassifierWeights, cam
from .errors import FamError
from .fam import (
    FamResult,
    compose_fam,
    fam_pipeline,
    normalize_map,
    normalize_weights,
    upsample_bilinear,
)
from .metrics import (
    average_drop,
    binarize,
    energy_proportion,
    estimate_bbox,
    evaluate_localization,
    increase_confidence,
    iou,
    largest_component,
    mask_image,
)
from .npyio import read_tensor, write_tensor
from .pooling import PoolingSpec, pool
from .similarity import (
    MetricSpec,
    cosine,
    cosine_contributions,
    euclidean_contributions,
    mean_similarity,
    neg_sq_euclidean,
)
from .transform import (
    ProjectionWeights,
    inverse_transform_contributions,
    project_embedding,
)
from .types import BoundingBox, ContributionWeights, FeatureMap, validate_feature_map

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "ClassifierWeights",
    "ContributionWeights",
    "FamError",
    "FamResult",
    "FeatureMap",
    "MetricSpec",
    "PoolingSpec",
    "ProjectionWeights",
    "average_drop",
    "binarize",
    "cam",
    "compose_fam",
    "cosine",
    "cosine_contributions",
    "energy_proportion",
    "estimate_bbox",
    "euclidean_contributions",
    "evaluate_localization",
    "fam_pipeline",
    "increase_confidence",
    "inverse_transform_contributions",
    "iou",
    "largest_component",
    "mask_image",
    "mean_similarity",
    "neg_sq_euclidean",
    "normalize_map",
    "normalize_weights",
    "pool",
    "project_embedding",
    "read_tensor",
    "upsample_bilinear",
    "validate_feature_map",
    "write_tensor",
]

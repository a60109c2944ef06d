"""Classic class activation mapping for FC-classifier exports.

Kept as a comparison baseline: the map for class c is the activation maps
weighted by that class's FC row, with no normalization applied. Gradient
and gradient-free variants are deliberately absent; they need a trained
FC classifier (and usually its gradients), which the similarity-comparison
models this package targets do not have.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadClassIndex, DimMismatch, NonFinite
from .types import FeatureMap


@dataclass(frozen=True)
class ClassifierWeights:
    """classes x N weight matrix of an FC classifier."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.matrix, dtype=np.float64)
        if arr.ndim != 2:
            raise DimMismatch(f"classifier weights must be a matrix, got rank-{arr.ndim}")
        if min(arr.shape) == 0:
            raise DimMismatch(f"classifier weights have an empty dimension: {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFinite("classifier weights contain NaN or Inf")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def classes(self) -> int:
        return self.matrix.shape[0]

    @property
    def channels(self) -> int:
        return self.matrix.shape[1]


def cam(fmap: FeatureMap, weights: ClassifierWeights, class_index: int) -> np.ndarray:
    """L(i,j) = sum_n w_n^c * A^n(i,j), unnormalized."""
    if not 0 <= class_index < weights.classes:
        raise BadClassIndex(
            f"class {class_index} outside [0, {weights.classes})"
        )
    if weights.channels != fmap.channels:
        raise DimMismatch(
            f"classifier has {weights.channels} channels, feature map {fmap.channels}"
        )
    return np.einsum("n,nhw->hw", weights.matrix[class_index], fmap.values)

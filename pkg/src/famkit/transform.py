"""Mapping contribution weights through a linear projection head.

Some backbones append an FC projection after pooling that changes the
embedding length from N to J before similarity is computed. Contribution
weights found in that decision space must be pulled back to the
convolutional channels: for a bias-free linear map z' = z W the pullback
C = W C' preserves the total contribution, z . C == z' . C' for every z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NonFinite
from .types import ContributionWeights, as_embedding


@dataclass(frozen=True)
class ProjectionWeights:
    """N x J weight matrix of the projection module."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.matrix, dtype=np.float64)
        if arr.ndim != 2:
            raise DimMismatch(f"projection must be a matrix, got rank-{arr.ndim}")
        if min(arr.shape) == 0:
            raise DimMismatch(f"projection has an empty dimension: {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFinite("projection weights contain NaN or Inf")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


def project_embedding(z, w: ProjectionWeights, bias=None) -> np.ndarray:
    """z' = z W (+ bias when explicitly allowed by the caller)."""
    z = as_embedding(z)
    if z.size != w.rows:
        raise DimMismatch(f"embedding length {z.size} != projection rows {w.rows}")
    out = z @ w.matrix
    if bias is not None:
        bias = as_embedding(bias)
        if bias.size != w.cols:
            raise DimMismatch(f"bias length {bias.size} != projection cols {w.cols}")
        out = out + bias
    return out


def inverse_transform_contributions(
    c_prime: ContributionWeights, w: ProjectionWeights
) -> ContributionWeights:
    """Pull decision-space weights back to channel space: C = W C'."""
    if len(c_prime) != w.cols:
        raise DimMismatch(
            f"weights length {len(c_prime)} != projection cols {w.cols}"
        )
    return ContributionWeights(w.matrix @ c_prime.values, normalized=False)

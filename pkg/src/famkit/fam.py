"""Feature activation map composition.

Pipeline: pool the query and support feature maps, derive per-channel
contribution weights from their similarity (optionally through a linear
projection head), max-min normalize the weights, linearly combine the
activation maps, upsample bilinearly, and max-min normalize the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimMismatch, NotNormalized
from .pooling import PoolingSpec, pool
from .similarity import MetricSpec, contributions, mean_similarity
from .transform import ProjectionWeights, inverse_transform_contributions, project_embedding
from .types import ContributionWeights, FeatureMap, as_saliency


def normalize_weights(c: ContributionWeights) -> ContributionWeights:
    """Max-min normalize weights to [0, 1]; constant input maps to zeros."""
    v = c.values
    lo = float(v.min())
    hi = float(v.max())
    if hi == lo:
        return ContributionWeights(np.zeros_like(v), normalized=True)
    return ContributionWeights((v - lo) / (hi - lo), normalized=True)


def compose_fam(fmap: FeatureMap, weights: ContributionWeights) -> np.ndarray:
    """Weighted sum of activation maps: L(i,j) = sum_n w_n * A^n(i,j)."""
    if not weights.normalized:
        raise NotNormalized("compose_fam expects max-min normalized weights")
    if len(weights) != fmap.channels:
        raise DimMismatch(
            f"{len(weights)} weights for {fmap.channels} channels"
        )
    return np.einsum("n,nhw->hw", weights.values, fmap.values)


def upsample_bilinear(saliency, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resize with half-pixel-center sampling, edges clamped."""
    m = as_saliency(saliency)
    if out_h < 1 or out_w < 1:
        raise DimMismatch(f"output size must be positive, got {out_h}x{out_w}")
    return kernels.bilinear_resize(np.ascontiguousarray(m), out_h, out_w)


def normalize_map(saliency) -> np.ndarray:
    """Max-min normalize a map to [0, 1]; constant input maps to zeros."""
    m = as_saliency(saliency)
    lo = float(m.min())
    hi = float(m.max())
    if hi == lo:
        return np.zeros_like(m)
    return (m - lo) / (hi - lo)


@dataclass(frozen=True)
class FamResult:
    """Everything the pipeline produces for one query.

    ``raw_upsampled`` is the weighted activation sum at output resolution
    before the final max-min normalization; ``saliency`` is the normalized
    version used for masking and rendering.
    """

    saliency: np.ndarray
    raw_upsampled: np.ndarray
    fam_map: np.ndarray
    score: float | None
    contributions: ContributionWeights | None
    weights: ContributionWeights
    degenerate_weights: bool = False
    single_channel: bool = False
    query_embedding: np.ndarray | None = None
    support_embeddings: list = field(default_factory=list)


def fam_pipeline(
    query_map: FeatureMap,
    support_maps: list[FeatureMap],
    pooling: PoolingSpec,
    metric: MetricSpec,
    out_h: int,
    out_w: int,
    projection: ProjectionWeights | None = None,
    projection_bias=None,
    contribution_mode: str = "eq15",
) -> FamResult:
    """Run the full explanation pipeline for one query.

    With a projection, embeddings are projected into the decision space,
    the score and contribution weights are computed there, and the weights
    are pulled back to channel space before composition. The projection
    bias (when the caller allowed one) affects embeddings and the score
    only, never the pullback.
    """
    n = query_map.channels
    for i, s in enumerate(support_maps):
        if s.channels != n:
            raise DimMismatch(
                f"support {i} has {s.channels} channels, query has {n}"
            )
    if projection is not None and projection.rows != n:
        raise DimMismatch(
            f"projection rows {projection.rows} != feature channels {n}"
        )

    z = pool(query_map, pooling)
    zs = [pool(s, pooling) for s in support_maps]

    if projection is not None:
        z_dec = project_embedding(z, projection, bias=projection_bias)
        zs_dec = [project_embedding(v, projection, bias=projection_bias) for v in zs]
        score = mean_similarity(z_dec, zs_dec, metric)
        c_prime = contributions(z_dec, zs_dec, metric, mode=contribution_mode)
        contrib = inverse_transform_contributions(c_prime, projection)
    else:
        z_dec, zs_dec = z, zs
        score = mean_similarity(z, zs, metric)
        contrib = contributions(z, zs, metric, mode=contribution_mode)

    single_channel = n == 1
    if single_channel:
        # one channel trivially carries all contribution; Eq-style max-min
        # normalization would zero it out
        weights = ContributionWeights(np.ones(1), normalized=True)
        degenerate = False
    else:
        weights = normalize_weights(contrib)
        degenerate = bool(np.all(weights.values == 0.0))

    fam_map = compose_fam(query_map, weights)
    raw_up = upsample_bilinear(fam_map, out_h, out_w)
    final = normalize_map(raw_up)
    return FamResult(
        saliency=final,
        raw_upsampled=raw_up,
        fam_map=fam_map,
        score=score,
        contributions=contrib,
        weights=weights,
        degenerate_weights=degenerate,
        single_channel=single_channel,
        query_embedding=z_dec,
        support_embeddings=list(zs_dec),
    )

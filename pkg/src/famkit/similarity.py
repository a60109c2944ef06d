"""Similarity scores and channel-wise contribution weights.

The decision score of a comparison-based classifier is the mean similarity
between a query embedding and K same-class support embeddings. Each
channel's share of that score is its contribution weight; those weights
are what get combined with the activation maps downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptySupportSet,
    LengthMismatch,
    ManifestError,
    ZeroNorm,
    ZeroSimilarity,
)
from .types import ContributionWeights, as_embedding

METRICS = ("cosine", "neg_sq_euclidean")
CONTRIBUTION_MODES = ("eq15", "unnormalized")


@dataclass(frozen=True)
class MetricSpec:
    kind: str = "cosine"

    def __post_init__(self):
        if self.kind not in METRICS:
            raise ManifestError(f"metric must be one of {METRICS}, got {self.kind!r}")

    @staticmethod
    def from_manifest(doc: dict) -> "MetricSpec":
        return MetricSpec(kind=doc.get("metric", "cosine"))


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = as_embedding(a)
    b = as_embedding(b)
    if a.size != b.size:
        raise LengthMismatch(f"embedding lengths differ: {a.size} vs {b.size}")
    return a, b


def cosine(a, b) -> float:
    """Cosine similarity, clamped to [-1, 1] against float drift."""
    a, b = _pair(a, b)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroNorm("cosine similarity undefined for zero-norm embeddings")
    return min(1.0, max(-1.0, float(np.dot(a, b)) / (na * nb)))


def neg_sq_euclidean(a, b) -> float:
    """Negative squared Euclidean distance (larger = more similar)."""
    a, b = _pair(a, b)
    d = a - b
    return -float(np.dot(d, d))


def similarity(a, b, metric: MetricSpec) -> float:
    if metric.kind == "cosine":
        return cosine(a, b)
    return neg_sq_euclidean(a, b)


def mean_similarity(query, supports, metric: MetricSpec) -> float:
    """Decision score: average similarity over the K support embeddings."""
    if len(supports) == 0:
        raise EmptySupportSet("need at least one support embedding")
    scores = [similarity(query, s, metric) for s in supports]
    return math.fsum(scores) / len(scores)


def cosine_contributions(query, supports, mode: str = "eq15") -> ContributionWeights:
    """Per-channel contribution weights under cosine similarity.

    The default "eq15" mode divides each pair's channel products by
    |s_k| * ||Z|| * ||Z_k||, so the weights sum to the mean similarity
    sign over pairs (exactly 1 when every pair similarity is positive).
    "unnormalized" drops the |s_k| factor; then the weights sum to the
    decision score itself.
    """
    if mode not in CONTRIBUTION_MODES:
        raise ManifestError(f"contribution_mode must be one of {CONTRIBUTION_MODES}")
    if len(supports) == 0:
        raise EmptySupportSet("need at least one support embedding")
    q = as_embedding(query)
    nq = float(np.linalg.norm(q))
    if nq == 0.0:
        raise ZeroNorm("query embedding has zero norm")

    acc = np.zeros(q.size)
    for k, support in enumerate(supports):
        q_, s = _pair(q, support)
        ns = float(np.linalg.norm(s))
        if ns == 0.0:
            raise ZeroNorm(f"support {k} has zero norm")
        products = q_ * s
        denom = nq * ns
        if mode == "eq15":
            s_k = float(products.sum()) / denom
            if s_k == 0.0:
                raise ZeroSimilarity(f"support {k} has zero similarity to the query")
            denom *= abs(s_k)
        acc += products / denom
    return ContributionWeights(acc / len(supports), normalized=False)


def euclidean_contributions(query, supports) -> ContributionWeights:
    """Per-channel weights under negative squared Euclidean similarity.

    c_n = -mean_k (z_n - z_n^k)^2, which sums over channels to the decision
    score exactly.
    """
    if len(supports) == 0:
        raise EmptySupportSet("need at least one support embedding")
    q = as_embedding(query)
    acc = np.zeros(q.size)
    for support in supports:
        q_, s = _pair(q, support)
        d = q_ - s
        acc += d * d
    return ContributionWeights(-acc / len(supports), normalized=False)


def contributions(query, supports, metric: MetricSpec, mode: str = "eq15") -> ContributionWeights:
    if metric.kind == "cosine":
        return cosine_contributions(query, supports, mode=mode)
    return euclidean_contributions(query, supports)

"""Channel pooling: collapse each activation map to one scalar."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ManifestError
from .types import FeatureMap

KINDS = ("gap", "gmp", "lse")


@dataclass(frozen=True)
class PoolingSpec:
    """Pooling choice; ``lse_r`` is the log-sum-exp temperature (r > 0)."""

    kind: str = "gap"
    lse_r: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ManifestError(f"pooling must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "lse" and not self.lse_r > 0:
            raise ManifestError(f"lse_r must be positive, got {self.lse_r}")

    @staticmethod
    def from_manifest(doc: dict) -> "PoolingSpec":
        return PoolingSpec(
            kind=doc.get("pooling", "gap"),
            lse_r=float(doc.get("lse_r", 1.0)),
        )


def pool(fmap: FeatureMap, spec: PoolingSpec) -> np.ndarray:
    """Embed a feature map into a length-N vector, one scalar per channel."""
    a = fmap.values
    if spec.kind == "gap":
        return a.mean(axis=(1, 2))
    if spec.kind == "gmp":
        return a.max(axis=(1, 2))
    # lse: (1/r) * log(mean(exp(r * a))), max-shifted so exp cannot overflow
    r = spec.lse_r
    m = a.max(axis=(1, 2), keepdims=True)
    shifted = np.exp(r * (a - m)).mean(axis=(1, 2))
    return m[:, 0, 0] + np.log(shifted) / r

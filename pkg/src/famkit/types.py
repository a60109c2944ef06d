"""Shared tensor and geometry types.

Conventions used across the package:

* feature maps are (channels, height, width) float64 arrays, C-order;
* embeddings are 1-D float64 arrays;
* saliency maps are 2-D float64 arrays;
* boxes are half-open pixel regions [x0, x1) x [y0, y1), so
  area = (x1 - x0) * (y1 - y0) counts pixels exactly.

All containers are frozen and their arrays marked read-only, so instances
can be shared freely across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, EmptyDimension, InvalidBox, NonFinite


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FeatureMap:
    """Output of a convolutional layer: N activation maps of h x w."""

    values: np.ndarray

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]


def _to_f64(raw, what: str) -> np.ndarray:
    # validation is total: even non-numeric input must yield a typed error
    try:
        return np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise NonFinite(f"{what} is not numeric: {exc}") from exc


def validate_feature_map(raw) -> FeatureMap:
    """Validate a rank-3 tensor and wrap it as a FeatureMap.

    Raises DimMismatch for wrong rank, EmptyDimension for a zero-sized
    axis, NonFinite when NaN/Inf (or anything non-numeric) is present.
    Values are upcast to float64; per-channel contribution sums are
    checked to 1e-9 downstream and float32 accumulation does not survive
    that on wide feature maps.
    """
    arr = _to_f64(raw, "feature map")
    if arr.ndim != 3:
        raise DimMismatch(f"feature map must be rank-3, got rank-{arr.ndim}")
    if min(arr.shape) == 0:
        raise EmptyDimension(f"feature map has an empty dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("feature map contains NaN or Inf")
    return FeatureMap(_freeze(np.ascontiguousarray(arr)))


def as_embedding(raw) -> np.ndarray:
    """Validate a rank-1 embedding vector (finite, length >= 1)."""
    arr = _to_f64(raw, "embedding")
    if arr.ndim != 1:
        raise DimMismatch(f"embedding must be rank-1, got rank-{arr.ndim}")
    if arr.size == 0:
        raise EmptyDimension("embedding is empty")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("embedding contains NaN or Inf")
    return arr


def as_saliency(raw) -> np.ndarray:
    """Validate a rank-2 saliency map (finite, non-empty)."""
    arr = _to_f64(raw, "saliency map")
    if arr.ndim != 2:
        raise DimMismatch(f"saliency map must be rank-2, got rank-{arr.ndim}")
    if min(arr.shape) == 0:
        raise EmptyDimension(f"saliency map has an empty dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("saliency map contains NaN or Inf")
    return arr


@dataclass(frozen=True)
class ContributionWeights:
    """Per-channel contribution weights.

    ``normalized`` records whether the values went through max-min
    normalization; composition refuses raw weights unless the caller sets
    the flag deliberately (the classifier-weights baseline does).
    """

    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise DimMismatch(f"weights must be rank-1, got rank-{arr.ndim}")
        if arr.size == 0:
            raise EmptyDimension("weights vector is empty")
        if not np.all(np.isfinite(arr)):
            raise NonFinite("weights contain NaN or Inf")
        object.__setattr__(self, "values", _freeze(arr))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned half-open pixel box [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (0 <= self.x0 < self.x1 and 0 <= self.y0 < self.y1):
            raise InvalidBox(
                f"need 0 <= x0 < x1 and 0 <= y0 < y1, got "
                f"({self.x0}, {self.y0}, {self.x1}, {self.y1})"
            )

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def fits_within(self, height: int, width: int) -> bool:
        return self.x1 <= width and self.y1 <= height

    def intersection_area(self, other: "BoundingBox") -> int:
        iw = min(self.x1, other.x1) - max(self.x0, other.x0)
        ih = min(self.y1, other.y1) - max(self.y0, other.y0)
        if iw <= 0 or ih <= 0:
            return 0
        return iw * ih

    @staticmethod
    def from_xywh(x: int, y: int, w: int, h: int) -> "BoundingBox":
        return BoundingBox(x0=x, y0=y, x1=x + w, y1=y + h)

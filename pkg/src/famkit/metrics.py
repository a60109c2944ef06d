"""Localization and faithfulness evaluation.

Localization: how much saliency energy lands inside the annotated box, and
the IoU between that box and one estimated from the map (threshold at a
fraction of the max, keep the largest 8-connected component, take its
tight box). Faithfulness: how the decision score reacts when the input is
masked by the saliency map (average drop / increase in confidence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    BoxOutOfBounds,
    DimMismatch,
    EmptyMask,
    LengthMismatch,
    NonPositiveMax,
    ZeroEnergy,
    ZeroScore,
)
from .fam import normalize_map
from .types import BoundingBox, as_saliency


def energy_proportion(saliency, bbox: BoundingBox) -> float:
    """Fraction of total saliency mass inside the box.

    Expects a non-negative map (normalize first); the map must carry some
    mass, and the box must fit inside it.
    """
    m = as_saliency(saliency)
    h, w = m.shape
    if not bbox.fits_within(h, w):
        raise BoxOutOfBounds(f"box {bbox} outside {h}x{w} map")
    total = float(m.sum())
    if total == 0.0:
        raise ZeroEnergy("saliency map has zero total energy")
    inside = float(m[bbox.y0 : bbox.y1, bbox.x0 : bbox.x1].sum())
    return inside / total


def binarize(saliency, fraction: float) -> np.ndarray:
    """Boolean mask of pixels >= fraction * max(map).

    Inclusive comparison, so the mask is never empty while max > 0.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    m = as_saliency(saliency)
    peak = float(m.max())
    if peak <= 0.0:
        raise NonPositiveMax(f"map maximum is {peak}, cannot threshold")
    return m >= fraction * peak


def largest_component(mask) -> np.ndarray:
    """Keep only the largest 8-connected component of a boolean mask.

    Ties go to the component whose first pixel comes earliest in row-major
    order.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise DimMismatch(f"mask must be rank-2, got rank-{mask.ndim}")
    if not mask.any():
        raise EmptyMask("mask has no true pixel")
    labels, count = kernels.label_components(mask)
    if count == 1:
        return mask
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    # labels are assigned in scan order, so argmax picks the earliest of ties
    best = int(np.argmax(sizes[1:])) + 1
    return labels == best


def estimate_bbox(mask) -> BoundingBox:
    """Tightest half-open box containing all true pixels."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise DimMismatch(f"mask must be rank-2, got rank-{mask.ndim}")
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        raise EmptyMask("mask has no true pixel")
    return BoundingBox(
        x0=int(cols[0]),
        y0=int(rows[0]),
        x1=int(cols[-1]) + 1,
        y1=int(rows[-1]) + 1,
    )


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union by integer pixel counting."""
    inter = a.intersection_area(b)
    union = a.area + b.area - inter
    return inter / union


def mask_image(image, saliency) -> np.ndarray:
    """Multiply every channel of a (C,H,W) image by a [0,1] saliency map."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 3:
        raise DimMismatch(f"image must be rank-3 (C,H,W), got rank-{img.ndim}")
    m = as_saliency(saliency)
    if img.shape[1:] != m.shape:
        raise DimMismatch(f"image {img.shape[1:]} vs saliency {m.shape}")
    return img * m[None, :, :]


def average_drop(s: list, s_masked: list) -> float:
    """Mean relative score drop after masking, in percent, clamped at 0.

    Reference scores must be positive; a zero or negative score makes the
    relative drop meaningless.
    """
    if len(s) != len(s_masked):
        raise LengthMismatch(f"{len(s)} scores vs {len(s_masked)} masked scores")
    if len(s) == 0:
        raise LengthMismatch("need at least one score pair")
    drops = []
    for si, mi in zip(s, s_masked):
        if si <= 0.0:
            raise ZeroScore(f"reference score {si} is not positive")
        drops.append(max(0.0, si - mi) / si)
    return math.fsum(drops) / len(drops) * 100.0


def increase_confidence(s: list, s_masked: list) -> float:
    """Percentage of pairs whose score strictly increased after masking."""
    if len(s) != len(s_masked):
        raise LengthMismatch(f"{len(s)} scores vs {len(s_masked)} masked scores")
    if len(s) == 0:
        raise LengthMismatch("need at least one score pair")
    hits = sum(1 for si, mi in zip(s, s_masked) if si < mi)
    return hits / len(s) * 100.0


def evaluate_localization(saliency, gt_bbox: BoundingBox, fraction: float = 0.2) -> dict:
    """Proportion and IoU for one saliency map at evaluation resolution.

    The map is max-min normalized first; both metrics then run on the same
    normalized map. A constant positive map is evaluated as-is (normalizing
    it would erase the only information it carries); a constant map that is
    zero or negative still fails with ZeroEnergy/NonPositiveMax.
    """
    m = as_saliency(saliency)
    norm = m if float(m.max()) == float(m.min()) else normalize_map(m)
    proportion = energy_proportion(norm, gt_bbox)
    mask = binarize(norm, fraction)
    est = estimate_bbox(largest_component(mask))
    return {"proportion": proportion, "iou": iou(est, gt_bbox)}


@dataclass(frozen=True)
class ImageRecord:
    """Per-image metric record; score fields are None without a model."""

    id: str
    proportion: float | None = None
    iou: float | None = None
    s: float | None = None
    s_masked: float | None = None


def _mean(values: list) -> float | None:
    return math.fsum(values) / len(values) if values else None


def aggregate(records: list[ImageRecord]) -> dict:
    """Recompute the aggregate block from per-image records.

    Faithfulness aggregates only use records with positive reference
    scores; the others are counted in skipped_nonpositive (masking the
    input cannot be judged against a non-positive baseline).
    """
    proportions = [r.proportion for r in records if r.proportion is not None]
    ious = [r.iou for r in records if r.iou is not None]
    scored = [r for r in records if r.s is not None and r.s_masked is not None]
    usable = [r for r in scored if r.s > 0.0]
    skipped = len(scored) - len(usable)

    ad = ic = None
    if usable:
        ad = average_drop([r.s for r in usable], [r.s_masked for r in usable])
        ic = increase_confidence([r.s for r in usable], [r.s_masked for r in usable])
    return {
        "mean_proportion": _mean(proportions),
        "mean_iou": _mean(ious),
        "average_drop": ad,
        "increase_in_confidence": ic,
        "count": len(records),
        "skipped_nonpositive": skipped,
    }


def report_to_json(records: list[ImageRecord], failures: list[dict]) -> dict:
    """Assemble the evaluation report document."""
    return {
        "images": [
            {
                "id": r.id,
                "proportion": r.proportion,
                "iou": r.iou,
                "s": r.s,
                "s_masked": r.s_masked,
            }
            for r in records
        ],
        "aggregates": aggregate(records),
        "failures": failures,
    }

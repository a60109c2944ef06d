"""Heatmap rendering.

A fixed piecewise-linear colormap (blue at 0, green at 0.5, red at 1)
applied to a [0,1] map, optionally alpha-blended at 0.5 over the input
image. PNGs are written with fixed encoder settings so repeated runs are
byte-identical.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .errors import DimMismatch
from .types import as_saliency

BLEND_ALPHA = 0.5
_PNG_OPTS = {"optimize": False, "compress_level": 6}


def colormap(saliency) -> np.ndarray:
    """Map a [0,1] saliency map to uint8 RGB (H,W,3)."""
    v = np.clip(as_saliency(saliency), 0.0, 1.0)
    r = np.clip(2.0 * v - 1.0, 0.0, 1.0)
    g = 1.0 - np.abs(2.0 * v - 1.0)
    b = np.clip(1.0 - 2.0 * v, 0.0, 1.0)
    rgb = np.stack([r, g, b], axis=-1)
    return np.round(rgb * 255.0).astype(np.uint8)


def overlay(heat_rgb: np.ndarray, image_rgb: np.ndarray, alpha: float = BLEND_ALPHA) -> np.ndarray:
    """Blend heatmap over an image, both (H,W,3) uint8."""
    if heat_rgb.shape != image_rgb.shape:
        raise DimMismatch(f"heatmap {heat_rgb.shape} vs image {image_rgb.shape}")
    mix = alpha * heat_rgb.astype(np.float64) + (1.0 - alpha) * image_rgb.astype(np.float64)
    return np.round(mix).astype(np.uint8)


def to_rgb_image(image_chw: np.ndarray) -> np.ndarray:
    """(C,H,W) float tensor in [0,1] to (H,W,3) uint8; 1 channel is replicated."""
    img = np.asarray(image_chw, dtype=np.float64)
    if img.ndim != 3:
        raise DimMismatch(f"image must be rank-3 (C,H,W), got rank-{img.ndim}")
    if img.shape[0] == 1:
        img = np.repeat(img, 3, axis=0)
    elif img.shape[0] != 3:
        # fall back to the first three channels for display purposes
        img = img[:3]
    img = np.clip(img, 0.0, 1.0)
    return np.round(np.transpose(img, (1, 2, 0)) * 255.0).astype(np.uint8)


def save_png(rgb: np.ndarray, path) -> None:
    Image.fromarray(rgb, mode="RGB").save(path, format="PNG", **_PNG_OPTS)


def load_image_chw(path) -> np.ndarray:
    """Load an image file (or .npy tensor) as (C,H,W) float64 in [0,1]."""
    p = str(path)
    if p.endswith(".npy"):
        from .npyio import read_tensor

        arr = np.asarray(read_tensor(p), dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None, :, :]
        if arr.ndim != 3:
            raise DimMismatch(f"{p}: image tensor must be rank-2 or 3")
        return arr
    with Image.open(p) as im:
        rgb = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    return np.transpose(rgb, (2, 0, 1))

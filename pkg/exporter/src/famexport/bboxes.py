"""Bounding-box annotation parsing and rescaling.

Annotations are text lines of ``image_id x y width height`` in original
image pixels (floats accepted). Boxes are rescaled linearly into
resized-image coordinates, rounded half-up, and clamped to the image.
"""

from __future__ import annotations

import math

from .errors import MalformedLine


def parse_annotations(path) -> dict:
    """id -> (x, y, w, h) in original-image pixels."""
    boxes = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 5:
                raise MalformedLine(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            image_id = parts[0]
            try:
                x, y, w, h = (float(v) for v in parts[1:])
            except ValueError as exc:
                raise MalformedLine(f"{path}:{lineno}: non-numeric field") from exc
            if w <= 0 or h <= 0:
                raise MalformedLine(f"{path}:{lineno}: non-positive box size {w}x{h}")
            if x < 0 or y < 0:
                raise MalformedLine(f"{path}:{lineno}: negative box origin")
            boxes[image_id] = (x, y, w, h)
    return boxes


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def scale_box(box, original_size, new_size) -> list:
    """Rescale (x, y, w, h) from original (w, h) to new (w, h) pixels."""
    ox, oy, ow, oh = box
    orig_w, orig_h = original_size
    new_w, new_h = new_size
    sx = new_w / orig_w
    sy = new_h / orig_h
    x = _round_half_up(ox * sx)
    y = _round_half_up(oy * sy)
    w = _round_half_up(ow * sx)
    h = _round_half_up(oh * sy)
    # clamp inside the resized image, keeping at least one pixel
    x = min(max(x, 0), new_w - 1)
    y = min(max(y, 0), new_h - 1)
    w = max(min(w, new_w - x), 1)
    h = max(min(h, new_h - y), 1)
    return [x, y, w, h]


def convert_bboxes(annotation_path, sizes: dict) -> dict:
    """Rescale every annotated box whose id appears in ``sizes``.

    ``sizes`` maps image id -> (original (w, h), resized (w, h)).
    """
    out = {}
    for image_id, box in parse_annotations(annotation_path).items():
        if image_id in sizes:
            original, resized = sizes[image_id]
            out[image_id] = scale_box(box, original, resized)
    return out

"""Image preprocessing for the evaluation protocol.

Resize to a square, scale pixels to [0, 1], then standardize with the
ImageNet channel statistics.
"""

import numpy as np
from PIL import Image

MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)


def load_image(path, size: int):
    """Returns (tensor (3, size, size) float32, original (width, height))."""
    with Image.open(path) as im:
        original = im.size
        rgb = im.convert("RGB").resize((size, size), Image.BILINEAR)
    arr = np.asarray(rgb, dtype=np.float32) / 255.0
    arr = (arr - MEAN) / STD
    return arr.transpose(2, 0, 1).copy(), original

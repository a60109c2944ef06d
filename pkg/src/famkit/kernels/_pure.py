"""Pure-numpy kernel implementations.

Fallback backend used when the compiled extension is unavailable (or when
FAMKIT_PURE_PYTHON is set). Semantics match famkit.kernels._native; float
rounding may differ at the last ulp because summation orders differ.
"""

from __future__ import annotations

from collections import deque

import numpy as np

BACKEND = "pure-python"


def conv2d(x: np.ndarray, w: np.ndarray, bias: np.ndarray, stride: int, pad: int) -> np.ndarray:
    """Cross-correlate (C_in,H,W) with (C_out,C_in,kh,kw), zero padding."""
    cin, h, wd = x.shape
    cout, _, kh, kw = w.shape
    hp, wp = h + 2 * pad, wd + 2 * pad
    oh = (hp - kh) // stride + 1
    ow = (wp - kw) // stride + 1

    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad))) if pad else x
    out = np.broadcast_to(bias[:, None, None], (cout, oh, ow)).copy()
    for ki in range(kh):
        for kj in range(kw):
            patch = xp[:, ki : ki + (oh - 1) * stride + 1 : stride,
                       kj : kj + (ow - 1) * stride + 1 : stride]
            out += np.einsum("oc,chw->ohw", w[:, :, ki, kj], patch, optimize=True)
    return out


def maxpool2d(x: np.ndarray, k: int, stride: int) -> np.ndarray:
    """Per-channel max over k x k windows of a (C,H,W) tensor."""
    c, h, w = x.shape
    oh = (h - k) // stride + 1
    ow = (w - k) // stride + 1
    out = np.full((c, oh, ow), -np.inf)
    for ki in range(k):
        for kj in range(k):
            patch = x[:, ki : ki + (oh - 1) * stride + 1 : stride,
                      kj : kj + (ow - 1) * stride + 1 : stride]
            np.maximum(out, patch, out=out)
    return out


def bilinear_resize(m: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize a 2-D map with half-pixel-center sampling, edges clamped."""
    h, w = m.shape
    ys = np.clip((np.arange(out_h) + 0.5) * (h / out_h) - 0.5, 0.0, h - 1.0)
    xs = np.clip((np.arange(out_w) + 0.5) * (w / out_w) - 0.5, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]

    top = m[y0[:, None], x0[None, :]] * (1.0 - fx) + m[y0[:, None], x1[None, :]] * fx
    bot = m[y1[:, None], x0[None, :]] * (1.0 - fx) + m[y1[:, None], x1[None, :]] * fx
    return top * (1.0 - fy) + bot * fy


def label_components(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Label 8-connected components of a boolean mask.

    Labels are assigned in row-major first-pixel order starting at 1, so
    the smallest label among equally sized components is the one whose
    first pixel comes first in the scan.
    """
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    mask = np.ascontiguousarray(mask, dtype=bool)
    current = 0
    for si in range(h):
        row = mask[si]
        for sj in range(w):
            if not row[sj] or labels[si, sj]:
                continue
            current += 1
            queue = deque([(si, sj)])
            labels[si, sj] = current
            while queue:
                i, j = queue.popleft()
                for ni in range(max(i - 1, 0), min(i + 2, h)):
                    for nj in range(max(j - 1, 0), min(j + 2, w)):
                        if mask[ni, nj] and not labels[ni, nj]:
                            labels[ni, nj] = current
                            queue.append((ni, nj))
    return labels, current

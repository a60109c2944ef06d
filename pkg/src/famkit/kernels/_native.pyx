# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: convolution, pooling, resize, component labeling.

Semantics mirror famkit.kernels._pure; these exist because the inner loops
dominate corpus evaluation time.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "native"


def conv2d(const double[:, :, ::1] x, const double[:, :, :, ::1] w, const double[::1] bias,
           int stride, int pad):
    cdef Py_ssize_t cin = x.shape[0], h = x.shape[1], wd = x.shape[2]
    cdef Py_ssize_t cout = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t oh = (h + 2 * pad - kh) // stride + 1
    cdef Py_ssize_t ow = (wd + 2 * pad - kw) // stride + 1
    out_arr = np.empty((cout, oh, ow), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t oc, ic, i, j, ki, kj, ki_lo, ki_hi, kj_lo, kj_hi, base_y, base_x
    cdef double acc

    for oc in range(cout):
        for i in range(oh):
            # clip the kernel to the input so the hot loop has no branches
            base_y = i * stride - pad
            ki_lo = -base_y if base_y < 0 else 0
            ki_hi = h - base_y if h - base_y < kh else kh
            for j in range(ow):
                base_x = j * stride - pad
                kj_lo = -base_x if base_x < 0 else 0
                kj_hi = wd - base_x if wd - base_x < kw else kw
                acc = bias[oc]
                for ic in range(cin):
                    for ki in range(ki_lo, ki_hi):
                        for kj in range(kj_lo, kj_hi):
                            acc += w[oc, ic, ki, kj] * x[ic, base_y + ki, base_x + kj]
                out[oc, i, j] = acc
    return out_arr


def maxpool2d(const double[:, :, ::1] x, int k, int stride):
    cdef Py_ssize_t c = x.shape[0], h = x.shape[1], w = x.shape[2]
    cdef Py_ssize_t oh = (h - k) // stride + 1
    cdef Py_ssize_t ow = (w - k) // stride + 1
    out_arr = np.empty((c, oh, ow), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t ci, i, j, ki, kj
    cdef double best, v

    for ci in range(c):
        for i in range(oh):
            for j in range(ow):
                best = x[ci, i * stride, j * stride]
                for ki in range(k):
                    for kj in range(k):
                        v = x[ci, i * stride + ki, j * stride + kj]
                        if v > best:
                            best = v
                out[ci, i, j] = best
    return out_arr


def bilinear_resize(const double[:, ::1] m, int out_h, int out_w):
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    out_arr = np.empty((out_h, out_w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, y0, x0, y1, x1
    cdef double sy, sx, ys, xs, fy, fx, top, bot

    sy = h / <double> out_h
    sx = w / <double> out_w
    for i in range(out_h):
        ys = (i + 0.5) * sy - 0.5
        if ys < 0.0:
            ys = 0.0
        if ys > h - 1.0:
            ys = h - 1.0
        y0 = <Py_ssize_t> ys
        y1 = y0 + 1
        if y1 > h - 1:
            y1 = h - 1
        fy = ys - y0
        for j in range(out_w):
            xs = (j + 0.5) * sx - 0.5
            if xs < 0.0:
                xs = 0.0
            if xs > w - 1.0:
                xs = w - 1.0
            x0 = <Py_ssize_t> xs
            x1 = x0 + 1
            if x1 > w - 1:
                x1 = w - 1
            fx = xs - x0
            top = m[y0, x0] * (1.0 - fx) + m[y0, x1] * fx
            bot = m[y1, x0] * (1.0 - fx) + m[y1, x1] * fx
            out[i, j] = top * (1.0 - fy) + bot * fy
    return out_arr


def label_components(mask_in):
    """Label 8-connected components, labels in row-major first-pixel order."""
    mask_arr = np.ascontiguousarray(mask_in, dtype=np.uint8)
    cdef const cnp.uint8_t[:, ::1] mask = mask_arr
    cdef Py_ssize_t h = mask.shape[0], w = mask.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] labels = labels_arr
    stack_arr = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] stack = stack_arr
    cdef Py_ssize_t si, sj, i, j, ni, nj, top
    cdef cnp.int32_t current = 0

    for si in range(h):
        for sj in range(w):
            if mask[si, sj] == 0 or labels[si, sj] != 0:
                continue
            current += 1
            labels[si, sj] = current
            top = 0
            stack[top] = si * w + sj
            top += 1
            while top > 0:
                top -= 1
                i = stack[top] // w
                j = stack[top] % w
                for ni in range(i - 1 if i > 0 else 0, i + 2 if i + 2 < h else h):
                    for nj in range(j - 1 if j > 0 else 0, j + 2 if j + 2 < w else w):
                        if mask[ni, nj] != 0 and labels[ni, nj] == 0:
                            labels[ni, nj] = current
                            stack[top] = ni * w + nj
                            top += 1
    return labels_arr, int(current)

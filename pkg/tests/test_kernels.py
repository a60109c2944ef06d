"""Compiled and pure backends must agree (up to summation rounding)."""

import numpy as np
import pytest

from famkit.kernels import _pure

native = pytest.importorskip("famkit.kernels._native")


def test_conv2d_parity():
    rng = np.random.default_rng(71)
    for stride, pad in [(1, 0), (1, 2), (2, 1), (3, 0)]:
        x = rng.normal(size=(3, 11, 9))
        w = rng.normal(size=(5, 3, 3, 3))
        b = rng.normal(size=5)
        a = _pure.conv2d(x, w, b, stride, pad)
        c = native.conv2d(x, w, b, stride, pad)
        assert a.shape == c.shape
        assert np.max(np.abs(a - c)) < 1e-12


def test_maxpool_parity():
    rng = np.random.default_rng(72)
    x = rng.normal(size=(4, 10, 12))
    for k, stride in [(2, 2), (3, 1), (2, 3)]:
        assert np.array_equal(_pure.maxpool2d(x, k, stride), native.maxpool2d(x, k, stride))


def test_bilinear_parity():
    rng = np.random.default_rng(73)
    for shape, out in [((7, 7), (224, 224)), ((5, 9), (3, 4)), ((1, 1), (8, 8))]:
        m = rng.normal(size=shape)
        a = _pure.bilinear_resize(m, *out)
        c = native.bilinear_resize(m, *out)
        assert np.max(np.abs(a - c)) < 1e-12


def test_label_components_parity():
    rng = np.random.default_rng(74)
    for density in (0.2, 0.5, 0.8):
        mask = rng.random((40, 37)) < density
        lp, cp = _pure.label_components(mask)
        ln, cn = native.label_components(mask)
        assert cp == cn
        assert np.array_equal(lp, ln)


def test_read_only_inputs_accepted():
    x = np.random.default_rng(75).normal(size=(2, 6, 6))
    x.setflags(write=False)
    w = np.ones((1, 2, 3, 3))
    w.setflags(write=False)
    b = np.zeros(1)
    b.setflags(write=False)
    native.conv2d(x, w, b, 1, 1)
    m = x[0]
    native.bilinear_resize(np.ascontiguousarray(m), 9, 9)

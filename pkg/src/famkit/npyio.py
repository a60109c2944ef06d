"""Minimal NPY v1.0 tensor exchange.

Only the subset needed for interchange is handled: version 1.0 headers,
little-endian float32/float64, C-order payloads, rank 1 to 3. The writer
pads the header with spaces so the whole preamble is a multiple of 64
bytes and round-trips bit-for-bit with the reader; files written by numpy
itself under the same constraints load fine too.
"""

from __future__ import annotations

import ast
import math
import struct

import numpy as np

from .errors import (
    BadHeader,
    BadMagic,
    DimMismatch,
    IoFailure,
    NonFinite,
    TruncatedPayload,
    UnsupportedDtype,
)

_MAGIC = b"\x93NUMPY"
_VERSION = b"\x01\x00"
_DTYPES = {"<f4": np.dtype("<f4"), "<f8": np.dtype("<f8")}


def write_tensor(tensor, path) -> None:
    """Write a rank-1..3 float tensor to ``path``.

    float32 input stays '<f4' on disk, everything else is stored '<f8'.
    """
    arr = np.asarray(tensor)
    if arr.dtype != np.float32:
        arr = arr.astype(np.float64, copy=False)
    if arr.ndim not in (1, 2, 3):
        raise DimMismatch(f"only rank-1..3 tensors are exchanged, got rank-{arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("refusing to write NaN/Inf tensor")
    arr = np.ascontiguousarray(arr)

    descr = "<f4" if arr.dtype == np.float32 else "<f8"
    header = "{'descr': '%s', 'fortran_order': False, 'shape': %s, }" % (
        descr,
        repr(arr.shape),
    )
    # pad so that magic(6) + version(2) + hlen(2) + header + '\n' is 64-aligned
    pad = (-(10 + len(header) + 1)) % 64
    header = header + " " * pad + "\n"
    try:
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(_VERSION)
            fh.write(struct.pack("<H", len(header)))
            fh.write(header.encode("latin1"))
            fh.write(arr.tobytes(order="C"))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_tensor(path) -> np.ndarray:
    """Read a tensor written by :func:`write_tensor` (or numpy's v1.0 writer).

    Returns the array in its on-disk dtype so round-trips are bitwise exact.
    """
    with open(path, "rb") as fh:
        data = fh.read()

    if len(data) < 8 or data[:6] != _MAGIC:
        raise BadMagic(f"{path}: not an NPY file")
    if data[6:8] != _VERSION:
        raise BadMagic(f"{path}: unsupported NPY version {data[6]}.{data[7]}")
    if len(data) < 10:
        raise BadHeader(f"{path}: header length field missing")
    (hlen,) = struct.unpack("<H", data[8:10])
    if len(data) < 10 + hlen:
        raise BadHeader(f"{path}: header truncated")

    try:
        meta = ast.literal_eval(data[10 : 10 + hlen].decode("latin1").strip())
    except (ValueError, SyntaxError) as exc:
        raise BadHeader(f"{path}: unparseable header") from exc
    if not isinstance(meta, dict) or set(meta) != {"descr", "fortran_order", "shape"}:
        raise BadHeader(f"{path}: header keys must be descr/fortran_order/shape")

    descr = meta["descr"]
    if descr not in _DTYPES:
        raise UnsupportedDtype(f"{path}: dtype {descr!r} not supported")
    if meta["fortran_order"] is not False:
        raise BadHeader(f"{path}: fortran-order payloads not supported")
    shape = meta["shape"]
    if (
        not isinstance(shape, tuple)
        or not shape
        or len(shape) > 3
        or not all(isinstance(d, int) and d >= 0 for d in shape)
    ):
        raise BadHeader(f"{path}: unusable shape {shape!r}")

    dtype = _DTYPES[descr]
    # math.prod: declared dims are untrusted and must not overflow silently
    expected = dtype.itemsize * math.prod(shape)
    payload = data[10 + hlen :]
    if len(payload) != expected:
        raise TruncatedPayload(
            f"{path}: payload is {len(payload)} bytes, header declares {expected}"
        )
    return np.frombuffer(payload, dtype=dtype).reshape(shape).copy()

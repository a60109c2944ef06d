import struct

import numpy as np
import pytest

from famkit.errors import (
    BadHeader,
    BadMagic,
    DimMismatch,
    NonFinite,
    TruncatedPayload,
    UnsupportedDtype,
)
from famkit.npyio import read_tensor, write_tensor


def test_round_trip_single_value(tmp_path):
    p = tmp_path / "t.npy"
    write_tensor(np.full((1, 1, 1), 3.5), p)
    assert read_tensor(p)[0, 0, 0] == 3.5


def test_round_trip_random_tensors_bitwise(tmp_path):
    rng = np.random.default_rng(42)
    for i in range(100):
        rank = int(rng.integers(1, 4))
        shape = tuple(int(d) for d in rng.integers(1, 7, size=rank))
        t = rng.normal(size=shape)
        p = tmp_path / f"t{i}.npy"
        write_tensor(t, p)
        back = read_tensor(p)
        assert back.shape == t.shape
        assert back.dtype == np.float64
        assert back.tobytes() == t.tobytes()


def test_round_trip_float32_preserved(tmp_path):
    t = np.random.default_rng(0).normal(size=(3, 4, 5)).astype(np.float32)
    p = tmp_path / "f32.npy"
    write_tensor(t, p)
    back = read_tensor(p)
    assert back.dtype == np.float32
    assert back.tobytes() == t.tobytes()


def test_vector_header_declares_shape(tmp_path):
    p = tmp_path / "v.npy"
    write_tensor(np.array([0.0]), p)
    raw = p.read_bytes()
    assert raw[:6] == b"\x93NUMPY"
    assert raw[6:8] == b"\x01\x00"
    (hlen,) = struct.unpack("<H", raw[8:10])
    assert (10 + hlen) % 64 == 0
    header = raw[10 : 10 + hlen].decode("latin1")
    assert "'shape': (1,)" in header
    assert header.endswith("\n")


def test_numpy_interop(tmp_path):
    t = np.random.default_rng(1).normal(size=(2, 3))
    theirs = tmp_path / "np.npy"
    ours = tmp_path / "fam.npy"
    np.save(theirs, t)
    write_tensor(t, ours)
    assert np.array_equal(read_tensor(theirs), t)
    assert np.array_equal(np.load(ours), t)


def test_bad_magic(tmp_path):
    p = tmp_path / "bad.npy"
    p.write_bytes(b"XX" + b"\x00" * 30)
    with pytest.raises(BadMagic):
        read_tensor(p)


def test_bad_version(tmp_path):
    p = tmp_path / "v2.npy"
    p.write_bytes(b"\x93NUMPY\x02\x00" + b"\x00" * 30)
    with pytest.raises(BadMagic):
        read_tensor(p)


def test_truncated_payload(tmp_path):
    p = tmp_path / "t.npy"
    write_tensor(np.zeros((2, 3)), p)
    raw = p.read_bytes()
    p.write_bytes(raw[: len(raw) - 8])  # drop one float64
    with pytest.raises(TruncatedPayload):
        read_tensor(p)


def test_excess_payload(tmp_path):
    p = tmp_path / "t.npy"
    write_tensor(np.zeros((2, 3)), p)
    p.write_bytes(p.read_bytes() + b"\x00" * 8)
    with pytest.raises(TruncatedPayload):
        read_tensor(p)


def test_unsupported_dtype(tmp_path):
    p = tmp_path / "int.npy"
    np.save(p, np.arange(6, dtype=np.int64))
    with pytest.raises(UnsupportedDtype):
        read_tensor(p)


def test_fortran_order_rejected(tmp_path):
    p = tmp_path / "f.npy"
    np.save(p, np.asfortranarray(np.random.default_rng(2).normal(size=(3, 4))))
    with pytest.raises(BadHeader):
        read_tensor(p)


def test_rank4_rejected_both_ways(tmp_path):
    p = tmp_path / "r4.npy"
    with pytest.raises(DimMismatch):
        write_tensor(np.zeros((2, 2, 2, 2)), p)
    np.save(p, np.zeros((2, 2, 2, 2)))
    with pytest.raises(BadHeader):
        read_tensor(p)


def test_nonfinite_rejected(tmp_path):
    with pytest.raises(NonFinite):
        write_tensor(np.array([1.0, np.nan]), tmp_path / "nan.npy")


def test_garbage_header(tmp_path):
    p = tmp_path / "g.npy"
    header = b"not a dict" + b" " * 43 + b"\n"
    p.write_bytes(b"\x93NUMPY\x01\x00" + struct.pack("<H", len(header)) + header)
    with pytest.raises(BadHeader):
        read_tensor(p)


def test_oversized_declared_shape(tmp_path):
    # dims large enough to overflow a 64-bit element count must still land
    # in TruncatedPayload, not wrap around silently
    header = (
        "{'descr': '<f8', 'fortran_order': False, "
        "'shape': (1099511627776, 1099511627776), }"
    )
    pad = (-(10 + len(header) + 1)) % 64
    blob = (header + " " * pad + "\n").encode("latin1")
    p = tmp_path / "huge.npy"
    p.write_bytes(b"\x93NUMPY\x01\x00" + struct.pack("<H", len(blob)) + blob + b"\x00" * 16)
    with pytest.raises(TruncatedPayload):
        read_tensor(p)

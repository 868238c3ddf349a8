"""Minimal binary tensor files.

One tensor per file.  Layout, all little-endian:

    bytes 0..3   magic  b"SKT1"
    byte  4      dtype code: 1 = float32, 2 = complex64
    byte  5      ndim, 1..4
    bytes 6..    ndim u32 dims, each >= 1
    rest         row-major payload (complex64 stored re,im interleaved,
                 which is numpy's native layout)

Values are cast to float32 / complex64 on write, so the format is the
precision boundary of the pipeline.  read_tensor(write_tensor(t)) is
bit-identical.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .errors import DimensionError, FormatError, ValidationError

_MAGIC = b"SKT1"
_CODE_F32 = 1
_CODE_C64 = 2
_DTYPES = {_CODE_F32: np.dtype("<f4"), _CODE_C64: np.dtype("<c8")}


def write_tensor(tensor: np.ndarray, path) -> None:
    """Serialize a real or complex tensor; real data is stored as float32."""
    arr = np.asarray(tensor)
    if arr.ndim < 1 or arr.ndim > 4:
        raise DimensionError(f"tensor rank must be 1..4, got {arr.ndim}")
    if any(d < 1 for d in arr.shape):
        raise ValidationError(f"dims must all be >= 1, got {arr.shape}")
    if np.iscomplexobj(arr):
        code, dt = _CODE_C64, _DTYPES[_CODE_C64]
    else:
        code, dt = _CODE_F32, _DTYPES[_CODE_F32]
    header = _MAGIC + bytes([code, arr.ndim])
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    payload = np.ascontiguousarray(arr, dtype=dt).tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
    except OSError as exc:
        raise OSError(f"while writing {path}: {exc}") from exc


def read_tensor(path) -> np.ndarray:
    """Exact inverse of write_tensor.

    Malformed files raise FormatError naming the byte offset of the
    first problem.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 or data[:4] != _MAGIC:
        raise FormatError(f"{path}: bad magic at offset 0")
    if len(data) < 5:
        raise FormatError(f"{path}: missing dtype byte at offset 4")
    code = data[4]
    if code not in _DTYPES:
        raise FormatError(f"{path}: unknown dtype code {code} at offset 4")
    if len(data) < 6:
        raise FormatError(f"{path}: missing ndim byte at offset 5")
    ndim = data[5]
    if not 1 <= ndim <= 4:
        raise FormatError(f"{path}: ndim {ndim} out of range 1..4 at offset 5")
    dims_end = 6 + 4 * ndim
    if len(data) < dims_end:
        raise FormatError(f"{path}: truncated dims at offset 6")
    dims = struct.unpack(f"<{ndim}I", data[6:dims_end])
    for i, d in enumerate(dims):
        if d < 1:
            raise FormatError(f"{path}: dim {i} is 0 at offset {6 + 4 * i}")
    dt = _DTYPES[code]
    expected = int(np.prod(dims)) * dt.itemsize
    actual = len(data) - dims_end
    if actual != expected:
        raise FormatError(
            f"{path}: payload at offset {dims_end} holds {actual} bytes, "
            f"header promises {expected}"
        )
    flat = np.frombuffer(data, dtype=dt, offset=dims_end)
    return flat.reshape(dims).copy()

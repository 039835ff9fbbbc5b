"""Binary persistence for lattice fields and scattering data.

Both formats share one little-endian header

    magic (8 bytes) | u32 version | u32 N1 | u32 N2 | f64 L1 | f64 L2 | u8 space-tag

followed by row-major complex128 samples (re, im as f64).  Field files use the
magic ``KPGRID1\\0``; scattering files use ``KPSC1\\0\\0\\0`` and store the
xi1 < 0 half then the xi1 > 0 half, each in xi1-ascending order.  A
scattering file may end with the tag ``SMTH`` and one more full array (the
Born transform used as the smooth part of the interpolant).
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .errors import FormatError
from .lattice import ComplexField2D, Lattice2D, Space
from .scattering import ScatteringGrid

GRID_MAGIC = b"KPGRID1\0"
SCATTERING_MAGIC = b"KPSC1\0\0\0"
VERSION = 1
SMOOTH_TAG = b"SMTH"

_HEADER = struct.Struct("<8sIIIddB")
_C128 = np.dtype("<c16")


def _header(magic, lattice, space_tag):
    return _HEADER.pack(magic, VERSION, lattice.count_1, lattice.count_2,
                        float(lattice.length_1), float(lattice.length_2), space_tag)


def _write(path, chunks):
    tmp = f"{path}.partial"
    try:
        with open(tmp, "wb") as fh:
            for c in chunks:
                fh.write(c)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _array_bytes(a):
    return np.ascontiguousarray(a, dtype=_C128).tobytes()


def _parse_header(blob, magic, path):
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(blob)} bytes)")
    got, version, n1, n2, l1, l2, tag = _HEADER.unpack_from(blob)
    if got != magic:
        raise FormatError(f"{path}: bad magic {got!r}, expected {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if tag not in (0, 1):
        raise FormatError(f"{path}: bad space tag {tag}")
    try:
        lattice = Lattice2D(l1, l2, n1, n2)
    except ValueError as exc:
        raise FormatError(f"{path}: invalid lattice header ({exc})") from None
    return lattice, tag


def _read_array(blob, offset, shape, path):
    size = shape[0] * shape[1] * _C128.itemsize
    if len(blob) < offset + size:
        raise FormatError(f"{path}: truncated data ({len(blob) - offset} of {size} bytes)")
    arr = np.frombuffer(blob, dtype=_C128, count=shape[0] * shape[1], offset=offset)
    return arr.reshape(shape).astype(complex), offset + size


def save_grid(path, field: ComplexField2D):
    tag = 1 if field.space is Space.SPECTRAL else 0
    _write(path, [_header(GRID_MAGIC, field.lattice, tag), _array_bytes(field.samples)])


def load_grid(path, expect_shape=None) -> ComplexField2D:
    with open(path, "rb") as fh:
        blob = fh.read()
    lattice, tag = _parse_header(blob, GRID_MAGIC, path)
    if expect_shape is not None and tuple(expect_shape) != lattice.shape:
        raise FormatError(f"{path}: lattice {lattice.shape} does not match expected {tuple(expect_shape)}")
    samples, end = _read_array(blob, _HEADER.size, lattice.shape, path)
    if end != len(blob):
        raise FormatError(f"{path}: {len(blob) - end} trailing bytes")
    return ComplexField2D(lattice, samples, Space.SPECTRAL if tag else Space.PHYSICAL)


def save_scattering(path, grid: ScatteringGrid):
    chunks = [_header(SCATTERING_MAGIC, grid.xi_lattice, 1),
              _array_bytes(grid.samples_minus), _array_bytes(grid.samples_plus)]
    if grid.smooth_part is not None:
        chunks += [SMOOTH_TAG, _array_bytes(grid.smooth_part)]
    _write(path, chunks)


def load_scattering(path, interpolation="rbf") -> ScatteringGrid:
    with open(path, "rb") as fh:
        blob = fh.read()
    lattice, _ = _parse_header(blob, SCATTERING_MAGIC, path)
    half = (lattice.count_1 // 2, lattice.count_2)
    minus, off = _read_array(blob, _HEADER.size, half, path)
    plus, off = _read_array(blob, off, half, path)
    smooth = None
    if off < len(blob):
        if blob[off:off + len(SMOOTH_TAG)] != SMOOTH_TAG:
            raise FormatError(f"{path}: {len(blob) - off} trailing bytes")
        smooth, off = _read_array(blob, off + len(SMOOTH_TAG), lattice.shape, path)
        if off != len(blob):
            raise FormatError(f"{path}: {len(blob) - off} trailing bytes")
    return ScatteringGrid.from_halves(lattice, minus, plus, interpolation=interpolation, smooth_part=smooth)

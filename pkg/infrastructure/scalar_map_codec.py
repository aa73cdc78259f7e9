import struct
from pathlib import Path
from typing import Union

import numpy as np

from domain.domain_exceptions import SchemaError
from domain.scalar_map import ScalarMap
from .atomic_files import write_bytes_atomic

MAGIC = b"TGMAP\0"
HEADER = struct.Struct('<II')
VALUE_DTYPE = np.dtype('<f4')


def encode_scalar_map(scalar_map: ScalarMap) -> bytes:
    """magic, ширина и высота (uint32 LE), затем float32 LE построчно"""
    values = np.ascontiguousarray(scalar_map.values, dtype=VALUE_DTYPE)
    return MAGIC + HEADER.pack(scalar_map.width, scalar_map.height) + values.tobytes()


def decode_scalar_map(data: bytes, path: str = "<memory>") -> ScalarMap:
    if not data.startswith(MAGIC):
        raise SchemaError(path, "magic", "not a TGMAP file")
    offset = len(MAGIC)
    if len(data) < offset + HEADER.size:
        raise SchemaError(path, "header", "truncated header")
    width, height = HEADER.unpack_from(data, offset)
    payload = data[offset + HEADER.size:]
    expected = width * height * VALUE_DTYPE.itemsize
    if len(payload) != expected:
        raise SchemaError(path, "values", f"expected {expected} bytes for {width}x{height}, got {len(payload)}")
    values = np.frombuffer(payload, dtype=VALUE_DTYPE).reshape(height, width)
    return ScalarMap(values.astype(np.float32))


def write_scalar_map(path: Union[str, Path], scalar_map: ScalarMap) -> None:
    write_bytes_atomic(path, encode_scalar_map(scalar_map))


def read_scalar_map(path: Union[str, Path]) -> ScalarMap:
    with open(path, 'rb') as f:
        return decode_scalar_map(f.read(), str(path))


def encode_pgm(scalar_map: ScalarMap) -> bytes:
    """Бинарный PGM (P5): значения [0, 1] переводятся в 0..255"""
    pixels = np.clip(np.rint(scalar_map.values.astype(np.float64) * 255.0), 0, 255).astype(np.uint8)
    header = f"P5\n{scalar_map.width} {scalar_map.height}\n255\n".encode('ascii')
    return header + pixels.tobytes()

"""Binary parameter snapshots: magic ``MMW1``, tensor count, then per tensor
(rank, dims as little-endian u32, data as little-endian f32 row-major).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from mmcrt.errors import InputValidationError

MAGIC = b"MMW1"


def pack_tensors(tensors: list) -> bytes:
    chunks = [MAGIC, struct.pack("<I", len(tensors))]
    for t in tensors:
        arr = np.ascontiguousarray(t, dtype="<f4")
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.tobytes(order="C"))
    return b"".join(chunks)


def unpack_tensors(blob: bytes, offset: int = 0):
    """Returns (tensors, next_offset)."""
    if blob[offset:offset + 4] != MAGIC:
        raise InputValidationError(f"bad magic {blob[offset:offset + 4]!r} in parameter snapshot")
    offset += 4
    (count,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    tensors = []
    for _ in range(count):
        (rank,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        dims = struct.unpack_from(f"<{rank}I", blob, offset)
        offset += 4 * rank
        size = int(np.prod(dims)) if rank else 1
        arr = np.frombuffer(blob, dtype="<f4", count=size, offset=offset).reshape(dims)
        offset += 4 * size
        tensors.append(np.ascontiguousarray(arr))
    return tensors, offset


def write_tensors(path, tensors: list) -> None:
    Path(path).write_bytes(pack_tensors(tensors))


def read_tensors(path) -> list:
    blob = Path(path).read_bytes()
    tensors, offset = unpack_tensors(blob)
    if offset != len(blob):
        raise InputValidationError(f"{path}: {len(blob) - offset} trailing bytes")
    return tensors

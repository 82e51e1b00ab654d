"""Binary parameter checkpoints.

Layout, all little-endian: magic b"LVNN1", then one record per tensor:
u64 name length, utf-8 name bytes, u64 rank, u64 dims, raw float64 data.
Records run to end of file; their order is the module's parameter order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .module import Module

MAGIC = b"LVNN1"


class CheckpointError(RuntimeError):
    pass


def save_params(module: Module, path) -> None:
    chunks = [MAGIC]
    for name, param in module.named_params():
        raw = name.encode("utf-8")
        arr = np.ascontiguousarray(param.data, dtype="<f8")
        chunks.append(struct.pack("<Q", len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack("<Q", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        chunks.append(arr.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def read_tensors(path) -> dict[str, np.ndarray]:
    blob = Path(path).read_bytes()
    if not blob.startswith(MAGIC):
        raise CheckpointError(f"{path}: bad magic, not a parameter checkpoint")
    out: dict[str, np.ndarray] = {}
    pos = len(MAGIC)
    def take(n):
        nonlocal pos
        if pos + n > len(blob):
            raise CheckpointError(f"{path}: truncated checkpoint")
        piece = blob[pos : pos + n]
        pos += n
        return piece
    while pos < len(blob):
        (name_len,) = struct.unpack("<Q", take(8))
        name = take(name_len).decode("utf-8")
        (rank,) = struct.unpack("<Q", take(8))
        dims = struct.unpack(f"<{rank}Q", take(8 * rank)) if rank else ()
        count = int(np.prod(dims)) if dims else 1
        data = np.frombuffer(take(8 * count), dtype="<f8").reshape(dims)
        out[name] = data.astype(np.float64)
    return out


def load_params(module: Module, path) -> None:
    tensors = read_tensors(path)
    for name, param in module.named_params():
        if name not in tensors:
            raise CheckpointError(f"{path}: missing tensor '{name}'")
        data = tensors.pop(name)
        if data.shape != param.data.shape:
            raise CheckpointError(
                f"{path}: tensor '{name}' has shape {data.shape}, "
                f"model expects {param.data.shape}"
            )
        param.data[...] = data
    if tensors:
        extra = ", ".join(sorted(tensors))
        raise CheckpointError(f"{path}: unexpected tensors: {extra}")

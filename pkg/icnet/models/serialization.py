"""``params.bin``: named float64 tensors in a small little-endian container.

Layout: magic ``b"ICNP"``, uint32 version, uint32 tensor count, then per tensor a
uint32 name length, the UTF-8 name, uint32 ndim, ndim uint32 extents and the
row-major float64 elements.
"""

from pathlib import Path

import numpy as np
from loguru import logger

from icnet.errors import FormatError
from icnet.nn.module import Module

MAGIC = b"ICNP"
VERSION = 1
_U32 = np.dtype("<u4")
_F64 = np.dtype("<f8")


def _u32(*values: int) -> bytes:
    return np.array(values, dtype=_U32).tobytes()


def encode_params(named: list[tuple[str, np.ndarray]]) -> bytes:
    chunks = [MAGIC, _u32(VERSION, len(named))]
    for name, data in named:
        raw_name = name.encode("utf-8")
        chunks.append(_u32(len(raw_name)))
        chunks.append(raw_name)
        chunks.append(_u32(data.ndim, *data.shape))
        chunks.append(np.ascontiguousarray(data, dtype=_F64).tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, raw: bytes):
        self.raw = raw
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.raw):
            raise FormatError(f"truncated {what}", self.offset)
        chunk = self.raw[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def u32(self, count: int, what: str) -> list[int]:
        return np.frombuffer(self.take(4 * count, what), dtype=_U32).tolist()


def decode_params(raw: bytes) -> dict[str, np.ndarray]:
    reader = _Reader(raw)
    if reader.take(4, "magic") != MAGIC:
        raise FormatError("not a params file (bad magic)", 0)
    version, count = reader.u32(2, "header")
    if version != VERSION:
        raise FormatError(f"unsupported params version {version}", 4)
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = reader.u32(1, "name length")
        name = reader.take(name_len, "name").decode("utf-8")
        (ndim,) = reader.u32(1, "rank")
        shape = tuple(reader.u32(ndim, "extents"))
        size = int(np.prod(shape, dtype=np.int64))
        data = np.frombuffer(reader.take(8 * size, f"data of {name}"), dtype=_F64)
        tensors[name] = data.reshape(shape).astype(np.float64)
    if reader.offset != len(raw):
        raise FormatError("trailing bytes after last tensor", reader.offset)
    return tensors


def save_params(module: Module, path: str | Path) -> Path:
    """Write parameters and buffers (running statistics, fixed w') of ``module``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    named = [(name, t.data) for name, t in module.named_state()]
    path.write_bytes(encode_params(named))
    logger.success(f"Saved {len(named)} tensors to {path}")
    return path


def load_params(module: Module, path: str | Path) -> Module:
    """Copy tensors from ``path`` into ``module`` in place; names and shapes must match."""
    path = Path(path)
    stored = decode_params(path.read_bytes())
    state = dict(module.named_state())
    missing = sorted(set(state) - set(stored))
    unexpected = sorted(set(stored) - set(state))
    if missing or unexpected:
        raise FormatError(f"tensor names differ: missing {missing}, unexpected {unexpected}", 0)
    for name, tensor in state.items():
        if stored[name].shape != tensor.shape:
            raise FormatError(f"{name}: stored shape {stored[name].shape} != {tensor.shape}", 0)
        tensor.data[...] = stored[name]
    logger.info(f"Loaded {len(state)} tensors from {path}")
    return module

"""Readers and writers for the MNIST IDX and CIFAR-10 binary formats.

IDX: big-endian magic (0x00000803 for uint8 images of rank 3, 0x00000801 for uint8
labels of rank 1), one big-endian uint32 per dimension, then raw bytes.
CIFAR-10: records of 3073 bytes, a label byte followed by 1024 R, 1024 G and 1024 B
pixel bytes in row-major order.
"""

import gzip
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np
from loguru import logger

from icnet.data.data_models import LabeledDataset
from icnet.errors import ContractError, FormatError

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
CIFAR_RECORD = 3073
CIFAR_SHAPE = (3, 32, 32)

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}
CIFAR_FILES = {
    "train": tuple(f"data_batch_{i}.bin" for i in range(1, 6)),
    "test": ("test_batch.bin",),
}
DEFAULT_SUBSETS = {"train": 10_000, "test": 2_000}


def _read_bytes(path: Path) -> bytes:
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def _parse_idx(raw: bytes, magic: int, rank: int) -> np.ndarray:
    if len(raw) < 4:
        raise FormatError(f"file too short for an IDX header ({len(raw)} bytes)", 0)
    found = int.from_bytes(raw[:4], "big")
    if found != magic:
        raise FormatError(f"bad IDX magic 0x{found:08x}, expected 0x{magic:08x}", 0)
    header_end = 4 + 4 * rank
    if len(raw) < header_end:
        raise FormatError("truncated IDX dimensions", len(raw))
    dims = tuple(int(d) for d in np.frombuffer(raw[4:header_end], dtype=">u4"))
    size = int(np.prod(dims, dtype=np.int64))
    if len(raw) < header_end + size:
        raise FormatError(f"truncated IDX payload: {size} bytes expected", len(raw))
    if len(raw) > header_end + size:
        raise FormatError("trailing bytes after IDX payload", header_end + size)
    return np.frombuffer(raw, dtype=np.uint8, count=size, offset=header_end).reshape(dims)


def load_idx(
    images_path: str | Path, labels_path: str | Path, split: str = "train", name: str = "mnist"
) -> LabeledDataset:
    """Parse an IDX image/label pair into [N, 1, H, W] values in [0, 1]."""
    images = _parse_idx(_read_bytes(Path(images_path)), IDX_IMAGES_MAGIC, 3)
    labels = _parse_idx(_read_bytes(Path(labels_path)), IDX_LABELS_MAGIC, 1)
    if images.shape[0] != labels.shape[0]:
        raise FormatError(f"{images.shape[0]} images but {labels.shape[0]} labels", 4)
    if labels.size and labels.max() > 9:
        bad = int(np.argmax(labels > 9))
        raise FormatError(f"label {labels[bad]} outside 0-9", 8 + bad)
    logger.info(f"Loaded {images.shape[0]} {name}/{split} examples from {images_path}")
    return LabeledDataset(
        images=images[:, None, :, :] / 255.0, labels=labels, num_classes=10, split=split, name=name
    )


def load_cifar10_bin(
    paths: Sequence[str | Path], split: str = "train", name: str = "cifar10"
) -> LabeledDataset:
    """Concatenate CIFAR-10 binary batches into [N, 3, 32, 32] values in [0, 1]."""
    images, labels = [], []
    for path in paths:
        raw = _read_bytes(Path(path))
        if len(raw) == 0 or len(raw) % CIFAR_RECORD:
            raise FormatError(
                f"{path}: size {len(raw)} is not a positive multiple of {CIFAR_RECORD}",
                len(raw) - len(raw) % CIFAR_RECORD,
            )
        records = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR_RECORD)
        bad = np.flatnonzero(records[:, 0] > 9)
        if bad.size:
            raise FormatError(
                f"{path}: label {records[bad[0], 0]} outside 0-9", int(bad[0]) * CIFAR_RECORD
            )
        labels.append(records[:, 0])
        images.append(records[:, 1:].reshape(-1, *CIFAR_SHAPE))
    if not images:
        raise ContractError("load_cifar10_bin needs at least one batch file")
    logger.info(f"Loaded {sum(len(x) for x in labels)} {name}/{split} examples")
    return LabeledDataset(
        images=np.concatenate(images) / 255.0,
        labels=np.concatenate(labels),
        num_classes=10,
        split=split,
        name=name,
    )


def _to_bytes(images: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(images, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_idx(ds: LabeledDataset, images_path: str | Path, labels_path: str | Path) -> None:
    """Write single-channel images (values in [0, 1]) and labels as an IDX pair."""
    if ds.images.ndim != 4 or ds.images.shape[1] != 1:
        raise ContractError(f"IDX holds single-channel images, got {ds.images.shape}")
    pixels = _to_bytes(ds.images[:, 0])
    n, h, w = pixels.shape
    header = IDX_IMAGES_MAGIC.to_bytes(4, "big") + np.array([n, h, w], dtype=">u4").tobytes()
    Path(images_path).write_bytes(header + pixels.tobytes())
    header = IDX_LABELS_MAGIC.to_bytes(4, "big") + np.array([n], dtype=">u4").tobytes()
    Path(labels_path).write_bytes(header + ds.labels.astype(np.uint8).tobytes())


def write_cifar10_bin(ds: LabeledDataset, path: str | Path) -> None:
    if ds.images.shape[1:] != CIFAR_SHAPE:
        raise ContractError(f"CIFAR-10 records hold {CIFAR_SHAPE} images, got {ds.images.shape}")
    pixels = _to_bytes(ds.images).reshape(len(ds), -1)
    records = np.concatenate([ds.labels.astype(np.uint8)[:, None], pixels], axis=1)
    Path(path).write_bytes(records.tobytes())


def _find(data_dir: Path, names: Sequence[str], sub: str) -> list[Path]:
    found = []
    for name in names:
        candidates = [
            base / f for base in (data_dir / sub, data_dir) for f in (name, f"{name}.gz")
        ]
        path = next((c for c in candidates if c.exists()), None)
        if path is None:
            raise FileNotFoundError(f"{name} not found under {data_dir} or {data_dir / sub}")
        found.append(path)
    return found


def load_mnist(
    data_dir: str | Path, split: str = "train", subset: int | None = None
) -> LabeledDataset:
    """MNIST from ``data_dir`` (or ``data_dir/mnist``), first ``subset`` examples."""
    images_path, labels_path = _find(Path(data_dir), MNIST_FILES[split], "mnist")
    return _subset(load_idx(images_path, labels_path, split), subset)


def load_cifar10(
    data_dir: str | Path, split: str = "train", subset: int | None = None
) -> LabeledDataset:
    """CIFAR-10 from ``data_dir`` (or ``data_dir/cifar-10-batches-bin``)."""
    paths = _find(Path(data_dir), CIFAR_FILES[split], "cifar-10-batches-bin")
    return _subset(load_cifar10_bin(paths, split), subset)


def _subset(ds: LabeledDataset, subset: int | None) -> LabeledDataset:
    if subset is not None and subset > len(ds):
        logger.warning(f"Subset {subset} exceeds {len(ds)} {ds.name}/{ds.split} examples")
    return ds.take(subset)


DATASET_LOADERS: dict[str, Callable[..., LabeledDataset]] = {
    "mnist": load_mnist,
    "cifar10": load_cifar10,
}

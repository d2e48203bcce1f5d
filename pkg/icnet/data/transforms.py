import numpy as np
from pydantic import BaseModel, Field

from icnet.data.data_models import LabeledDataset
from icnet.errors import ContractError


def channel_stats(ds: LabeledDataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean and (population) standard deviation of an image dataset."""
    if ds.images.ndim != 4:
        raise ContractError(f"channel_stats needs [N, C, H, W] images, got {ds.images.shape}")
    axes = (0, 2, 3)
    return ds.images.mean(axis=axes), ds.images.std(axis=axes)


def _per_channel(ds: LabeledDataset, values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    channels = ds.images.shape[1]
    if values.size == 1:
        values = np.full(channels, values[0])
    if values.size != channels:
        raise ContractError(f"{values.size} per-channel values for {channels} channels")
    shape = (1, channels) + (1,) * (ds.images.ndim - 2)
    return values.reshape(shape)


def normalize(ds: LabeledDataset, mean, std) -> LabeledDataset:
    """(x - mean) / std channelwise."""
    std = _per_channel(ds, std)
    if np.any(std <= 0):
        raise ContractError("normalize needs a positive standard deviation in every channel")
    return ds.with_images((ds.images - _per_channel(ds, mean)) / std)


def denormalize(ds: LabeledDataset, mean, std) -> LabeledDataset:
    return ds.with_images(ds.images * _per_channel(ds, std) + _per_channel(ds, mean))


class Augmenter(BaseModel):
    """Zero-pad, random crop back to size and random horizontal flip.

    Each example draws from a generator seeded by (seed, epoch, index), so the stream
    is reproducible and independent of batch composition.
    """

    seed: int = 0
    pad: int = Field(default=4, ge=0)
    flip_prob: float = Field(default=0.5, ge=0.0, le=1.0)

    def apply(self, images: np.ndarray, epoch: int, indices: np.ndarray) -> np.ndarray:
        """Augment a batch of [B, C, H, W] ``images`` whose dataset positions are ``indices``."""
        if self.pad == 0 and self.flip_prob == 0:
            return images
        _, _, h, w = images.shape
        p = self.pad
        padded = np.pad(images, ((0, 0), (0, 0), (p, p), (p, p))) if p else images
        out = np.empty_like(images)
        for row, index in enumerate(indices):
            rng = np.random.default_rng((self.seed, epoch, int(index)))
            dy, dx = rng.integers(0, 2 * p + 1, size=2) if p else (0, 0)
            crop = padded[row, :, dy : dy + h, dx : dx + w]
            if rng.random() < self.flip_prob:
                crop = crop[:, :, ::-1]
            out[row] = crop
        return out

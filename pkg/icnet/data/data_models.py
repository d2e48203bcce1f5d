from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from icnet.engine.tensor import Tensor


class LabeledDataset(BaseModel):
    """Examples ``images`` ([N, C, H, W] or [N, D]) with integer ``labels`` of length N."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    images: np.ndarray
    labels: np.ndarray
    num_classes: int
    split: str = "train"
    name: str = "dataset"

    @field_validator("images", "labels", mode="before")
    @classmethod
    def as_array(cls, value) -> np.ndarray:
        return np.asarray(value)

    @model_validator(mode="after")
    def check_contents(self) -> "LabeledDataset":
        self.images = np.ascontiguousarray(self.images, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        n = self.images.shape[0] if self.images.ndim else 0
        if n == 0:
            raise ValueError(f"{self.name}/{self.split} is empty")
        if self.images.ndim not in (2, 4):
            raise ValueError(f"images must be [N, D] or [N, C, H, W], got {self.images.shape}")
        if self.labels.shape[0] != n:
            raise ValueError(f"{self.labels.shape[0]} labels for {n} examples")
        if self.labels.min() < 0 or self.labels.max() >= self.num_classes:
            raise ValueError(f"labels must lie in [0, {self.num_classes})")
        if not np.all(np.isfinite(self.images)):
            raise ValueError(f"{self.name}/{self.split} holds non-finite values")
        return self

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def example_shape(self) -> tuple[int, ...]:
        return self.images.shape[1:]

    def take(self, count: int | None) -> "LabeledDataset":
        """The first ``count`` examples (all of them when ``count`` is None)."""
        if count is None or count >= len(self):
            return self
        return self.model_copy(
            update={"images": self.images[:count].copy(), "labels": self.labels[:count].copy()}
        )

    def with_images(self, images: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            images=images,
            labels=self.labels,
            num_classes=self.num_classes,
            split=self.split,
            name=self.name,
        )

    def batch(self, indices: Sequence[int] | np.ndarray) -> tuple[Tensor, np.ndarray]:
        indices = np.asarray(indices, dtype=np.int64)
        return Tensor(self.images[indices]), self.labels[indices]

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from icnet.engine.tensor import Tensor


class ConvParams(BaseModel):
    """Filter bank of a k x k convolution, weight shape [C_out, C_in, k, k]."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    weight: Tensor
    bias: Tensor | None = None
    stride: int = Field(default=1, ge=1)
    padding: int = Field(default=0, ge=0)

    @field_validator("weight")
    @classmethod
    def square_kernel(cls, weight: Tensor) -> Tensor:
        if weight.ndim != 4 or weight.shape[2] != weight.shape[3] or weight.shape[2] < 1:
            raise ValueError(f"conv weight must be [C_out, C_in, k, k], got {weight.shape}")
        return weight

    @property
    def kernel(self) -> int:
        return self.weight.shape[2]

    @property
    def in_channels(self) -> int:
        return self.weight.shape[1]

    @property
    def out_channels(self) -> int:
        return self.weight.shape[0]


class BatchNormState(BaseModel):
    """Per-channel affine parameters and running statistics of a batch norm."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    gamma: Tensor
    beta: Tensor
    running_mean: Tensor
    running_var: Tensor
    momentum: float = Field(default=0.1, gt=0.0, lt=1.0)
    epsilon: float = Field(default=1e-5, gt=0.0)
    mode: Literal["train", "eval"] = "train"

    @classmethod
    def fresh(cls, channels: int, **kwargs) -> "BatchNormState":
        """gamma = 1, beta = 0, running mean 0 / variance 1."""
        return cls(
            gamma=Tensor([1.0] * channels, requires_grad=True, name="gamma"),
            beta=Tensor([0.0] * channels, requires_grad=True, name="beta"),
            running_mean=Tensor([0.0] * channels),
            running_var=Tensor([1.0] * channels),
            **kwargs,
        )

    @property
    def channels(self) -> int:
        return self.gamma.shape[0]

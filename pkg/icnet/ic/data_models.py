from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from icnet.engine.tensor import Tensor
from icnet.nn.data_models import BatchNormState, ConvParams

ICMode = Literal["grouped", "scalar"]
BlockKind = Literal["basic", "bottleneck", "plain"]

BLOCK_KERNELS = {"basic": (3, 3), "bottleneck": (1, 3, 1)}


class ICDenseParams(BaseModel):
    """Weights of a layer of IC neurons: y = f(Wx + b1 + relu(Wx - w' * sum(x) + b2))."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    weight: Tensor
    w_prime: Tensor
    bias_main: Tensor | None = None
    bias_inner: Tensor | None = None
    learn_w_prime: bool = True

    @model_validator(mode="after")
    def check_shapes(self) -> "ICDenseParams":
        if self.weight.ndim != 2:
            raise ValueError(f"weight must be [M, N], got {self.weight.shape}")
        m = self.weight.shape[0]
        if self.w_prime.shape != (m,):
            raise ValueError(f"w_prime must have shape ({m},), got {self.w_prime.shape}")
        for name in ("bias_main", "bias_inner"):
            bias = getattr(self, name)
            if bias is not None and bias.shape != (m,):
                raise ValueError(f"{name} must have shape ({m},), got {bias.shape}")
        if not self.learn_w_prime:
            self.w_prime.requires_grad = False
        return self


class ICConvParams(BaseModel):
    """IC kernel [w, w']: a filter bank plus w' per (output, input) channel or per output."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    conv: ConvParams
    w_prime: Tensor
    mode: ICMode = "grouped"
    learn_w_prime: bool = True

    @model_validator(mode="after")
    def check_w_prime(self) -> "ICConvParams":
        c_out, c_in = self.conv.out_channels, self.conv.in_channels
        expected = (c_out, c_in) if self.mode == "grouped" else (c_out,)
        if self.w_prime.shape != expected:
            raise ValueError(
                f"{self.mode} w_prime must have shape {expected}, got {self.w_prime.shape}"
            )
        if not self.learn_w_prime:
            self.w_prime.requires_grad = False
        return self


class BlockParams(BaseModel):
    """Constituents of a residual block (basic / bottleneck) or a conv + BN unit (plain).

    Convolutions may be IC layers, which is how the layer-replacement variant of a
    residual network is represented.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: BlockKind
    convs: list[ConvParams | ICConvParams]
    bns: list[BatchNormState]
    shortcut: ConvParams | None = None
    shortcut_bn: BatchNormState | None = None
    stride: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_structure(self) -> "BlockParams":
        if len(self.convs) != len(self.bns):
            raise ValueError("every block convolution needs its batch norm")
        kernels = tuple(base_conv(c).kernel for c in self.convs)
        expected = BLOCK_KERNELS.get(self.kind)
        if expected is not None and kernels != expected:
            raise ValueError(f"{self.kind} block needs kernels {expected}, got {kernels}")
        if self.kind == "plain" and len(self.convs) != 1:
            raise ValueError("plain block holds exactly one convolution")
        return self

    @property
    def out_channels(self) -> int:
        return base_conv(self.convs[-1]).out_channels


class ICBlockParams(BlockParams):
    """Block whose last-layer output is combined with the rough feature of the block input."""

    combine_bn: BatchNormState | None = None


def base_conv(params: ConvParams | ICConvParams) -> ConvParams:
    return params.conv if isinstance(params, ICConvParams) else params

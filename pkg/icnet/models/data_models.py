from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from icnet.ic.data_models import ICMode

LayerKind = Literal[
    "conv",
    "ic_conv",
    "dense",
    "ic_dense",
    "bn",
    "relu",
    "pool",
    "flatten",
    "basic_block",
    "ic_basic_block",
    "bottleneck_block",
    "ic_bottleneck_block",
    "plain_block",
    "ic_plain_block",
]
PoolKind = Literal["max", "avg", "global_avg"]

CONV_KINDS = {"conv", "ic_conv"}
DENSE_KINDS = {"dense", "ic_dense"}
BLOCK_KINDS = {
    "basic_block",
    "ic_basic_block",
    "bottleneck_block",
    "ic_bottleneck_block",
    "plain_block",
    "ic_plain_block",
}
IC_KINDS = {"ic_conv", "ic_dense", "ic_basic_block", "ic_bottleneck_block", "ic_plain_block"}
SIZED_KINDS = CONV_KINDS | DENSE_KINDS | BLOCK_KINDS


class LayerSpec(BaseModel):
    """One entry of a model spec. Fields that do not apply to ``kind`` are ignored."""

    model_config = ConfigDict(extra="forbid")

    kind: LayerKind
    channels: int | None = Field(default=None, ge=1, description="Output channels or width")
    kernel: int = Field(default=3, ge=1)
    stride: int | None = Field(default=None, ge=1, description="Default 1; pools default to kernel")
    padding: int | None = Field(default=None, ge=0, description="Default kernel // 2; pools 0")
    bias: bool | None = Field(default=None, description="Default on for dense, off for convs")
    ic_mode: ICMode = "grouped"
    ic_layers: bool = Field(default=False, description="Use IC convolutions inside a block")
    learn_w_prime: bool = True
    pool_kind: PoolKind = "max"
    width: int | None = Field(default=None, ge=1, description="Bottleneck inner width")

    @model_validator(mode="after")
    def check_kind_fields(self) -> "LayerSpec":
        if self.kind in SIZED_KINDS and self.channels is None:
            raise ValueError(f"{self.kind} needs 'channels'")
        if self.kind == "ic_conv" and self.kernel < 2:
            raise ValueError("ic_conv needs kernel >= 2; keep 1x1 convolutions plain")
        return self

    @property
    def is_ic(self) -> bool:
        return self.kind in IC_KINDS

    def resolved_stride(self) -> int:
        if self.stride is not None:
            return self.stride
        return self.kernel if self.kind == "pool" else 1

    def resolved_padding(self) -> int:
        if self.padding is not None:
            return self.padding
        return 0 if self.kind == "pool" else self.kernel // 2

    def resolved_bias(self) -> bool:
        return self.bias if self.bias is not None else self.kind in DENSE_KINDS


class ModelSpec(BaseModel):
    """Declarative network: an input shape (without batch) and a layer sequence."""

    model_config = ConfigDict(extra="forbid")

    name: str
    input_shape: tuple[int, ...] = Field(description="[C, H, W] for images, [D] for vectors")
    num_classes: int = Field(ge=1)
    layers: list[LayerSpec] = Field(min_length=1)

    @model_validator(mode="after")
    def check_input_shape(self) -> "ModelSpec":
        if len(self.input_shape) not in (1, 3) or min(self.input_shape) < 1:
            raise ValueError(f"input_shape must be [D] or [C, H, W], got {list(self.input_shape)}")
        return self


class LayerCost(BaseModel):
    """Analytic cost of one layer for a single input example."""

    index: int
    kind: str
    output_shape: tuple[int, ...]
    params: int = 0
    macs: int = 0
    elementwise_ops: int = 0
    ic_params: int = Field(default=0, description="Share of params added by the IC structure")
    ic_macs: int = Field(default=0, description="Share of macs added by the IC structure")


class CostReport(BaseModel):
    model_name: str
    input_shape: tuple[int, ...]
    layers: list[LayerCost]
    total_params: int
    total_macs: int
    total_elementwise_ops: int
    total_ic_params: int
    total_ic_macs: int

    @classmethod
    def from_layers(
        cls, model_name: str, input_shape: tuple[int, ...], layers: list[LayerCost]
    ) -> "CostReport":
        return cls(
            model_name=model_name,
            input_shape=input_shape,
            layers=layers,
            total_params=sum(c.params for c in layers),
            total_macs=sum(c.macs for c in layers),
            total_elementwise_ops=sum(c.elementwise_ops for c in layers),
            total_ic_params=sum(c.ic_params for c in layers),
            total_ic_macs=sum(c.ic_macs for c in layers),
        )

    @model_validator(mode="after")
    def check_totals(self) -> "CostReport":
        if self.total_params != sum(c.params for c in self.layers):
            raise ValueError("total_params does not equal the per-layer sum")
        if self.total_macs != sum(c.macs for c in self.layers):
            raise ValueError("total_macs does not equal the per-layer sum")
        return self

    @property
    def total_flops(self) -> int:
        """Two FLOPs per multiply-accumulate."""
        return 2 * self.total_macs


class LayerDelta(BaseModel):
    index: int
    baseline_kind: str
    variant_kind: str
    added_params: int
    added_macs: int


class CostComparison(BaseModel):
    """Cost of a variant relative to its baseline."""

    baseline: str
    variant: str
    added_params: int
    added_macs: int
    param_overhead: float
    mac_overhead: float
    layers: list[LayerDelta]

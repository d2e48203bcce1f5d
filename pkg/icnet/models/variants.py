"""Aligned baseline / IC-layer ("B") / IC-block versions of a model spec."""

from typing import Literal

from loguru import logger

from icnet.errors import SpecError
from icnet.models.data_models import IC_KINDS, LayerSpec, ModelSpec

ICVariant = Literal["none", "layer", "block"]

_BLOCK_MAP = {
    "basic_block": "ic_basic_block",
    "bottleneck_block": "ic_bottleneck_block",
    "plain_block": "ic_plain_block",
}


def _layer_variant(layer: LayerSpec) -> LayerSpec:
    """IC convolutions in place of every k >= 2 convolution, inside blocks too."""
    if layer.kind == "conv" and layer.kernel >= 2:
        return layer.model_copy(update={"kind": "ic_conv"})
    if layer.kind in ("basic_block", "bottleneck_block"):
        return layer.model_copy(update={"ic_layers": True})
    if layer.kind == "plain_block" and layer.kernel >= 2:
        return layer.model_copy(update={"ic_layers": True})
    return layer


def _block_variant(layer: LayerSpec) -> LayerSpec:
    """IC blocks in place of residual blocks and of plain blocks with k >= 2."""
    if layer.kind == "plain_block" and layer.kernel < 2:
        return layer
    if layer.kind in _BLOCK_MAP:
        return layer.model_copy(update={"kind": _BLOCK_MAP[layer.kind]})
    return layer


def paired_variants(spec: ModelSpec) -> tuple[ModelSpec, ModelSpec, ModelSpec]:
    """(baseline, B version, IC-block version) of a baseline spec.

    The three specs share layer count, order and shapes; they differ only in which
    layers carry the IC structure.

    Raises:
        SpecError: ``spec`` already holds IC layers, or one of the variants would be
            identical to the baseline.
    """
    for index, layer in enumerate(spec.layers):
        if layer.kind in IC_KINDS or layer.ic_layers:
            raise SpecError("paired variants start from a baseline spec", index, layer.kind)

    layer_spec = spec.model_copy(
        update={"name": f"{spec.name}-B", "layers": [_layer_variant(x) for x in spec.layers]}
    )
    block_spec = spec.model_copy(
        update={"name": f"ic-{spec.name}", "layers": [_block_variant(x) for x in spec.layers]}
    )
    if layer_spec.layers == spec.layers:
        raise SpecError(f"{spec.name} has no convolution with k >= 2 to replace")
    if block_spec.layers == spec.layers:
        raise SpecError(f"{spec.name} has no block to convert; use plain_block for conv + BN units")
    logger.debug(f"Paired variants of {spec.name}: {layer_spec.name}, {block_spec.name}")
    return spec, layer_spec, block_spec


def variant_for(spec: ModelSpec, ic: ICVariant) -> ModelSpec:
    """``spec`` itself for "none", else its B or IC-block version."""
    if ic == "none":
        return spec
    _, layer_spec, block_spec = paired_variants(spec)
    return {"layer": layer_spec, "block": block_spec}[ic]

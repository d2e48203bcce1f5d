from collections.abc import Iterator

import numpy as np
from loguru import logger

from icnet.engine.tensor import Tensor
from icnet.errors import DimensionError, SpecError
from icnet.models.data_models import BLOCK_KINDS, CONV_KINDS, DENSE_KINDS, ModelSpec
from icnet.models.layers import LAYER_BUILDERS, Layer, Shape
from icnet.nn.data_models import BatchNormState
from icnet.nn.module import Module

IMAGE_KINDS = CONV_KINDS | BLOCK_KINDS | {"bn", "pool"}


class Network(Module):
    """Sequential stack of layers built from a :class:`ModelSpec`."""

    def __init__(self, spec: ModelSpec, layers: list[Layer], shapes: list[Shape], seed: int):
        self.spec = spec
        self.layers = layers
        self.shapes = shapes
        self.seed = seed

    def forward(self, x: Tensor) -> Tensor:
        expected = tuple(self.spec.input_shape)
        if x.shape[1:] != expected:
            raise DimensionError(
                f"{self.spec.name}: expected input [N, *{list(expected)}], got {x.shape}"
            )
        for layer in self.layers:
            x = layer(x)
        return x

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        for layer in self.layers:
            yield from layer.named_parameters()

    def named_buffers(self) -> Iterator[tuple[str, Tensor]]:
        for layer in self.layers:
            yield from layer.named_buffers()

    def batch_norms(self) -> Iterator[BatchNormState]:
        for layer in self.layers:
            yield from layer.batch_norms()

    @property
    def output_shape(self) -> Shape:
        return self.shapes[-1]


def build_model(spec: ModelSpec, seed: int = 0) -> Network:
    """Instantiate every layer of ``spec`` and check that consecutive shapes compose.

    Each layer draws its weights from a generator seeded by (seed, layer index), so a
    layer gets the same initial weights in every variant that keeps its index and shape.

    Raises:
        SpecError: A layer does not accept the shape produced by its predecessor, or the
            final shape is not [num_classes].
    """
    shape: Shape = tuple(spec.input_shape)
    layers: list[Layer] = []
    shapes: list[Shape] = []
    for index, layer_spec in enumerate(spec.layers):
        if layer_spec.kind in IMAGE_KINDS and len(shape) != 3:
            raise SpecError(f"needs a [C, H, W] input, got {list(shape)}", index, layer_spec.kind)
        if layer_spec.kind in DENSE_KINDS and len(shape) != 1:
            raise SpecError(
                f"needs a flat input, got {list(shape)}; add a flatten layer",
                index,
                layer_spec.kind,
            )
        rng = np.random.default_rng([seed, index])
        layer = LAYER_BUILDERS[layer_spec.kind](index, layer_spec, shape, rng)
        shape = layer.output_shape(shape)
        layers.append(layer)
        shapes.append(shape)

    if shape != (spec.num_classes,):
        raise SpecError(
            f"network ends in shape {list(shape)}, expected [{spec.num_classes}] logits",
            len(spec.layers) - 1,
            spec.layers[-1].kind,
        )
    network = Network(spec, layers, shapes, seed)
    logger.debug(
        f"Built {spec.name} (seed {seed}): {len(layers)} layers, "
        f"{sum(p.size for p in network.parameters())} parameters"
    )
    return network

"""Layer modules built from :class:`LayerSpec` entries, with shape rules and analytic costs.

Shapes here exclude the batch axis. Costs are per example: ``macs`` counts
multiply-accumulates (window sums of the rough feature count one per term),
``elementwise_ops`` counts adds, comparisons and activations outside any MAC.
"""

from collections.abc import Callable, Iterator
from math import prod

import numpy as np

from icnet.engine.tensor import Tensor
from icnet.errors import SpecError
from icnet.ic.blocks import block_forward
from icnet.ic.data_models import BlockParams, ICBlockParams, ICConvParams, ICDenseParams, base_conv
from icnet.ic.functional import conv_forward, ic_dense_forward
from icnet.models.data_models import BLOCK_KINDS, LayerCost, LayerSpec
from icnet.nn.data_models import BatchNormState, ConvParams
from icnet.nn.functional import batch_norm, dense, flatten, global_avg_pool, output_extent, pool
from icnet.nn.module import Module

Shape = tuple[int, ...]


def he_normal(rng: np.random.Generator, shape: Shape, fan_in: int, name: str) -> Tensor:
    data = rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)
    return Tensor(data, requires_grad=True, name=name)


def make_conv(
    rng: np.random.Generator,
    c_in: int,
    c_out: int,
    k: int,
    stride: int = 1,
    padding: int = 0,
    bias: bool = False,
) -> ConvParams:
    weight = he_normal(rng, (c_out, c_in, k, k), c_in * k * k, "weight")
    b = Tensor(np.zeros(c_out), requires_grad=True, name="bias") if bias else None
    return ConvParams(weight=weight, bias=b, stride=stride, padding=padding)


def make_ic_conv(conv: ConvParams, spec: LayerSpec) -> ICConvParams:
    """Wrap ``conv`` as an IC kernel with every w' starting at 1."""
    shape = (
        (conv.out_channels, conv.in_channels) if spec.ic_mode == "grouped" else (conv.out_channels,)
    )
    w_prime = Tensor(np.ones(shape), requires_grad=spec.learn_w_prime, name="w_prime")
    return ICConvParams(
        conv=conv, w_prime=w_prime, mode=spec.ic_mode, learn_w_prime=spec.learn_w_prime
    )


def _conv_tensors(prefix: str, p: ConvParams | ICConvParams, trainable: bool):
    conv = base_conv(p)
    if trainable:
        yield f"{prefix}.weight", conv.weight
        if conv.bias is not None:
            yield f"{prefix}.bias", conv.bias
    if isinstance(p, ICConvParams) and p.learn_w_prime == trainable:
        yield f"{prefix}.w_prime", p.w_prime


def _bn_tensors(prefix: str, bn: BatchNormState, trainable: bool):
    if trainable:
        yield f"{prefix}.gamma", bn.gamma
        yield f"{prefix}.beta", bn.beta
    else:
        yield f"{prefix}.running_mean", bn.running_mean
        yield f"{prefix}.running_var", bn.running_var


def _require_image(layer: "Layer", shape: Shape) -> Shape:
    if len(shape) != 3:
        raise SpecError(f"needs a [C, H, W] input, got {list(shape)}", layer.index, layer.kind)
    return shape


def _conv_out(layer: "Layer", shape: Shape, conv: ConvParams) -> Shape:
    c, h, w = shape
    if c != conv.in_channels:
        raise SpecError(
            f"expects {conv.in_channels} input channels, got {c}", layer.index, layer.kind
        )
    ho = output_extent(h, conv.kernel, conv.stride, conv.padding)
    wo = output_extent(w, conv.kernel, conv.stride, conv.padding)
    if ho < 1 or wo < 1:
        raise SpecError(
            f"kernel {conv.kernel} does not fit a {h}x{w} input", layer.index, layer.kind
        )
    return conv.out_channels, ho, wo


def conv_cost(p: ConvParams | ICConvParams, out_shape: Shape) -> tuple[int, int, int, int, int]:
    """(params, macs, elementwise, ic_params, ic_macs) of a plain or IC convolution."""
    conv = base_conv(p)
    c_out, ho, wo = out_shape
    k, c_in, area = conv.kernel, conv.in_channels, out_shape[1] * out_shape[2]
    params = conv.weight.size + (conv.bias.size if conv.bias is not None else 0)
    macs = k * k * c_in * c_out * area
    elementwise = c_out * area if conv.bias is not None else 0
    ic_params = ic_macs = 0
    if isinstance(p, ICConvParams):
        ic_params = p.w_prime.size if p.learn_w_prime else 0
        rough = k * k * c_in * area
        mix = c_in * c_out * area if p.mode == "grouped" else (c_in + c_out) * area
        ic_macs = rough + mix
        elementwise += 3 * c_out * area
    return params + ic_params, macs + ic_macs, elementwise, ic_params, ic_macs


class Layer(Module):
    """A network stage built from one :class:`LayerSpec`."""

    def __init__(self, index: int, spec: LayerSpec):
        self.index = index
        self.spec = spec

    @property
    def kind(self) -> str:
        return self.spec.kind

    def output_shape(self, shape: Shape) -> Shape:
        return shape

    def cost(self, shape: Shape) -> LayerCost:
        return LayerCost(index=self.index, kind=self.kind, output_shape=self.output_shape(shape))

    def _prefix(self, *parts) -> str:
        return ".".join(["layers", str(self.index), *map(str, parts)])


class ConvLayer(Layer):
    def __init__(self, index: int, spec: LayerSpec, params: ConvParams | ICConvParams):
        super().__init__(index, spec)
        self.params = params

    def forward(self, x: Tensor) -> Tensor:
        return conv_forward(x, self.params)

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        yield from _conv_tensors(self._prefix(), self.params, trainable=True)

    def named_buffers(self) -> Iterator[tuple[str, Tensor]]:
        yield from _conv_tensors(self._prefix(), self.params, trainable=False)

    def output_shape(self, shape: Shape) -> Shape:
        return _conv_out(self, _require_image(self, shape), base_conv(self.params))

    def cost(self, shape: Shape) -> LayerCost:
        out = self.output_shape(shape)
        params, macs, elementwise, ic_params, ic_macs = conv_cost(self.params, out)
        return LayerCost(
            index=self.index,
            kind=self.kind,
            output_shape=out,
            params=params,
            macs=macs,
            elementwise_ops=elementwise,
            ic_params=ic_params,
            ic_macs=ic_macs,
        )


class DenseLayer(Layer):
    def __init__(self, index: int, spec: LayerSpec, weight: Tensor, bias: Tensor | None):
        super().__init__(index, spec)
        self.weight = weight
        self.bias = bias

    def forward(self, x: Tensor) -> Tensor:
        return dense(x, self.weight, self.bias)

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        yield self._prefix("weight"), self.weight
        if self.bias is not None:
            yield self._prefix("bias"), self.bias

    def output_shape(self, shape: Shape) -> Shape:
        if len(shape) != 1 or shape[0] != self.weight.shape[1]:
            raise SpecError(
                f"expects a flat input of width {self.weight.shape[1]}, got {list(shape)}",
                self.index,
                self.kind,
            )
        return (self.weight.shape[0],)

    def cost(self, shape: Shape) -> LayerCost:
        out = self.output_shape(shape)
        d_out, d_in = self.weight.shape
        bias = 0 if self.bias is None else d_out
        return LayerCost(
            index=self.index,
            kind=self.kind,
            output_shape=out,
            params=self.weight.size + bias,
            macs=d_in * d_out,
            elementwise_ops=bias,
        )


class ICDenseLayer(DenseLayer):
    """Layer of IC neurons with identity output activation; follow it with a relu spec."""

    def __init__(self, index: int, spec: LayerSpec, params: ICDenseParams):
        super().__init__(index, spec, params.weight, params.bias_main)
        self.params = params

    def forward(self, x: Tensor) -> Tensor:
        return ic_dense_forward(x, self.params)

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        yield from super().named_parameters()
        if self.params.bias_inner is not None:
            yield self._prefix("bias_inner"), self.params.bias_inner
        if self.params.learn_w_prime:
            yield self._prefix("w_prime"), self.params.w_prime

    def named_buffers(self) -> Iterator[tuple[str, Tensor]]:
        if not self.params.learn_w_prime:
            yield self._prefix("w_prime"), self.params.w_prime

    def cost(self, shape: Shape) -> LayerCost:
        base = super().cost(shape)
        d_out, d_in = self.weight.shape
        ic_params = (d_out if self.params.learn_w_prime else 0) + (
            d_out if self.params.bias_inner is not None else 0
        )
        ic_macs = d_in + d_out
        return base.model_copy(
            update={
                "params": base.params + ic_params,
                "macs": base.macs + ic_macs,
                "elementwise_ops": base.elementwise_ops + 3 * d_out,
                "ic_params": ic_params,
                "ic_macs": ic_macs,
            }
        )


class BatchNormLayer(Layer):
    def __init__(self, index: int, spec: LayerSpec, state: BatchNormState):
        super().__init__(index, spec)
        self.state = state

    def forward(self, x: Tensor) -> Tensor:
        return batch_norm(x, self.state)

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        yield from _bn_tensors(self._prefix(), self.state, trainable=True)

    def named_buffers(self) -> Iterator[tuple[str, Tensor]]:
        yield from _bn_tensors(self._prefix(), self.state, trainable=False)

    def batch_norms(self) -> Iterator[BatchNormState]:
        yield self.state

    def output_shape(self, shape: Shape) -> Shape:
        c = _require_image(self, shape)[0]
        if c != self.state.channels:
            raise SpecError(
                f"expects {self.state.channels} channels, got {c}", self.index, self.kind
            )
        return shape

    def cost(self, shape: Shape) -> LayerCost:
        out = self.output_shape(shape)
        return LayerCost(
            index=self.index,
            kind=self.kind,
            output_shape=out,
            params=2 * self.state.channels,
            macs=prod(out),
        )


class ReluLayer(Layer):
    def forward(self, x: Tensor) -> Tensor:
        return x.relu()

    def cost(self, shape: Shape) -> LayerCost:
        return LayerCost(
            index=self.index, kind=self.kind, output_shape=shape, elementwise_ops=prod(shape)
        )


class PoolLayer(Layer):
    def forward(self, x: Tensor) -> Tensor:
        if self.spec.pool_kind == "global_avg":
            return global_avg_pool(x)
        return pool(
            x,
            self.spec.pool_kind,
            self.spec.kernel,
            self.spec.resolved_stride(),
            self.spec.resolved_padding(),
        )

    def output_shape(self, shape: Shape) -> Shape:
        c, h, w = _require_image(self, shape)
        if self.spec.pool_kind == "global_avg":
            return c, 1, 1
        k, s, p = self.spec.kernel, self.spec.resolved_stride(), self.spec.resolved_padding()
        ho, wo = output_extent(h, k, s, p), output_extent(w, k, s, p)
        if ho < 1 or wo < 1:
            raise SpecError(f"window {k} does not fit a {h}x{w} input", self.index, self.kind)
        return c, ho, wo

    def cost(self, shape: Shape) -> LayerCost:
        out = self.output_shape(shape)
        window = prod(shape[1:]) if self.spec.pool_kind == "global_avg" else self.spec.kernel**2
        return LayerCost(
            index=self.index,
            kind=self.kind,
            output_shape=out,
            elementwise_ops=window * prod(out),
        )


class FlattenLayer(Layer):
    def forward(self, x: Tensor) -> Tensor:
        return flatten(x)

    def output_shape(self, shape: Shape) -> Shape:
        return (prod(shape),)


class BlockLayer(Layer):
    """Residual (basic / bottleneck), plain conv + BN, or any of their IC forms."""

    def __init__(self, index: int, spec: LayerSpec, params: BlockParams):
        super().__init__(index, spec)
        self.params = params

    def forward(self, x: Tensor) -> Tensor:
        return block_forward(x, self.params)

    def _tensors(self, trainable: bool):
        p = self.params
        for j, (conv, bn) in enumerate(zip(p.convs, p.bns, strict=True)):
            yield from _conv_tensors(self._prefix("convs", j), conv, trainable)
            yield from _bn_tensors(self._prefix("bns", j), bn, trainable)
        if p.shortcut is not None:
            yield from _conv_tensors(self._prefix("shortcut"), p.shortcut, trainable)
        if p.shortcut_bn is not None:
            yield from _bn_tensors(self._prefix("shortcut_bn"), p.shortcut_bn, trainable)
        if isinstance(p, ICBlockParams) and p.combine_bn is not None:
            yield from _bn_tensors(self._prefix("combine_bn"), p.combine_bn, trainable)

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        yield from self._tensors(trainable=True)

    def named_buffers(self) -> Iterator[tuple[str, Tensor]]:
        yield from self._tensors(trainable=False)

    def batch_norms(self) -> Iterator[BatchNormState]:
        p = self.params
        yield from p.bns
        if p.shortcut_bn is not None:
            yield p.shortcut_bn
        if isinstance(p, ICBlockParams) and p.combine_bn is not None:
            yield p.combine_bn

    def output_shape(self, shape: Shape) -> Shape:
        out = _require_image(self, shape)
        for conv in self.params.convs:
            out = _conv_out(self, out, base_conv(conv))
        return out

    def cost(self, shape: Shape) -> LayerCost:
        p = self.params
        params = macs = elementwise = ic_params = ic_macs = 0
        out = _require_image(self, shape)
        for j, conv in enumerate(p.convs):
            out = _conv_out(self, out, base_conv(conv))
            c_params, c_macs, c_elem, c_ic_params, c_ic_macs = conv_cost(conv, out)
            params += c_params + 2 * out[0]
            macs += c_macs + prod(out)
            elementwise += c_elem + (prod(out) if j < len(p.convs) - 1 else 0)
            ic_params += c_ic_params
            ic_macs += c_ic_macs

        numel = prod(out)
        if p.shortcut is not None:
            s_params, s_macs, _, _, _ = conv_cost(p.shortcut, out)
            params += s_params + 2 * out[0]
            macs += s_macs + numel
        if p.kind != "plain":
            elementwise += 2 * numel

        if isinstance(p, ICBlockParams):
            c_in = shape[0]
            area = out[1] * out[2]
            k = base_conv(p.convs[0]).kernel if p.kind == "plain" else 3
            block_ic_macs = k * k * c_in * area + numel
            block_ic_params = 2 * out[0]
            if c_in != out[0]:
                elementwise += c_in * area
            params += block_ic_params
            macs += block_ic_macs
            elementwise += 3 * numel
            ic_params += block_ic_params
            ic_macs += block_ic_macs

        return LayerCost(
            index=self.index,
            kind=self.kind,
            output_shape=out,
            params=params,
            macs=macs,
            elementwise_ops=elementwise,
            ic_params=ic_params,
            ic_macs=ic_macs,
        )


def _build_conv(index: int, spec: LayerSpec, shape: Shape, rng) -> Layer:
    c_in = shape[0]
    conv = make_conv(
        rng,
        c_in,
        spec.channels,
        spec.kernel,
        spec.resolved_stride(),
        spec.resolved_padding(),
        spec.resolved_bias(),
    )
    params = make_ic_conv(conv, spec) if spec.kind == "ic_conv" else conv
    return ConvLayer(index, spec, params)


def _build_dense(index: int, spec: LayerSpec, shape: Shape, rng) -> Layer:
    d_in = shape[0]
    weight = he_normal(rng, (spec.channels, d_in), d_in, "weight")
    bias = (
        Tensor(np.zeros(spec.channels), requires_grad=True, name="bias")
        if spec.resolved_bias()
        else None
    )
    if spec.kind == "dense":
        return DenseLayer(index, spec, weight, bias)
    params = ICDenseParams(
        weight=weight,
        w_prime=Tensor(np.ones(spec.channels), requires_grad=spec.learn_w_prime, name="w_prime"),
        bias_main=bias,
        bias_inner=(
            Tensor(np.zeros(spec.channels), requires_grad=True, name="bias_inner")
            if spec.resolved_bias()
            else None
        ),
        learn_w_prime=spec.learn_w_prime,
    )
    return ICDenseLayer(index, spec, params)


def _build_bn(index: int, spec: LayerSpec, shape: Shape, rng) -> Layer:
    return BatchNormLayer(index, spec, BatchNormState.fresh(shape[0]))


def _build_block(index: int, spec: LayerSpec, shape: Shape, rng) -> Layer:
    c_in, c_out, stride = shape[0], spec.channels, spec.resolved_stride()
    family = spec.kind.removeprefix("ic_").removesuffix("_block")
    if family == "basic":
        convs = [make_conv(rng, c_in, c_out, 3, stride, 1), make_conv(rng, c_out, c_out, 3, 1, 1)]
    elif family == "bottleneck":
        width = spec.width or max(c_out // 4, 1)
        convs = [
            make_conv(rng, c_in, width, 1),
            make_conv(rng, width, width, 3, stride, 1),
            make_conv(rng, width, c_out, 1),
        ]
    else:
        convs = [make_conv(rng, c_in, c_out, spec.kernel, stride, spec.resolved_padding())]

    shortcut = shortcut_bn = None
    if family != "plain" and (stride != 1 or c_in != c_out):
        shortcut = make_conv(rng, c_in, c_out, 1, stride, 0)
        shortcut_bn = BatchNormState.fresh(c_out)

    layers = [make_ic_conv(c, spec) if spec.ic_layers and c.kernel >= 2 else c for c in convs]
    fields = dict(
        kind=family,
        convs=layers,
        bns=[BatchNormState.fresh(base_conv(c).out_channels) for c in layers],
        shortcut=shortcut,
        shortcut_bn=shortcut_bn,
        stride=stride,
    )
    if spec.is_ic:
        params = ICBlockParams(**fields, combine_bn=BatchNormState.fresh(c_out))
    else:
        params = BlockParams(**fields)
    return BlockLayer(index, spec, params)


LayerBuilder = Callable[[int, LayerSpec, Shape, np.random.Generator], Layer]

LAYER_BUILDERS: dict[str, LayerBuilder] = {
    "conv": _build_conv,
    "ic_conv": _build_conv,
    "dense": _build_dense,
    "ic_dense": _build_dense,
    "bn": _build_bn,
    "relu": lambda index, spec, shape, rng: ReluLayer(index, spec),
    "pool": lambda index, spec, shape, rng: PoolLayer(index, spec),
    "flatten": lambda index, spec, shape, rng: FlattenLayer(index, spec),
    **dict.fromkeys(sorted(BLOCK_KINDS), _build_block),
}

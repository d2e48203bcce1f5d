"""Residual blocks and their IC counterparts.

An IC block computes the rough feature once, from the block input, and merges it
into the output of the last layer with ``ic_combine``; the shortcut is added after
that: out = relu(shortcut(x) + F(a, b)).
"""

from icnet.engine.tensor import Tensor
from icnet.errors import DimensionError
from icnet.ic.data_models import BlockParams, ICBlockParams, base_conv
from icnet.ic.functional import conv_forward, ic_combine, rough_feature
from icnet.nn.functional import batch_norm, conv2d


def block_rough_feature(
    x: Tensor, channels: int, k: int = 3, stride: int = 1, padding: int = 1
) -> Tensor:
    """Rough feature of ``x`` matched to ``channels`` output channels.

    When the channel counts differ, the channel mean of the rough feature is broadcast
    to every output channel.
    """
    rough = rough_feature(x, k, stride, padding)
    n, c, h, w = rough.shape
    if c != channels:
        rough = rough.mean(axis=1, keepdims=True).broadcast_to((n, channels, h, w))
    return rough


def _last_layer(x: Tensor, p: BlockParams) -> Tensor:
    """conv -> BN (-> ReLU between layers); the last BN output is returned pre-activation."""
    out = x
    last = len(p.convs) - 1
    for i, (conv, bn) in enumerate(zip(p.convs, p.bns, strict=True)):
        out = batch_norm(conv_forward(out, conv), bn)
        if i < last:
            out = out.relu()
    return out


def _shortcut(x: Tensor, p: BlockParams) -> Tensor:
    if p.shortcut is None:
        return x
    out = conv2d(x, p.shortcut)
    return batch_norm(out, p.shortcut_bn) if p.shortcut_bn is not None else out


def _residual(x: Tensor, p: BlockParams, branch: Tensor) -> Tensor:
    shortcut = _shortcut(x, p)
    if shortcut.shape != branch.shape:
        raise DimensionError(
            f"{p.kind} block: shortcut {shortcut.shape} does not match branch {branch.shape}"
        )
    return (shortcut + branch).relu()


def basic_block(x: Tensor, p: BlockParams) -> Tensor:
    return _residual(x, p, _last_layer(x, p))


def bottleneck_block(x: Tensor, p: BlockParams) -> Tensor:
    return _residual(x, p, _last_layer(x, p))


def _ic_residual(x: Tensor, p: ICBlockParams) -> Tensor:
    a = _last_layer(x, p)
    b = block_rough_feature(x, p.out_channels, 3, p.stride, 1)
    return _residual(x, p, ic_combine(a, b, p.combine_bn))


def ic_basic_block(x: Tensor, p: ICBlockParams) -> Tensor:
    return _ic_residual(x, p)


def ic_bottleneck_block(x: Tensor, p: ICBlockParams) -> Tensor:
    return _ic_residual(x, p)


def plain_block(x: Tensor, p: BlockParams) -> Tensor:
    """A single conv -> BN unit (no shortcut)."""
    return _last_layer(x, p)


def ic_plain_block(x: Tensor, p: ICBlockParams) -> Tensor:
    """conv -> BN, then F(a, b) with the rough feature of the unit input over the conv window."""
    conv = base_conv(p.convs[0])
    a = _last_layer(x, p)
    b = block_rough_feature(x, p.out_channels, conv.kernel, conv.stride, conv.padding)
    return ic_combine(a, b, p.combine_bn)


BLOCK_FORWARD = {
    ("basic", False): basic_block,
    ("basic", True): ic_basic_block,
    ("bottleneck", False): bottleneck_block,
    ("bottleneck", True): ic_bottleneck_block,
    ("plain", False): plain_block,
    ("plain", True): ic_plain_block,
}


def block_forward(x: Tensor, p: BlockParams) -> Tensor:
    return BLOCK_FORWARD[(p.kind, isinstance(p, ICBlockParams))](x, p)

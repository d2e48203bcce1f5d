"""Finite-difference gradient checks for every differentiable layer kind."""

from collections.abc import Callable

import numpy as np

from icnet.checks.data_models import CheckOptions
from icnet.engine.gradcheck import finite_diff_check
from icnet.engine.tensor import Tensor
from icnet.errors import PropertyViolation
from icnet.ic.blocks import ic_basic_block, ic_bottleneck_block, ic_plain_block
from icnet.ic.data_models import ICBlockParams, ICConvParams, ICDenseParams
from icnet.ic.functional import ic_conv_forward, ic_dense_forward
from icnet.nn.data_models import BatchNormState, ConvParams
from icnet.nn.functional import (
    batch_norm,
    conv2d,
    dense,
    depthwise_conv2d,
    pool,
    softmax_cross_entropy,
)

GRADIENT_TOLERANCE = 1e-4

GradientCase = tuple[Callable[[], Tensor], list[Tensor]]


def _param(rng: np.random.Generator, *shape: int, scale: float = 1.0) -> Tensor:
    return Tensor(rng.standard_normal(shape) * scale, requires_grad=True)


def _projected(
    out_fn: Callable[[], Tensor], rng: np.random.Generator, shape
) -> Callable[[], Tensor]:
    """Scalar objective sum(out * R) for a fixed random R."""
    projection = Tensor(rng.standard_normal(shape))
    return lambda: (out_fn() * projection).sum()


def _conv(rng, c_in, c_out, k, stride=1, padding=None) -> ConvParams:
    return ConvParams(
        weight=_param(rng, c_out, c_in, k, k, scale=0.5),
        bias=_param(rng, c_out, scale=0.1),
        stride=stride,
        padding=k // 2 if padding is None else padding,
    )


def _fresh_bn(channels: int) -> BatchNormState:
    return BatchNormState.fresh(channels)


def conv_case(rng) -> GradientCase:
    x = _param(rng, 2, 3, 5, 5)
    p = _conv(rng, 3, 4, 3, stride=2)
    return _projected(lambda: conv2d(x, p), rng, (2, 4, 3, 3)), [x, p.weight, p.bias]


def depthwise_case(rng) -> GradientCase:
    x = _param(rng, 2, 3, 5, 5)
    w = _param(rng, 3, 3, 3)
    return _projected(lambda: depthwise_conv2d(x, w, 1, 1), rng, (2, 3, 5, 5)), [x, w]


def batch_norm_case(rng) -> GradientCase:
    x = _param(rng, 3, 2, 3, 3)
    bn = _fresh_bn(2)
    bn.gamma.data[...] = rng.uniform(0.5, 1.5, 2)
    bn.beta.data[...] = rng.standard_normal(2)
    return _projected(lambda: batch_norm(x, bn), rng, (3, 2, 3, 3)), [x, bn.gamma, bn.beta]


def avg_pool_case(rng) -> GradientCase:
    x = _param(rng, 2, 2, 4, 4)
    return _projected(lambda: pool(x, "avg", 2), rng, (2, 2, 2, 2)), [x]


def max_pool_case(rng) -> GradientCase:
    x = _param(rng, 2, 2, 5, 5)
    return _projected(lambda: pool(x, "max", 3, stride=2, padding=1), rng, (2, 2, 3, 3)), [x]


def dense_case(rng) -> GradientCase:
    x = _param(rng, 4, 5)
    w, b = _param(rng, 3, 5), _param(rng, 3)
    return _projected(lambda: dense(x, w, b), rng, (4, 3)), [x, w, b]


def ic_dense_case(rng) -> GradientCase:
    x = _param(rng, 4, 5)
    p = ICDenseParams(
        weight=_param(rng, 3, 5),
        w_prime=_param(rng, 3, scale=0.3),
        bias_main=_param(rng, 3),
        bias_inner=_param(rng, 3),
    )
    tensors = [x, p.weight, p.w_prime, p.bias_main, p.bias_inner]
    return _projected(lambda: ic_dense_forward(x, p), rng, (4, 3)), tensors


def _ic_conv_case(rng, mode: str) -> GradientCase:
    x = _param(rng, 2, 3, 5, 5)
    conv = _conv(rng, 3, 4, 3)
    shape = (4, 3) if mode == "grouped" else (4,)
    p = ICConvParams(conv=conv, w_prime=_param(rng, *shape, scale=0.1), mode=mode)
    tensors = [x, conv.weight, conv.bias, p.w_prime]
    return _projected(lambda: ic_conv_forward(x, p), rng, (2, 4, 5, 5)), tensors


def ic_conv_grouped_case(rng) -> GradientCase:
    return _ic_conv_case(rng, "grouped")


def ic_conv_scalar_case(rng) -> GradientCase:
    return _ic_conv_case(rng, "scalar")


def _block_tensors(x: Tensor, p: ICBlockParams) -> list[Tensor]:
    tensors = [x]
    for conv, bn in zip(p.convs, p.bns, strict=True):
        tensors += [conv.weight, bn.gamma, bn.beta]
    if p.shortcut is not None:
        tensors += [p.shortcut.weight, p.shortcut_bn.gamma, p.shortcut_bn.beta]
    tensors += [p.combine_bn.gamma, p.combine_bn.beta]
    return [t for t in tensors if t is not None]


def ic_basic_block_case(rng) -> GradientCase:
    x = _param(rng, 2, 2, 4, 4)
    p = ICBlockParams(
        kind="basic",
        convs=[_conv(rng, 2, 3, 3, stride=2), _conv(rng, 3, 3, 3)],
        bns=[_fresh_bn(3), _fresh_bn(3)],
        shortcut=_conv(rng, 2, 3, 1, stride=2, padding=0),
        shortcut_bn=_fresh_bn(3),
        stride=2,
        combine_bn=_fresh_bn(3),
    )
    return _projected(lambda: ic_basic_block(x, p), rng, (2, 3, 2, 2)), _block_tensors(x, p)


def ic_bottleneck_block_case(rng) -> GradientCase:
    x = _param(rng, 2, 4, 3, 3)
    p = ICBlockParams(
        kind="bottleneck",
        convs=[_conv(rng, 4, 2, 1), _conv(rng, 2, 2, 3), _conv(rng, 2, 4, 1)],
        bns=[_fresh_bn(2), _fresh_bn(2), _fresh_bn(4)],
        combine_bn=_fresh_bn(4),
    )
    return _projected(lambda: ic_bottleneck_block(x, p), rng, (2, 4, 3, 3)), _block_tensors(x, p)


def ic_plain_block_case(rng) -> GradientCase:
    x = _param(rng, 2, 2, 4, 4)
    p = ICBlockParams(
        kind="plain", convs=[_conv(rng, 2, 3, 3)], bns=[_fresh_bn(3)], combine_bn=_fresh_bn(3)
    )
    return _projected(lambda: ic_plain_block(x, p), rng, (2, 3, 4, 4)), _block_tensors(x, p)


def loss_case(rng) -> GradientCase:
    logits = _param(rng, 5, 4)
    labels = rng.integers(0, 4, 5)
    return lambda: softmax_cross_entropy(logits, labels), [logits]


GRADIENT_CASES: dict[str, Callable[[np.random.Generator], GradientCase]] = {
    "conv": conv_case,
    "depthwise": depthwise_case,
    "batch_norm": batch_norm_case,
    "avg_pool": avg_pool_case,
    "max_pool": max_pool_case,
    "dense": dense_case,
    "ic_dense": ic_dense_case,
    "ic_conv_grouped": ic_conv_grouped_case,
    "ic_conv_scalar": ic_conv_scalar_case,
    "ic_basic_block": ic_basic_block_case,
    "ic_bottleneck_block": ic_bottleneck_block_case,
    "ic_plain_block": ic_plain_block_case,
    "loss": loss_case,
}


def gradient_error(case: str, seed: int = 0) -> float:
    f, tensors = GRADIENT_CASES[case](np.random.default_rng(seed))
    return finite_diff_check(f, tensors, eps=1e-3)


def check_gradients(opts: CheckOptions) -> str:
    errors = {}
    for case in GRADIENT_CASES:
        errors[case] = gradient_error(case, opts.seed)
        if errors[case] >= GRADIENT_TOLERANCE:
            raise PropertyViolation(
                f"{case}: relative gradient error {errors[case]:.3e}", errors[case]
            )
    worst = max(errors, key=errors.get)
    return f"{len(errors)} layer kinds, worst {worst} at {errors[worst]:.2e}"

"""IC neurons, IC convolution layers and the rough-feature combine function."""

from collections.abc import Callable

import numpy as np

from icnet.engine.tensor import Tensor, identity
from icnet.errors import ContractError, DimensionError
from icnet.ic.data_models import ICConvParams, ICDenseParams
from icnet.nn.data_models import BatchNormState, ConvParams
from icnet.nn.functional import batch_norm, conv2d, dense, depthwise_conv2d

Activation = Callable[[Tensor], Tensor]


def _check_dense_input(x: Tensor, p: ICDenseParams) -> tuple[int, int]:
    if x.ndim != 2 or x.shape[1] != p.weight.shape[1]:
        raise DimensionError(f"IC dense: input {x.shape} incompatible with weight {p.weight.shape}")
    return x.shape[0], p.weight.shape[0]


def ic_dense_forward(x: Tensor, p: ICDenseParams, f: Activation = identity) -> Tensor:
    """y = f(Wx + b1 + relu(Wx - w' * sum(x) + b2)) for a batch x of shape [B, N]."""
    batch, m = _check_dense_input(x, p)
    main = dense(x, p.weight, p.bias_main)
    x_sum = x.sum(axis=1, keepdims=True).broadcast_to((batch, m))
    w_prime = p.w_prime.reshape(1, m).broadcast_to((batch, m))
    inner = dense(x, p.weight, p.bias_inner) - x_sum * w_prime
    return f(main + inner.relu())


def ic_dense_piecewise(x: Tensor, p: ICDenseParams, f: Activation = identity) -> Tensor:
    """Branch form of the IC neuron along the hyperplane H = 0.

    H >= 0: f(2Wx + b1 + b2 - w' * sum(x)); H < 0: f(Wx + b1). Computed without the
    computation record, as an independent check of :func:`ic_dense_forward`.
    """
    _check_dense_input(x, p)
    wx = x.data @ p.weight.data.T
    b1 = 0.0 if p.bias_main is None else p.bias_main.data[None, :]
    b2 = 0.0 if p.bias_inner is None else p.bias_inner.data[None, :]
    shifted = p.w_prime.data[None, :] * x.data.sum(axis=1, keepdims=True)
    h = wx - shifted + b2
    upper = 2 * wx + b1 + b2 - shifted
    lower = wx + b1
    return f(Tensor(np.where(h >= 0, upper, lower)))


def rough_feature(x: Tensor, k: int, stride: int = 1, padding: int = 0) -> Tensor:
    """Per-channel k x k window sums: depthwise convolution with all-one kernels."""
    if x.ndim != 4:
        raise DimensionError(f"rough_feature expects [N, C, H, W], got {x.shape}")
    ones = Tensor(np.ones((x.shape[1], k, k)))
    return depthwise_conv2d(x, ones, stride, padding)


def ic_conv_forward(x: Tensor, p: ICConvParams) -> Tensor:
    """IC layer: u_i = main_i + relu(main_i - sum_c w'_ic R_c) with R the rough feature.

    In scalar mode a single w'_i scales the channel-summed rough feature. The output
    has the shape of the plain convolution.
    """
    conv = p.conv
    if conv.kernel < 2:
        raise ContractError(
            "IC layers need k >= 2: the rough feature of a 1x1 window is the pixel itself"
        )
    main = conv2d(x, conv)
    rough = rough_feature(x, conv.kernel, conv.stride, conv.padding)
    c_out = conv.out_channels
    if p.mode == "grouped":
        mixer = ConvParams(weight=p.w_prime.reshape(c_out, conv.in_channels, 1, 1))
        mixed = conv2d(rough, mixer)
    else:
        mixer = ConvParams(weight=p.w_prime.reshape(c_out, 1, 1, 1))
        mixed = conv2d(rough.sum(axis=1, keepdims=True), mixer)
    return main + (main - mixed).relu()


def conv_forward(x: Tensor, p: ConvParams | ICConvParams) -> Tensor:
    if isinstance(p, ICConvParams):
        return ic_conv_forward(x, p)
    return conv2d(x, p)


def ic_combine(a: Tensor, b: Tensor, bn: BatchNormState | None = None) -> Tensor:
    """F(a, b) = a + relu(BN(a + b)); without ``bn`` the normalization is skipped."""
    if a.shape != b.shape:
        raise DimensionError(f"ic_combine: shape mismatch {a.shape} vs {b.shape}")
    mixed = a + b
    if bn is not None:
        mixed = batch_norm(mixed, bn)
    return a + mixed.relu()

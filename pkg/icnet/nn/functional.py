"""Standard layers as differentiable functions over :class:`Tensor`.

Convolutions are cross-correlations (no kernel flip) lowered to matrix products over
sliding windows; gradients are scattered back window position by window position so
the summation order is fixed.
"""

from typing import Literal

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from icnet.engine.record import note_pattern
from icnet.engine.tensor import Tensor, record_op
from icnet.errors import ContractError, DimensionError
from icnet.nn.data_models import BatchNormState, ConvParams

PoolKind = Literal["max", "avg"]


def output_extent(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def _check_nchw(x: Tensor, op: str) -> tuple[int, int, int, int]:
    if x.ndim != 4:
        raise DimensionError(f"{op} expects [N, C, H, W] input, got {x.shape}")
    return x.shape


def _spatial_out(h: int, w: int, k: int, stride: int, padding: int, op: str) -> tuple[int, int]:
    ho, wo = output_extent(h, k, stride, padding), output_extent(w, k, stride, padding)
    if ho < 1 or wo < 1:
        raise DimensionError(
            f"{op}: window {k} with padding {padding} does not fit input {h}x{w}"
        )
    return ho, wo


def _pad(data: np.ndarray, padding: int, value: float = 0.0) -> np.ndarray:
    if padding == 0:
        return data
    width = ((0, 0), (0, 0), (padding, padding), (padding, padding))
    return np.pad(data, width, constant_values=value)


def _windows(padded: np.ndarray, k: int, stride: int, ho: int, wo: int) -> np.ndarray:
    """View of shape [N, C, Ho, Wo, k, k] over the padded input."""
    view = sliding_window_view(padded, (k, k), axis=(2, 3))
    return view[:, :, ::stride, ::stride][:, :, :ho, :wo]


def _scatter_windows(
    grad_windows: np.ndarray, padded_shape: tuple, k: int, stride: int, padding: int
) -> np.ndarray:
    """Adjoint of :func:`_windows`: sum [N, C, Ho, Wo, k, k] back onto the input grid."""
    ho, wo = grad_windows.shape[2:4]
    out = np.zeros(padded_shape)
    for i in range(k):
        for j in range(k):
            out[:, :, i : i + stride * ho : stride, j : j + stride * wo : stride] += grad_windows[
                :, :, :, :, i, j
            ]
    if padding:
        out = out[:, :, padding:-padding, padding:-padding]
    return np.ascontiguousarray(out)


def conv2d(x: Tensor, params: ConvParams) -> Tensor:
    """Zero-padded cross-correlation, [N, C_in, H', W'] -> [N, C_out, H, W]."""
    n, c_in, h, w = _check_nchw(x, "conv2d")
    weight, bias = params.weight, params.bias
    c_out, w_in, k, _ = weight.shape
    if c_in != w_in:
        raise DimensionError(f"conv2d: input has {c_in} channels, weight expects {w_in}")
    s, p = params.stride, params.padding
    ho, wo = _spatial_out(h, w, k, s, p, "conv2d")

    padded = _pad(x.data, p)
    cols = _windows(padded, k, s, ho, wo).transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, -1)
    wmat = weight.data.reshape(c_out, -1)
    out = (cols @ wmat.T).reshape(n, ho, wo, c_out).transpose(0, 3, 1, 2)
    if bias is not None:
        out = out + bias.data[None, :, None, None]

    def backward(g):
        g_rows = g.transpose(0, 2, 3, 1).reshape(-1, c_out)
        gx = gw = gb = None
        if x.requires_grad:
            g_cols = (g_rows @ wmat).reshape(n, ho, wo, c_in, k, k).transpose(0, 3, 1, 2, 4, 5)
            gx = _scatter_windows(g_cols, padded.shape, k, s, p)
        if weight.requires_grad:
            gw = (g_rows.T @ cols).reshape(weight.shape)
        if bias is not None and bias.requires_grad:
            gb = g.sum(axis=(0, 2, 3))
        return gx, gw, gb

    return record_op("conv2d", np.ascontiguousarray(out), (x, weight, bias), backward)


def depthwise_conv2d(x: Tensor, weight: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """Per-channel convolution: channel c of the output only sees channel c of the input."""
    n, c, h, w = _check_nchw(x, "depthwise_conv2d")
    if weight.ndim != 3 or weight.shape[0] != c or weight.shape[1] != weight.shape[2]:
        raise DimensionError(
            f"depthwise_conv2d: weight {weight.shape} does not match {c} input channels"
        )
    k = weight.shape[1]
    ho, wo = _spatial_out(h, w, k, stride, padding, "depthwise_conv2d")
    padded = _pad(x.data, padding)
    win = _windows(padded, k, stride, ho, wo)
    out = np.einsum("nchwij,cij->nchw", win, weight.data)

    def backward(g):
        gx = gw = None
        if x.requires_grad:
            g_win = g[:, :, :, :, None, None] * weight.data[None, :, None, None, :, :]
            gx = _scatter_windows(g_win, padded.shape, k, stride, padding)
        if weight.requires_grad:
            gw = np.einsum("nchw,nchwij->cij", g, win)
        return gx, gw

    return record_op("depthwise_conv2d", out, (x, weight), backward)


def batch_norm(x: Tensor, state: BatchNormState) -> Tensor:
    """Per-channel normalization of [N, C, H, W].

    Train mode normalizes with the (biased) batch statistics and folds them into the
    running estimates by exponential moving average, using the unbiased variance.
    Eval mode applies the fixed affine map given by the running statistics.
    """
    n, c, h, w = _check_nchw(x, "batch_norm")
    if c != state.channels:
        raise DimensionError(f"batch_norm: input has {c} channels, state has {state.channels}")
    gamma, beta = state.gamma, state.beta
    g4 = gamma.data[None, :, None, None]
    axes = (0, 2, 3)

    if state.mode == "eval":
        inv_std = 1.0 / np.sqrt(state.running_var.data + state.epsilon)
        x_hat = (x.data - state.running_mean.data[None, :, None, None]) * inv_std[
            None, :, None, None
        ]
        out = g4 * x_hat + beta.data[None, :, None, None]

        def backward_eval(g):
            gx = g * (g4 * inv_std[None, :, None, None]) if x.requires_grad else None
            return gx, (g * x_hat).sum(axis=axes), g.sum(axis=axes)

        return record_op("batch_norm", out, (x, gamma, beta), backward_eval)

    m = n * h * w
    if m < 2:
        raise ContractError("batch_norm in train mode needs at least two values per channel")
    mean = x.data.mean(axis=axes)
    var = x.data.var(axis=axes)
    inv_std = 1.0 / np.sqrt(var + state.epsilon)
    x_hat = (x.data - mean[None, :, None, None]) * inv_std[None, :, None, None]
    out = g4 * x_hat + beta.data[None, :, None, None]

    mom = state.momentum
    state.running_mean.data[...] = (1 - mom) * state.running_mean.data + mom * mean
    state.running_var.data[...] = (1 - mom) * state.running_var.data + mom * var * m / (m - 1)

    def backward(g):
        gx = None
        if x.requires_grad:
            d_hat = g * g4
            gx = (
                inv_std[None, :, None, None]
                / m
                * (
                    m * d_hat
                    - d_hat.sum(axis=axes, keepdims=True)
                    - x_hat * (d_hat * x_hat).sum(axis=axes, keepdims=True)
                )
            )
        return gx, (g * x_hat).sum(axis=axes), g.sum(axis=axes)

    return record_op("batch_norm", out, (x, gamma, beta), backward)


def pool(x: Tensor, kind: PoolKind, k: int, stride: int | None = None, padding: int = 0) -> Tensor:
    """Max or average pooling. Max routes the gradient to the first maximum in scan order."""
    n, c, h, w = _check_nchw(x, "pool")
    stride = stride or k
    ho, wo = _spatial_out(h, w, k, stride, padding, "pool")
    fill = -np.inf if kind == "max" else 0.0
    padded = _pad(x.data, padding, fill)
    win = _windows(padded, k, stride, ho, wo).reshape(n, c, ho, wo, k * k)

    if kind == "avg":
        out = win.mean(axis=-1)

        def backward_avg(g):
            g_win = np.broadcast_to((g / (k * k))[..., None, None], (n, c, ho, wo, k, k))
            return (_scatter_windows(g_win, padded.shape, k, stride, padding),)

        return record_op("avg_pool", out, (x,), backward_avg)

    if kind != "max":
        raise ContractError(f"unknown pool kind {kind!r}")
    arg = win.argmax(axis=-1)
    note_pattern(arg)
    out = np.take_along_axis(win, arg[..., None], axis=-1)[..., 0]

    def backward_max(g):
        onehot = arg[..., None] == np.arange(k * k)
        g_win = (onehot * g[..., None]).reshape(n, c, ho, wo, k, k)
        return (_scatter_windows(g_win, padded.shape, k, stride, padding),)

    return record_op("max_pool", out, (x,), backward_max)


def global_avg_pool(x: Tensor) -> Tensor:
    """[N, C, H, W] -> [N, C, 1, 1] channel means."""
    _check_nchw(x, "global_avg_pool")
    return x.mean(axis=(2, 3), keepdims=True)


def flatten(x: Tensor) -> Tensor:
    return x.reshape(x.shape[0], -1)


def dense(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """Affine map [N, D_in] -> [N, D_out] with weight [D_out, D_in]."""
    if x.ndim != 2 or weight.ndim != 2 or x.shape[1] != weight.shape[1]:
        raise DimensionError(f"dense: input {x.shape} incompatible with weight {weight.shape}")
    if bias is not None and bias.shape != (weight.shape[0],):
        raise DimensionError(f"dense: bias {bias.shape} does not match weight {weight.shape}")
    out = x.data @ weight.data.T
    if bias is not None:
        out = out + bias.data[None, :]

    def backward(g):
        gx = g @ weight.data if x.requires_grad else None
        gw = g.T @ x.data if weight.requires_grad else None
        gb = g.sum(axis=0) if bias is not None and bias.requires_grad else None
        return gx, gw, gb

    return record_op("dense", out, (x, weight, bias), backward)


def softmax_cross_entropy(logits: Tensor, labels) -> Tensor:
    """Mean negative log-likelihood of integer ``labels`` under softmax(logits)."""
    if logits.ndim != 2:
        raise DimensionError(f"softmax_cross_entropy expects [N, K] logits, got {logits.shape}")
    n, k = logits.shape
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.shape[0] != n:
        raise DimensionError(f"{labels.shape[0]} labels for {n} rows of logits")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ContractError(
            f"labels must lie in [0, {k}), got range [{labels.min()}, {labels.max()}]"
        )

    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_z
    rows = np.arange(n)
    loss = -log_probs[rows, labels].mean()

    def backward(g):
        probs = np.exp(log_probs)
        probs[rows, labels] -= 1.0
        return (probs * (g / n),)

    return record_op("softmax_cross_entropy", np.asarray(loss), (logits,), backward)

from icnet.nn.data_models import BatchNormState, ConvParams
from icnet.nn.functional import (
    batch_norm,
    conv2d,
    dense,
    depthwise_conv2d,
    flatten,
    global_avg_pool,
    output_extent,
    pool,
    softmax_cross_entropy,
)
from icnet.nn.module import Module

__all__ = [
    "BatchNormState",
    "ConvParams",
    "Module",
    "batch_norm",
    "conv2d",
    "dense",
    "depthwise_conv2d",
    "flatten",
    "global_avg_pool",
    "output_extent",
    "pool",
    "softmax_cross_entropy",
]

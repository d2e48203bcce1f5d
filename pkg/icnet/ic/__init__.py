from icnet.ic.blocks import (
    basic_block,
    block_forward,
    block_rough_feature,
    bottleneck_block,
    ic_basic_block,
    ic_bottleneck_block,
    ic_plain_block,
    plain_block,
)
from icnet.ic.data_models import BlockParams, ICBlockParams, ICConvParams, ICDenseParams
from icnet.ic.functional import (
    conv_forward,
    ic_combine,
    ic_conv_forward,
    ic_dense_forward,
    ic_dense_piecewise,
    rough_feature,
)

__all__ = [
    "BlockParams",
    "ICBlockParams",
    "ICConvParams",
    "ICDenseParams",
    "basic_block",
    "block_forward",
    "block_rough_feature",
    "bottleneck_block",
    "conv_forward",
    "ic_basic_block",
    "ic_bottleneck_block",
    "ic_combine",
    "ic_conv_forward",
    "ic_dense_forward",
    "ic_dense_piecewise",
    "ic_plain_block",
    "plain_block",
    "rough_feature",
]

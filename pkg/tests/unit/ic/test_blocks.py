"""Unit tests for ic/blocks.py - residual blocks and IC blocks."""

import numpy as np
import pytest

from icnet.engine import Tensor
from icnet.ic import (
    BlockParams,
    ICBlockParams,
    block_forward,
    block_rough_feature,
    ic_basic_block,
    ic_bottleneck_block,
    ic_plain_block,
)
from icnet.nn.data_models import BatchNormState, ConvParams


def conv(c_in: int, c_out: int, k: int, stride: int = 1, fill: float | None = None, rng=None):
    if fill is None:
        weight = rng.standard_normal((c_out, c_in, k, k)) * 0.3
    else:
        weight = np.full((c_out, c_in, k, k), fill)
    return ConvParams(weight=Tensor(weight), stride=stride, padding=k // 2)


def delta_conv(channels: int) -> ConvParams:
    weight = np.zeros((channels, channels, 3, 3))
    weight[np.arange(channels), np.arange(channels), 1, 1] = 1.0
    return ConvParams(weight=Tensor(weight), padding=1)


def unit_bn(channels: int, beta: float = 0.0) -> BatchNormState:
    """Eval-mode batch norm acting as identity plus ``beta``."""
    bn = BatchNormState.fresh(channels, mode="eval", epsilon=1e-12)
    bn.beta.data[...] = beta
    return bn


class TestICBasicBlock:
    """Test suite for ic_basic_block()."""

    def test_zero_branch_degenerates_to_residual(self):
        """Test that zero convs and a closed combine branch leave relu(x)."""
        x = Tensor(np.random.default_rng(0).standard_normal((2, 3, 5, 5)))
        p = ICBlockParams(
            kind="basic",
            convs=[conv(3, 3, 3, fill=0.0), conv(3, 3, 3, fill=0.0)],
            bns=[BatchNormState.fresh(3), BatchNormState.fresh(3)],
            combine_bn=unit_bn(3, beta=-1e3),
        )
        np.testing.assert_array_equal(ic_basic_block(x, p).data, np.maximum(x.data, 0.0))

    def test_identity_branch_doubles_input(self):
        """Test identity-equivalent convs, x >= 0 and a negative combine term give 2x."""
        x = Tensor(np.random.default_rng(1).uniform(0, 1, (2, 3, 5, 5)))
        p = ICBlockParams(
            kind="basic",
            convs=[delta_conv(3), delta_conv(3)],
            bns=[unit_bn(3), unit_bn(3)],
            combine_bn=unit_bn(3, beta=-1e3),
        )
        np.testing.assert_allclose(ic_basic_block(x, p).data, 2 * x.data, rtol=1e-10)

    def test_downsampling_shape(self):
        rng = np.random.default_rng(2)
        p = ICBlockParams(
            kind="basic",
            convs=[conv(4, 8, 3, stride=2, rng=rng), conv(8, 8, 3, rng=rng)],
            bns=[BatchNormState.fresh(8), BatchNormState.fresh(8)],
            shortcut=ConvParams(weight=Tensor(rng.standard_normal((8, 4, 1, 1))), stride=2),
            shortcut_bn=BatchNormState.fresh(8),
            stride=2,
            combine_bn=BatchNormState.fresh(8),
        )
        out = ic_basic_block(Tensor(rng.standard_normal((2, 4, 8, 8))), p)
        assert out.shape == (2, 8, 4, 4)
        assert np.all(out.data >= 0.0)

    def test_kernel_structure_validated(self):
        with pytest.raises(ValueError):
            BlockParams(
                kind="basic",
                convs=[conv(2, 2, 1, fill=1.0), conv(2, 2, 3, fill=1.0)],
                bns=[BatchNormState.fresh(2), BatchNormState.fresh(2)],
            )


class TestICBottleneckBlock:
    """Test suite for ic_bottleneck_block()."""

    def test_shape_and_plain_counterpart(self):
        rng = np.random.default_rng(3)
        convs = [conv(8, 2, 1, rng=rng), conv(2, 2, 3, rng=rng), conv(2, 8, 1, rng=rng)]
        x = Tensor(rng.standard_normal((2, 8, 6, 6)))
        plain = BlockParams(
            kind="bottleneck", convs=convs, bns=[BatchNormState.fresh(c) for c in (2, 2, 8)]
        )
        ic = ICBlockParams(
            kind="bottleneck",
            convs=convs,
            bns=[BatchNormState.fresh(c) for c in (2, 2, 8)],
            combine_bn=BatchNormState.fresh(8),
        )
        base_out, ic_out = block_forward(x, plain), ic_bottleneck_block(x, ic)
        assert ic_out.shape == base_out.shape == (2, 8, 6, 6)
        assert not np.array_equal(ic_out.data, base_out.data)


class TestICPlainBlock:
    """Test suite for ic_plain_block() and block_rough_feature()."""

    def test_shape_with_stride(self):
        rng = np.random.default_rng(4)
        p = ICBlockParams(
            kind="plain",
            convs=[conv(3, 6, 5, stride=2, rng=rng)],
            bns=[BatchNormState.fresh(6)],
            combine_bn=BatchNormState.fresh(6),
        )
        assert ic_plain_block(Tensor(rng.standard_normal((2, 3, 9, 9))), p).shape == (2, 6, 5, 5)

    def test_channel_mean_broadcast(self):
        """Test that a channel-count mismatch broadcasts the mean rough feature."""
        x = Tensor(np.stack([np.ones((3, 3)), 3 * np.ones((3, 3))])[None])
        out = block_rough_feature(x, channels=4, k=3, stride=1, padding=0)
        assert out.shape == (1, 4, 1, 1)
        np.testing.assert_allclose(out.data.reshape(-1), 18.0)

    def test_matching_channels_keep_rough_feature(self):
        x = Tensor(np.ones((1, 2, 3, 3)))
        out = block_rough_feature(x, channels=2, k=3, stride=1, padding=0)
        np.testing.assert_array_equal(out.data.reshape(-1), [9.0, 9.0])

"""Unit tests for nn/functional.py - standard layers."""

import math

import numpy as np
import pytest

from icnet.engine import Tensor, backward, reset_record
from icnet.errors import ContractError, DimensionError
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


def image(values, channels: int = 1) -> Tensor:
    side = int(math.isqrt(len(values)))
    data = np.asarray(values, dtype=np.float64).reshape(1, 1, side, side)
    return Tensor(np.repeat(data, channels, axis=1))


class TestConv2d:
    """Test suite for conv2d()."""

    def test_sum_of_ones(self):
        x = image([1.0] * 9)
        p = ConvParams(weight=Tensor(np.ones((1, 1, 3, 3))))
        assert conv2d(x, p).data[0, 0, 0, 0] == 9.0

    def test_delta_kernel_is_identity(self):
        """Test that a centred delta kernel with padding 1 reproduces the input."""
        rng = np.random.default_rng(0)
        x = Tensor(rng.standard_normal((2, 1, 5, 5)))
        w = np.zeros((1, 1, 3, 3))
        w[0, 0, 1, 1] = 1.0
        out = conv2d(x, ConvParams(weight=Tensor(w), padding=1))
        np.testing.assert_array_equal(out.data, x.data)

    def test_hand_arithmetic(self):
        x = image(range(1, 10))
        p = ConvParams(weight=Tensor(np.full((1, 1, 3, 3), 0.1)))
        assert conv2d(x, p).data[0, 0, 0, 0] == pytest.approx(4.5)

    def test_output_shape_with_stride(self):
        x = Tensor(np.zeros((2, 3, 8, 8)))
        p = ConvParams(weight=Tensor(np.zeros((5, 3, 3, 3))), stride=2, padding=1)
        assert conv2d(x, p).shape == (2, 5, 4, 4)
        assert output_extent(8, 3, 2, 1) == 4

    def test_bias_added_per_channel(self):
        x = Tensor(np.zeros((1, 1, 3, 3)))
        p = ConvParams(weight=Tensor(np.zeros((2, 1, 1, 1))), bias=Tensor([1.0, -2.0]))
        out = conv2d(x, p)
        assert np.all(out.data[0, 0] == 1.0) and np.all(out.data[0, 1] == -2.0)

    def test_matches_direct_definition(self):
        """Test the lowered convolution against a loop over output positions."""
        rng = np.random.default_rng(1)
        x = rng.standard_normal((2, 3, 6, 6))
        w = rng.standard_normal((4, 3, 3, 3))
        out = conv2d(Tensor(x), ConvParams(weight=Tensor(w), stride=2, padding=1)).data
        padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
        expected = np.zeros_like(out)
        for i in range(out.shape[2]):
            for j in range(out.shape[3]):
                patch = padded[:, :, 2 * i : 2 * i + 3, 2 * j : 2 * j + 3]
                expected[:, :, i, j] = np.einsum("ncij,ocij->no", patch, w)
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_channel_mismatch_raises(self):
        with pytest.raises(DimensionError):
            params = ConvParams(weight=Tensor(np.zeros((1, 3, 3, 3))))
            conv2d(Tensor(np.zeros((1, 2, 4, 4))), params)

    def test_kernel_larger_than_input_raises(self):
        with pytest.raises(DimensionError):
            params = ConvParams(weight=Tensor(np.zeros((1, 1, 3, 3))))
            conv2d(Tensor(np.zeros((1, 1, 2, 2))), params)

    def test_rectangular_kernel_rejected(self):
        with pytest.raises(ValueError):
            ConvParams(weight=Tensor(np.zeros((1, 1, 3, 2))))


class TestDepthwiseConv2d:
    """Test suite for depthwise_conv2d()."""

    def test_window_sums_per_channel(self):
        out = depthwise_conv2d(image([1.0] * 9, channels=2), Tensor(np.ones((2, 3, 3))))
        np.testing.assert_array_equal(out.data.reshape(-1), [9.0, 9.0])

    def test_delta_kernel_is_identity(self):
        rng = np.random.default_rng(2)
        x = Tensor(rng.standard_normal((1, 3, 4, 4)))
        w = np.zeros((3, 3, 3))
        w[:, 1, 1] = 1.0
        np.testing.assert_array_equal(depthwise_conv2d(x, Tensor(w), 1, 1).data, x.data)

    def test_channels_are_independent(self):
        x = Tensor(np.arange(32.0).reshape(1, 2, 4, 4))
        w = np.stack([np.zeros((3, 3)), np.ones((3, 3))])
        out = depthwise_conv2d(x, Tensor(w)).data
        assert np.all(out[0, 0] == 0.0)
        assert out[0, 1, 0, 0] == x.data[0, 1, :3, :3].sum()

    def test_equals_block_diagonal_conv(self):
        """Test that conv2d with block-diagonal weights reproduces depthwise_conv2d."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            c, k = int(rng.integers(1, 5)), int(rng.choice([1, 3, 5]))
            x = Tensor(rng.standard_normal((2, c, 7, 7)))
            w = rng.standard_normal((c, k, k))
            full = np.zeros((c, c, k, k))
            full[np.arange(c), np.arange(c)] = w
            stride, padding = int(rng.integers(1, 3)), k // 2
            dw = depthwise_conv2d(x, Tensor(w), stride, padding).data
            conv = conv2d(x, ConvParams(weight=Tensor(full), stride=stride, padding=padding)).data
            assert np.max(np.abs(dw - conv)) < 1e-12

    def test_channel_mismatch_raises(self):
        with pytest.raises(DimensionError):
            depthwise_conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.zeros((3, 3, 3))))


class TestBatchNorm:
    """Test suite for batch_norm()."""

    @pytest.fixture
    def x(self):
        return Tensor(np.random.default_rng(4).normal(2.0, 3.0, (8, 3, 5, 5)))

    def test_train_mode_normalizes(self, x):
        """Test per-channel mean 0 and variance var/(var + eps) with gamma 1, beta 0."""
        out = batch_norm(x, BatchNormState.fresh(3)).data
        var = x.data.var(axis=(0, 2, 3))
        assert np.max(np.abs(out.mean(axis=(0, 2, 3)))) < 1e-9
        np.testing.assert_allclose(out.var(axis=(0, 2, 3)), var / (var + 1e-5), atol=1e-9)
        assert np.all(np.abs(out.var(axis=(0, 2, 3)) - 1.0) < 1e-5)

    def test_constant_input_gives_beta(self):
        state = BatchNormState.fresh(2)
        state.gamma.data[...] = 2.0
        state.beta.data[...] = 3.0
        out = batch_norm(Tensor(np.full((4, 2, 3, 3), 7.0)), state)
        np.testing.assert_allclose(out.data, 3.0)

    def test_eval_mode_fresh_state(self, x):
        state = BatchNormState.fresh(3, mode="eval")
        np.testing.assert_allclose(batch_norm(x, state).data, x.data / np.sqrt(1 + 1e-5))

    def test_running_statistics_update(self, x):
        state = BatchNormState.fresh(3)
        batch_norm(x, state)
        m = x.data.size // 3
        mean = x.data.mean(axis=(0, 2, 3))
        var = x.data.var(axis=(0, 2, 3)) * m / (m - 1)
        np.testing.assert_allclose(state.running_mean.data, 0.1 * mean)
        np.testing.assert_allclose(state.running_var.data, 0.9 + 0.1 * var)
        assert np.all(state.running_var.data >= 0)

    def test_eval_mode_leaves_running_statistics(self, x):
        state = BatchNormState.fresh(3, mode="eval")
        batch_norm(x, state)
        np.testing.assert_array_equal(state.running_mean.data, 0.0)

    def test_single_value_per_channel_raises(self):
        with pytest.raises(ContractError):
            batch_norm(Tensor(np.zeros((1, 2, 1, 1))), BatchNormState.fresh(2))

    def test_channel_mismatch_raises(self, x):
        with pytest.raises(DimensionError):
            batch_norm(x, BatchNormState.fresh(2))


class TestPool:
    """Test suite for pool(), global_avg_pool() and flatten()."""

    def test_avg_of_constant(self):
        assert np.all(pool(Tensor(np.full((1, 2, 4, 4), 1.5)), "avg", 2).data == 1.5)

    def test_max(self):
        assert pool(image([1, 2, 3, 4]), "max", 2).data.item() == 4.0

    def test_max_gradient_goes_to_first_maximum(self):
        reset_record()
        x = Tensor(np.ones((1, 1, 2, 2)), requires_grad=True)
        backward(pool(x, "max", 2).sum())
        np.testing.assert_array_equal(x.grad[0, 0], [[1.0, 0.0], [0.0, 0.0]])

    def test_global_avg(self):
        x = Tensor(np.arange(32.0).reshape(2, 1, 4, 4))
        out = global_avg_pool(x)
        assert out.shape == (2, 1, 1, 1)
        np.testing.assert_allclose(out.data.reshape(-1), [7.5, 23.5])

    def test_window_exceeding_input_raises(self):
        with pytest.raises(DimensionError):
            pool(Tensor(np.zeros((1, 1, 2, 2))), "max", 3)

    def test_padded_max_ignores_padding(self):
        out = pool(Tensor(np.full((1, 1, 2, 2), -5.0)), "max", 3, stride=2, padding=1)
        assert np.all(out.data == -5.0)

    def test_flatten(self):
        assert flatten(Tensor(np.zeros((3, 2, 2, 2)))).shape == (3, 8)


class TestDense:
    """Test suite for dense()."""

    def test_identity(self):
        x = Tensor([[1.0, -2.0]])
        np.testing.assert_array_equal(dense(x, Tensor(np.eye(2)), Tensor([0.0, 0.0])).data, x.data)

    def test_hand_arithmetic(self):
        assert dense(Tensor([[2.0, 3.0]]), Tensor([[1.0, 1.0]]), Tensor([1.0])).data.item() == 6.0

    def test_mismatch_raises(self):
        with pytest.raises(DimensionError):
            dense(Tensor([[1.0, 2.0, 3.0]]), Tensor([[1.0, 1.0]]))


class TestSoftmaxCrossEntropy:
    """Test suite for softmax_cross_entropy()."""

    def test_uniform_logits(self):
        loss = softmax_cross_entropy(Tensor(np.zeros((3, 10))), [0, 4, 9])
        assert loss.item() == pytest.approx(math.log(10))

    def test_saturated_logits(self):
        logits = np.zeros((2, 5))
        logits[[0, 1], [1, 3]] = 30.0
        assert softmax_cross_entropy(Tensor(logits), [1, 3]).item() == pytest.approx(0.0, abs=1e-10)

    def test_hand_softmax(self):
        loss = softmax_cross_entropy(Tensor([[0.0, math.log(3)]]), [1])
        assert loss.item() == pytest.approx(-math.log(0.75))
        assert loss.item() == pytest.approx(0.287682, abs=1e-6)

    def test_large_logits_stay_finite(self):
        assert np.isfinite(softmax_cross_entropy(Tensor([[1e4, -1e4]]), [1]).item())

    def test_out_of_range_label_raises(self):
        with pytest.raises(ContractError):
            softmax_cross_entropy(Tensor(np.zeros((2, 3))), [0, 3])

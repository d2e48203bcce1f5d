"""Unit tests for ic/functional.py - IC neurons, IC layers and the combine function."""

import numpy as np
import pytest

from icnet.engine import Tensor, backward, relu, reset_record
from icnet.errors import ContractError, DimensionError
from icnet.ic import (
    ICConvParams,
    ICDenseParams,
    ic_combine,
    ic_conv_forward,
    ic_dense_forward,
    ic_dense_piecewise,
    rough_feature,
)
from icnet.nn.data_models import BatchNormState, ConvParams
from icnet.nn.functional import conv2d, dense


def dense_params(weight, w_prime, b1=None, b2=None) -> ICDenseParams:
    def as_tensor(v):
        return None if v is None else Tensor(np.atleast_1d(v), requires_grad=True)

    return ICDenseParams(
        weight=Tensor(np.atleast_2d(weight), requires_grad=True),
        w_prime=as_tensor(w_prime),
        bias_main=as_tensor(b1),
        bias_inner=as_tensor(b2),
    )


class TestICDense:
    """Test suite for ic_dense_forward() and ic_dense_piecewise()."""

    def test_active_branch(self):
        """Test Wx = 1.5, H = 1.5 - 0.25 * 3 = 0.75, y = 2.25."""
        p = dense_params([0.5, 0.5], 0.25)
        x = Tensor([[1.0, 2.0]])
        assert ic_dense_forward(x, p).item() == pytest.approx(2.25)
        assert ic_dense_piecewise(x, p).item() == pytest.approx(2.25)

    def test_inactive_branch_is_standard_neuron(self):
        p = dense_params([0.5, 0.5], 10.0)
        x = Tensor([[1.0, 2.0]])
        assert ic_dense_forward(x, p).item() == pytest.approx(1.5)
        assert ic_dense_forward(x, p).item() == dense(x, p.weight).item()

    def test_xor_hand_weights(self):
        """Test the hand-picked single-neuron XOR solution with f = relu."""
        p = dense_params([0.2805, 0.2805], 1.0, b1=-0.3506, b2=0.6463)
        x = Tensor([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = ic_dense_forward(x, p, relu).data.reshape(-1)
        np.testing.assert_allclose(y, [0.2957, 0.0, 0.0, 0.2104], atol=1e-12)
        assert np.all((y > 0) == np.array([True, False, False, True]))

    def test_equals_piecewise_form(self):
        """Test the relu form against the branch form on random weights."""
        rng = np.random.default_rng(0)
        for _ in range(200):
            p = dense_params(
                rng.standard_normal((4, 8)),
                rng.standard_normal(4),
                rng.standard_normal(4),
                rng.standard_normal(4),
            )
            x = Tensor(rng.standard_normal((3, 8)))
            diff = ic_dense_forward(x, p).data - ic_dense_piecewise(x, p).data
            assert np.max(np.abs(diff)) < 1e-12

    def test_lower_branch_equals_dense(self):
        p = dense_params([[1.0, -1.0]], 5.0)
        x = Tensor([[2.0, 1.0]])
        assert ic_dense_piecewise(x, p).item() == dense(x, p.weight).item()

    def test_dimension_mismatch_raises(self):
        with pytest.raises(DimensionError):
            ic_dense_forward(Tensor([[1.0, 2.0, 3.0]]), dense_params([0.5, 0.5], 1.0))

    def test_w_prime_shape_validated(self):
        with pytest.raises(ValueError):
            ICDenseParams(weight=Tensor(np.ones((2, 3))), w_prime=Tensor([1.0]))

    def test_fixed_w_prime_has_no_grad(self):
        p = ICDenseParams(
            weight=Tensor(np.ones((1, 2))), w_prime=Tensor([1.0]), learn_w_prime=False
        )
        assert p.w_prime.requires_grad is False


class TestRoughFeature:
    """Test suite for rough_feature()."""

    def test_window_sums(self):
        assert rough_feature(Tensor(np.ones((1, 1, 3, 3))), 3).item() == 9.0
        x = Tensor(np.arange(1.0, 10.0).reshape(1, 1, 3, 3))
        assert rough_feature(x, 3).item() == 45.0

    def test_sliding(self):
        out = rough_feature(Tensor(np.ones((1, 1, 4, 4))), 3)
        np.testing.assert_array_equal(out.data, np.full((1, 1, 2, 2), 9.0))

    def test_gradient_reaches_input(self):
        reset_record()
        x = Tensor(np.ones((1, 1, 3, 3)), requires_grad=True)
        backward(rough_feature(x, 3, padding=1).sum())
        assert x.grad[0, 0, 1, 1] == 9.0 and x.grad[0, 0, 0, 0] == 4.0


class TestICConv:
    """Test suite for ic_conv_forward()."""

    @staticmethod
    def single(w_prime: float, mode: str = "grouped") -> ICConvParams:
        conv = ConvParams(weight=Tensor(np.full((1, 1, 3, 3), 0.1)))
        shape = (1, 1) if mode == "grouped" else (1,)
        return ICConvParams(conv=conv, w_prime=Tensor(np.full(shape, w_prime)), mode=mode)

    @pytest.mark.parametrize("mode", ["grouped", "scalar"])
    def test_hand_arithmetic(self, mode):
        """Test main 0.9, rough 9, inner 0.9 - 0.45 = 0.45, out 1.35."""
        x = Tensor(np.ones((1, 1, 3, 3)))
        assert ic_conv_forward(x, self.single(0.05, mode)).item() == pytest.approx(1.35)

    def test_large_w_prime_reduces_to_conv(self):
        x = Tensor(np.ones((1, 1, 3, 3)))
        assert ic_conv_forward(x, self.single(10.0)).item() == pytest.approx(0.9)

    def test_reduction_to_plain_conv(self):
        """Test bitwise equality with conv2d when the inner term is negative everywhere."""
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = Tensor(rng.uniform(0.01, 1.0, (2, 3, 6, 6)))
            conv = ConvParams(weight=Tensor(rng.uniform(-1, 1, (4, 3, 3, 3))), padding=1)
            p = ICConvParams(conv=conv, w_prime=Tensor(np.full((4, 3), 2.0)))
            np.testing.assert_array_equal(ic_conv_forward(x, p).data, conv2d(x, conv).data)

    def test_zero_w_prime_doubles_nonnegative_main(self):
        rng = np.random.default_rng(2)
        x = Tensor(rng.uniform(0.01, 1.0, (2, 3, 6, 6)))
        conv = ConvParams(weight=Tensor(rng.uniform(0, 1, (4, 3, 3, 3))), padding=1)
        p = ICConvParams(conv=conv, w_prime=Tensor(np.zeros((4, 3))))
        np.testing.assert_array_equal(ic_conv_forward(x, p).data, 2 * conv2d(x, conv).data)

    @pytest.mark.parametrize("stride,padding", [(1, 0), (1, 1), (2, 1), (2, 2)])
    def test_shape_matches_conv(self, stride, padding):
        x = Tensor(np.ones((2, 3, 9, 9)))
        conv = ConvParams(weight=Tensor(np.ones((5, 3, 3, 3))), stride=stride, padding=padding)
        p = ICConvParams(conv=conv, w_prime=Tensor(np.ones((5, 3))))
        assert ic_conv_forward(x, p).shape == conv2d(x, conv).shape

    def test_one_by_one_kernel_raises(self):
        conv = ConvParams(weight=Tensor(np.ones((2, 2, 1, 1))))
        p = ICConvParams(conv=conv, w_prime=Tensor(np.ones((2, 2))))
        with pytest.raises(ContractError):
            ic_conv_forward(Tensor(np.ones((1, 2, 3, 3))), p)

    def test_grouped_w_prime_shape_validated(self):
        conv = ConvParams(weight=Tensor(np.ones((2, 3, 3, 3))))
        with pytest.raises(ValueError):
            ICConvParams(conv=conv, w_prime=Tensor(np.ones((2,))))

    def test_w_prime_gradient_follows_branch_activity(self):
        """Test that w' receives gradient exactly when the relu branch is active."""
        x = Tensor(np.ones((1, 1, 3, 3)))
        for w_prime, active in [(0.05, True), (10.0, False)]:
            reset_record()
            p = self.single(w_prime)
            p.w_prime.requires_grad = True
            backward(ic_conv_forward(x, p).sum())
            assert (p.w_prime.grad[0, 0] != 0.0) == active
        assert p.w_prime.grad[0, 0] == 0.0


class TestICCombine:
    """Test suite for ic_combine()."""

    @pytest.mark.parametrize("a,b,expected", [(1.0, -2.0, 1.0), (1.0, 0.5, 2.5), (0.0, 0.0, 0.0)])
    def test_values(self, a, b, expected):
        assert ic_combine(Tensor([a]), Tensor([b])).item() == pytest.approx(expected)

    def test_never_below_a(self):
        rng = np.random.default_rng(3)
        a, b = Tensor(rng.standard_normal(100)), Tensor(rng.standard_normal(100))
        assert np.all(ic_combine(a, b).data >= a.data)

    def test_with_batch_norm(self):
        a = Tensor(np.zeros((2, 1, 2, 2)))
        b = Tensor(np.arange(8.0).reshape(2, 1, 2, 2))
        out = ic_combine(a, b, BatchNormState.fresh(1))
        assert out.shape == a.shape
        assert np.all(out.data >= 0.0)

    def test_shape_mismatch_raises(self):
        with pytest.raises(DimensionError):
            ic_combine(Tensor([1.0]), Tensor([1.0, 2.0]))

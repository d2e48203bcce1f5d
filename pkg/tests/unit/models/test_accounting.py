"""Unit tests for models/accounting.py - analytic parameter and MAC counts."""

from pathlib import Path

import pytest

from icnet.errors import DimensionError, SpecError
from icnet.models import (
    LayerSpec,
    ModelSpec,
    build_model,
    compare_costs,
    cost_table,
    count_flops,
    count_params,
    load_model_spec,
    predicted_ic_overhead,
)

MODELS_DIR = Path(__file__).parents[3] / "configs" / "models"


def single_conv(kind: str, k: int, c_in: int, c_out: int, size: int = 16, **fields) -> ModelSpec:
    return ModelSpec(
        name=kind,
        input_shape=(c_in, size, size),
        num_classes=c_out * size * size,
        layers=[
            LayerSpec(kind=kind, channels=c_out, kernel=k, **fields),
            LayerSpec(kind="flatten"),
        ],
    )


@pytest.fixture
def conv_pair():
    base = count_params(build_model(single_conv("conv", 3, 64, 128)))
    ic = count_params(build_model(single_conv("ic_conv", 3, 64, 128)))
    return base, ic


class TestConvCosts:
    """Test the cost of one plain or IC convolution."""

    def test_conv_params_and_macs(self, conv_pair):
        """Test k=3, C'=64, C=128 at 16x16: 73728 weights, one MAC per weight per pixel."""
        base, _ = conv_pair
        assert base.total_params == 73728
        assert base.total_macs == 73728 * 256

    def test_grouped_ic_adds_c_prime_c(self, conv_pair):
        """Test that a grouped IC conv adds C'C = weights / k^2 parameters."""
        base, ic = conv_pair
        comparison = compare_costs(base, ic)
        assert comparison.added_params == 8192
        assert comparison.added_params * 9 == base.total_params
        assert ic.total_ic_params == 8192

    def test_grouped_ic_mac_overhead(self, conv_pair):
        """Test that the MAC overhead equals 1/C + 1/k^2."""
        base, ic = conv_pair
        comparison = compare_costs(base, ic)
        assert comparison.added_macs == (9 * 64 + 64 * 128) * 256
        assert comparison.mac_overhead == pytest.approx(predicted_ic_overhead(3, 128))
        assert predicted_ic_overhead(3, 128) == pytest.approx(1 / 128 + 1 / 9)

    def test_k5_small_channels(self):
        base = count_params(build_model(single_conv("conv", 5, 16, 16)))
        ic = count_params(build_model(single_conv("ic_conv", 5, 16, 16)))
        assert base.total_params == 6400
        assert compare_costs(base, ic).added_params == 256

    def test_scalar_mode_adds_one_per_output(self):
        ic = count_params(build_model(single_conv("ic_conv", 3, 8, 4, ic_mode="scalar")))
        assert ic.total_ic_params == 4

    def test_fixed_w_prime_not_counted(self):
        """Test that a non-learned w' adds MACs but no parameters."""
        ic = count_params(build_model(single_conv("ic_conv", 3, 8, 4, learn_w_prime=False)))
        assert ic.total_ic_params == 0
        assert ic.total_ic_macs > 0

    def test_one_by_one_conv_unchanged(self):
        """Test that a 1x1 conv keeps its cost when its 3x3 neighbour becomes IC."""

        def spec(kind: str) -> ModelSpec:
            return ModelSpec(
                name=kind,
                input_shape=(4, 4, 4),
                num_classes=32,
                layers=[
                    LayerSpec(kind="conv", channels=4, kernel=1),
                    LayerSpec(kind=kind, channels=2, kernel=3),
                    LayerSpec(kind="flatten"),
                ],
            )

        comparison = compare_costs(
            count_params(build_model(spec("conv"))), count_params(build_model(spec("ic_conv")))
        )
        assert comparison.layers[0].added_params == 0
        assert comparison.layers[0].added_macs == 0
        assert comparison.layers[1].added_params == 8


class TestReports:
    """Test whole-network reports and their comparison."""

    def test_resnet18_parameter_count(self):
        """Test the shipped ImageNet ResNet-18 against its well-known parameter count."""
        report = count_params(build_model(load_model_spec(MODELS_DIR / "resnet18.json")))
        assert report.total_params == 11_689_512

    def test_totals_are_layer_sums(self):
        report = count_params(build_model(load_model_spec(MODELS_DIR / "mini_resnet.json")))
        assert report.total_params == sum(c.params for c in report.layers)
        assert report.total_flops == 2 * report.total_macs

    def test_larger_input_more_macs(self):
        """Test that spatial extents may change where global pooling absorbs them."""
        network = build_model(load_model_spec(MODELS_DIR / "mini_resnet.json"))
        small, large = count_flops(network), count_flops(network, (3, 64, 64))
        assert large.total_params == small.total_params
        assert large.total_macs > small.total_macs

    def test_channel_mismatch(self):
        network = build_model(load_model_spec(MODELS_DIR / "mini_resnet.json"))
        with pytest.raises(DimensionError):
            count_flops(network, (1, 32, 32))

    def test_compare_needs_aligned_layers(self):
        a = count_params(build_model(single_conv("conv", 3, 2, 2, size=4)))
        b = count_params(build_model(load_model_spec(MODELS_DIR / "cnn4.json")))
        with pytest.raises(SpecError):
            compare_costs(a, b)

    def test_cost_table_has_total_row(self, conv_pair):
        base, ic = conv_pair
        table = cost_table([base, ic])
        assert len(table) == len(base.layers) + 1
        assert table.iloc[-1]["index"] == "total"
        assert table.iloc[-1]["ic_conv.params"] == ic.total_params

"""Unit tests for models/variants.py - aligned baseline / IC-layer / IC-block specs."""

from pathlib import Path

import pytest

from icnet.errors import SpecError
from icnet.models import LayerSpec, ModelSpec, build_model, load_model_spec, paired_variants
from icnet.models.variants import variant_for

MODELS_DIR = Path(__file__).parents[3] / "configs" / "models"


@pytest.fixture
def cnn4():
    return load_model_spec(MODELS_DIR / "cnn4.json")


class TestPairedVariants:
    """Test how each variant rewrites the baseline layers."""

    def test_names(self, cnn4):
        baseline, layer_spec, block_spec = paired_variants(cnn4)
        assert baseline is cnn4
        assert layer_spec.name == "cnn4-B"
        assert block_spec.name == "ic-cnn4"

    def test_layer_variant_marks_blocks(self, cnn4):
        """Test that the B version keeps block kinds and switches their convs to IC."""
        _, layer_spec, _ = paired_variants(cnn4)
        assert layer_spec.layers[0].kind == "plain_block"
        assert layer_spec.layers[0].ic_layers
        assert layer_spec.layers[7] == cnn4.layers[7]

    def test_block_variant_maps_blocks(self, cnn4):
        _, _, block_spec = paired_variants(cnn4)
        kinds = [layer.kind for layer in block_spec.layers]
        assert kinds[0] == kinds[3] == "ic_plain_block"
        assert kinds.count("dense") == 2

    def test_residual_blocks(self):
        spec = load_model_spec(MODELS_DIR / "mini_resnet.json")
        _, layer_spec, block_spec = paired_variants(spec)
        assert all(x.ic_layers for x in layer_spec.layers if x.kind == "basic_block")
        assert sum(x.kind == "ic_basic_block" for x in block_spec.layers) == 3

    def test_plain_convs_in_layer_variant(self):
        """Test that free-standing k >= 2 convs become IC convs and 1x1 convs stay."""
        spec = ModelSpec(
            name="mixed",
            input_shape=(2, 6, 6),
            num_classes=4,
            layers=[
                LayerSpec(kind="conv", channels=4, kernel=1),
                LayerSpec(kind="conv", channels=4, kernel=3),
                LayerSpec(kind="plain_block", channels=4),
                LayerSpec(kind="pool", pool_kind="global_avg"),
                LayerSpec(kind="flatten"),
            ],
        )
        _, layer_spec, _ = paired_variants(spec)
        assert [x.kind for x in layer_spec.layers[:2]] == ["conv", "ic_conv"]

    def test_pointwise_plain_block_stays_in_block_variant(self):
        """Test that a 1x1 plain block has no IC-block counterpart."""
        spec = ModelSpec(
            name="mixed-blocks",
            input_shape=(2, 6, 6),
            num_classes=4,
            layers=[
                LayerSpec(kind="plain_block", channels=4, kernel=1),
                LayerSpec(kind="plain_block", channels=4),
                LayerSpec(kind="pool", pool_kind="global_avg"),
                LayerSpec(kind="flatten"),
            ],
        )
        _, layer_spec, block_spec = paired_variants(spec)
        assert [x.kind for x in block_spec.layers[:2]] == ["plain_block", "ic_plain_block"]
        assert [x.ic_layers for x in layer_spec.layers[:2]] == [False, True]

    def test_rejects_ic_input(self, cnn4):
        _, _, block_spec = paired_variants(cnn4)
        with pytest.raises(SpecError) as info:
            paired_variants(block_spec)
        assert info.value.layer_index == 0

    def test_needs_a_block(self):
        spec = ModelSpec(
            name="no-block",
            input_shape=(1, 4, 4),
            num_classes=16,
            layers=[LayerSpec(kind="conv", channels=1), LayerSpec(kind="flatten")],
        )
        with pytest.raises(SpecError, match="no block"):
            paired_variants(spec)

    def test_needs_a_spatial_conv(self):
        spec = ModelSpec(
            name="pointwise",
            input_shape=(1, 4, 4),
            num_classes=16,
            layers=[LayerSpec(kind="plain_block", channels=1, kernel=1), LayerSpec(kind="flatten")],
        )
        with pytest.raises(SpecError, match="k >= 2"):
            paired_variants(spec)

    def test_variant_for(self, cnn4):
        assert variant_for(cnn4, "none") is cnn4
        assert variant_for(cnn4, "block").name == "ic-cnn4"


class TestAlignment:
    """Test that the three variants stay layer-for-layer comparable."""

    @pytest.mark.parametrize("name", ["cnn4", "mini_resnet", "bottleneck_toy"])
    def test_identical_shapes(self, name):
        spec = load_model_spec(MODELS_DIR / f"{name}.json")
        networks = [build_model(v) for v in paired_variants(spec)]
        assert networks[0].shapes == networks[1].shapes == networks[2].shapes

    def test_shared_initial_weights(self, cnn4):
        """Test that layers kept by a variant start from the baseline's weights."""
        baseline, layer_spec, _ = paired_variants(cnn4)
        a = dict(build_model(baseline, seed=5).named_parameters())
        b = dict(build_model(layer_spec, seed=5).named_parameters())
        assert (a["layers.7.weight"].data == b["layers.7.weight"].data).all()

"""Unit tests for models/network.py - building networks from model specs."""

from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from icnet.engine import Tensor
from icnet.engine.record import no_grad
from icnet.errors import DimensionError, SpecError
from icnet.models import LayerSpec, ModelSpec, build_model, load_model_spec

MODELS_DIR = Path(__file__).parents[3] / "configs" / "models"


def dense_spec(**overrides) -> ModelSpec:
    fields = dict(
        name="tiny",
        input_shape=(2,),
        num_classes=1,
        layers=[LayerSpec(kind="dense", channels=1)],
    )
    fields.update(overrides)
    return ModelSpec(**fields)


class TestLayerSpec:
    """Test the validation rules of a single layer entry."""

    def test_sized_kind_needs_channels(self):
        """Test that conv, dense and block kinds reject a missing channel count."""
        with pytest.raises(ValidationError):
            LayerSpec(kind="conv")

    def test_ic_conv_needs_spatial_kernel(self):
        """Test that a 1x1 IC convolution is rejected."""
        with pytest.raises(ValidationError):
            LayerSpec(kind="ic_conv", channels=4, kernel=1)

    def test_unknown_field_rejected(self):
        """Test that typos in a layer entry do not pass silently."""
        with pytest.raises(ValidationError):
            LayerSpec(kind="relu", chanels=4)

    def test_resolved_defaults(self):
        """Test stride, padding and bias defaults per kind."""
        conv = LayerSpec(kind="conv", channels=4, kernel=5)
        pool = LayerSpec(kind="pool", kernel=2)
        dense = LayerSpec(kind="dense", channels=3)
        assert (conv.resolved_stride(), conv.resolved_padding(), conv.resolved_bias()) == (
            1,
            2,
            False,
        )
        assert (pool.resolved_stride(), pool.resolved_padding()) == (2, 0)
        assert dense.resolved_bias()

    def test_bad_input_shape(self):
        """Test that an input shape of rank 2 is rejected."""
        with pytest.raises(ValidationError):
            dense_spec(input_shape=(2, 2))


class TestBuildModel:
    """Test build_model shape propagation and seeding."""

    def test_dense_two_to_one(self):
        """Test that a 2 -> 1 dense network holds two weights and a bias."""
        network = build_model(dense_spec())
        assert sum(p.size for p in network.parameters()) == 3
        assert network.output_shape == (1,)

    def test_same_seed_same_weights(self):
        """Test that identical seeds give identical initial parameters."""
        spec = load_model_spec(MODELS_DIR / "cnn4.json")
        a, b = build_model(spec, seed=3), build_model(spec, seed=3)
        for p, q in zip(a.parameters(), b.parameters(), strict=True):
            np.testing.assert_array_equal(p.data, q.data)

    def test_different_seed_different_weights(self):
        spec = load_model_spec(MODELS_DIR / "cnn4.json")
        a, b = build_model(spec, seed=0), build_model(spec, seed=1)
        assert not np.array_equal(a.parameters()[0].data, b.parameters()[0].data)

    def test_cnn4_shapes(self):
        """Test the per-layer shapes of the shipped MNIST network."""
        network = build_model(load_model_spec(MODELS_DIR / "cnn4.json"))
        assert network.shapes[0] == (16, 28, 28)
        assert network.shapes[2] == (16, 14, 14)
        assert network.shapes[5] == (32, 7, 7)
        assert network.shapes[6] == (32 * 7 * 7,)
        assert network.output_shape == (10,)

    def test_dense_on_image_names_layer(self):
        """Test that a missing flatten is reported with the offending layer."""
        spec = ModelSpec(
            name="broken",
            input_shape=(1, 4, 4),
            num_classes=2,
            layers=[LayerSpec(kind="conv", channels=2), LayerSpec(kind="dense", channels=2)],
        )
        with pytest.raises(SpecError) as info:
            build_model(spec)
        assert info.value.layer_index == 1
        assert info.value.kind == "dense"

    def test_wrong_final_width(self):
        """Test that a network not ending in num_classes logits is rejected."""
        with pytest.raises(SpecError, match="logits"):
            build_model(dense_spec(num_classes=3))

    def test_kernel_too_large(self):
        """Test that an unpadded kernel larger than the input is rejected."""
        spec = ModelSpec(
            name="big-kernel",
            input_shape=(1, 2, 2),
            num_classes=2,
            layers=[
                LayerSpec(kind="conv", channels=2, kernel=5, padding=0),
                LayerSpec(kind="flatten"),
            ],
        )
        with pytest.raises(SpecError) as info:
            build_model(spec)
        assert info.value.layer_index == 0

    def test_forward_shape(self):
        network = build_model(load_model_spec(MODELS_DIR / "cnn4.json"))
        x = Tensor(np.random.default_rng(0).standard_normal((2, 1, 28, 28)))
        with no_grad():
            out = network(x)
        assert out.shape == (2, 10)

    def test_forward_rejects_wrong_input(self):
        network = build_model(dense_spec())
        with pytest.raises(DimensionError):
            network(Tensor(np.zeros((4, 3))))

    def test_train_eval_switches_batch_norms(self):
        """Test that eval() puts every batch norm of every block in eval mode."""
        network = build_model(load_model_spec(MODELS_DIR / "mini_resnet.json"))
        network.eval()
        assert all(bn.mode == "eval" for bn in network.batch_norms())
        network.train()
        assert all(bn.mode == "train" for bn in network.batch_norms())


class TestShippedSpecs:
    """Test that every model spec under configs/models loads and builds."""

    @pytest.mark.parametrize("name", ["cnn4", "mini_resnet", "bottleneck_toy"])
    def test_builds(self, name):
        spec = load_model_spec(MODELS_DIR / f"{name}.json")
        network = build_model(spec)
        assert network.output_shape == (spec.num_classes,)

    def test_unknown_field_in_file(self, tmp_path):
        """Test that load_model_spec rejects documents with unknown keys."""
        path = tmp_path / "typo.json"
        path.write_text(
            '{"name": "t", "input_shape": [2], "num_classes": 1, "depth": 3,'
            ' "layers": [{"kind": "dense", "channels": 1}]}'
        )
        with pytest.raises(ValidationError):
            load_model_spec(path)

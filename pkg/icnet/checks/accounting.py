"""Cost-accounting and shape-preservation checks over layers and random model specs."""

from itertools import product

import numpy as np

from icnet.checks.data_models import CheckOptions
from icnet.engine.record import no_grad
from icnet.engine.tensor import Tensor
from icnet.errors import PropertyViolation
from icnet.models.accounting import compare_costs, count_params, predicted_ic_overhead
from icnet.models.data_models import LayerSpec, ModelSpec
from icnet.models.network import build_model
from icnet.models.variants import paired_variants

OVERHEAD_TOLERANCE = 0.15


def ic_conv_overhead(k: int, c_in: int, c_out: int, size: int = 16) -> dict:
    """Added params and MAC ratio of one grouped IC conv over its plain convolution."""
    conv = LayerSpec(kind="conv", channels=c_out, kernel=k)
    spec = ModelSpec(
        name=f"conv{k}x{k}_{c_in}_{c_out}",
        input_shape=(c_in, size, size),
        num_classes=c_out * size * size,
        layers=[conv, LayerSpec(kind="flatten")],
    )
    ic_spec = spec.model_copy(
        update={"layers": [conv.model_copy(update={"kind": "ic_conv"}), LayerSpec(kind="flatten")]}
    )
    base, ic = count_params(build_model(spec)), count_params(build_model(ic_spec))
    comparison = compare_costs(base, ic)
    return {
        "conv_params": base.total_params,
        "added_params": comparison.added_params,
        "param_ratio": comparison.added_params / base.total_params,
        "mac_ratio": comparison.mac_overhead,
        "predicted_mac_ratio": predicted_ic_overhead(k, c_out),
    }


def check_overhead(opts: CheckOptions) -> str:
    """Grouped IC conv adds exactly C'C parameters and about 1/C + 1/k^2 of the MACs."""
    ks = [opts.k] if opts.k else [3, 5]
    cins = [opts.cin] if opts.cin else [16, 64]
    couts = [opts.cout] if opts.cout else [16, 128]
    lines = []
    for k, c_in, c_out in product(ks, cins, couts):
        o = ic_conv_overhead(k, c_in, c_out)
        if o["added_params"] != c_in * c_out or o["added_params"] * k * k != o["conv_params"]:
            raise PropertyViolation(
                f"k={k} C'={c_in} C={c_out}: added {o['added_params']} params, expected "
                f"{c_in * c_out} = {o['conv_params']}/{k * k}",
                (k, c_in, c_out),
            )
        predicted = o["predicted_mac_ratio"]
        if abs(o["mac_ratio"] - predicted) > OVERHEAD_TOLERANCE * predicted:
            raise PropertyViolation(
                f"k={k} C'={c_in} C={c_out}: MAC overhead {o['mac_ratio']:.4f} vs "
                f"predicted {predicted:.4f}",
                (k, c_in, c_out),
            )
        lines.append(
            f"k={k} C'={c_in} C={c_out}: +{o['added_params']} params (ratio 1/{k * k}), "
            f"MAC overhead {o['mac_ratio']:.4f} (predicted {predicted:.4f})"
        )
    return "; ".join(lines)


def random_model_spec(rng: np.random.Generator, index: int = 0) -> ModelSpec:
    """Small random CNN with at least one block, ending in global pooling and a classifier."""
    channels = int(rng.choice([1, 3]))
    input_size = size = int(rng.choice([8, 12]))
    layers = [
        LayerSpec(kind="plain_block", channels=int(rng.choice([4, 8])), kernel=3),
        LayerSpec(kind="relu"),
    ]
    for _ in range(int(rng.integers(1, 4))):
        choice = rng.choice(["basic", "bottleneck", "plain", "conv", "pool"])
        out = int(rng.choice([4, 8]))
        if choice == "basic":
            stride = int(rng.choice([1, 2]))
            layers.append(LayerSpec(kind="basic_block", channels=out, stride=stride))
            size = (size - 1) // stride + 1
        elif choice == "bottleneck":
            layers.append(LayerSpec(kind="bottleneck_block", channels=out))
        elif choice == "plain":
            k = int(rng.choice([1, 3, 5]))
            layers += [
                LayerSpec(kind="plain_block", channels=out, kernel=k),
                LayerSpec(kind="relu"),
            ]
        elif choice == "conv":
            k = int(rng.choice([1, 3]))
            layers += [
                LayerSpec(kind="conv", channels=out, kernel=k),
                LayerSpec(kind="bn"),
                LayerSpec(kind="relu"),
            ]
        elif size >= 4:
            layers.append(LayerSpec(kind="pool", pool_kind="max", kernel=2))
            size //= 2
    layers += [
        LayerSpec(kind="pool", pool_kind="global_avg"),
        LayerSpec(kind="flatten"),
        LayerSpec(kind="dense", channels=10),
    ]
    return ModelSpec(
        name=f"random{index}",
        input_shape=(channels, input_size, input_size),
        num_classes=10,
        layers=layers,
    )


def check_shapes(opts: CheckOptions) -> str:
    """All three paired variants of random specs agree on every layer's output shape."""
    rng = np.random.default_rng(opts.seed)
    trials = opts.trials or 50
    for trial in range(trials):
        spec = random_model_spec(rng, trial)
        networks = [build_model(variant, trial) for variant in paired_variants(spec)]
        if any(net.shapes != networks[0].shapes for net in networks[1:]):
            raise PropertyViolation(f"{spec.name}: layer shapes differ between variants", spec)
        x = Tensor(rng.standard_normal((2, *spec.input_shape)))
        with no_grad():
            outputs = []
            for net in networks:
                out = x
                for layer, expected in zip(net.layers, net.shapes, strict=True):
                    out = layer(out)
                    if out.shape[1:] != expected:
                        raise PropertyViolation(
                            f"{net.spec.name} layer {layer.index} ({layer.kind}) produced "
                            f"{out.shape[1:]}, expected {expected}",
                            spec,
                        )
                outputs.append(out.shape)
        if len(set(outputs)) != 1:
            raise PropertyViolation(f"{spec.name}: output shapes differ {outputs}", spec)
    return f"{trials} random specs keep identical layer shapes across variants"

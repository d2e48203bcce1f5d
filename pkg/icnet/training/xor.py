"""Single-neuron XOR experiment: a standard relu neuron against an IC neuron.

Both classifiers read the neuron output y through a learnable affine map and use the
logits [a * y + c, 0], so the decision is a threshold on y. The IC neuron output is
convex in x, so class 1 ((0, 1) and (1, 0)) is the low side of y.

Weights start at standard deviation 0.3 and the inner bias in U(0, 1), so the inner relu
is live at the origin when training starts.
"""

from collections.abc import Iterator
from typing import Literal

import numpy as np
from loguru import logger
from tqdm import tqdm

from icnet.data.synthetic import xor_dataset
from icnet.engine.autodiff import backward
from icnet.engine.record import no_grad, reset_record
from icnet.engine.tensor import Tensor
from icnet.geometry.data_models import TwoInputNeuron
from icnet.ic.data_models import ICDenseParams
from icnet.ic.functional import ic_dense_forward
from icnet.nn.functional import dense, softmax_cross_entropy
from icnet.nn.module import Module
from icnet.training.data_models import TrainConfig, XORConfig, XORReport, XORRun
from icnet.training.optim import SGD

NeuronKind = Literal["standard", "ic"]


class SingleNeuronClassifier(Module):
    def __init__(self, kind: NeuronKind, seed: int):
        rng = np.random.default_rng(seed)
        self.kind = kind
        self.weight = Tensor(0.3 * rng.standard_normal((1, 2)), requires_grad=True, name="weight")
        self.bias = Tensor(rng.uniform(-1, 1, 1), requires_grad=True, name="bias")
        self.bias_inner = Tensor(rng.uniform(0, 1, 1), requires_grad=True, name="bias_inner")
        self.w_prime = Tensor([1.0], requires_grad=True, name="w_prime")
        self.scale = Tensor([[1.0]], requires_grad=True, name="scale")
        self.offset = Tensor([0.0], requires_grad=True, name="offset")
        self.ic_params = ICDenseParams(
            weight=self.weight,
            w_prime=self.w_prime,
            bias_main=self.bias,
            bias_inner=self.bias_inner,
        )

    def neuron(self, x: Tensor) -> Tensor:
        if self.kind == "standard":
            return dense(x, self.weight, self.bias).relu()
        return ic_dense_forward(x, self.ic_params)

    def forward(self, x: Tensor) -> Tensor:
        z = dense(self.neuron(x), self.scale, self.offset)
        n = x.shape[0]
        mask = Tensor(np.tile([1.0, 0.0], (n, 1)))
        return z.broadcast_to((n, 2)) * mask

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        yield "weight", self.weight
        yield "bias", self.bias
        if self.kind == "ic":
            yield "bias_inner", self.bias_inner
            yield "w_prime", self.w_prime
        yield "scale", self.scale
        yield "offset", self.offset

    def as_two_input(self) -> TwoInputNeuron:
        """The trained neuron as a :class:`TwoInputNeuron` for region maps."""
        w = tuple(float(v) for v in self.weight.data[0])
        if self.kind == "standard":
            return TwoInputNeuron(w=w, b1=float(self.bias.data[0]))
        wp = float(self.w_prime.data[0])
        return TwoInputNeuron(
            w=w,
            b1=float(self.bias.data[0]),
            w_inner=(w[0] - wp, w[1] - wp),
            b2=float(self.bias_inner.data[0]),
            outer_relu=False,
        )


def train_xor_neuron(
    kind: NeuronKind, seed: int, cfg: XORConfig
) -> tuple[SingleNeuronClassifier, XORRun]:
    """Full-batch momentum SGD on the four XOR points."""
    ds = xor_dataset()
    x, labels = ds.batch(np.arange(len(ds)))
    model = SingleNeuronClassifier(kind, seed)
    optimizer = SGD(
        list(model.named_parameters()),
        TrainConfig(lr0=cfg.lr, momentum=cfg.momentum, weight_decay=0.0, seed=seed),
    )
    loss_value = float("nan")
    for _ in range(cfg.steps):
        optimizer.zero_grad()
        reset_record()
        loss = softmax_cross_entropy(model(x), labels)
        loss_value = loss.item()
        if not np.isfinite(loss_value):
            reset_record()
            break
        backward(loss)
        optimizer.step(cfg.lr)

    with no_grad():
        predictions = model(x).data.argmax(axis=1)
    accuracy = float((predictions == labels).mean())
    run = XORRun(
        seed=seed, neuron=kind, accuracy=accuracy, final_loss=loss_value, solved=accuracy == 1.0
    )
    logger.debug(f"XOR {kind} seed {seed}: accuracy {accuracy:.2f}, loss {loss_value:.4f}")
    return model, run


def run_xor_experiment(cfg: XORConfig) -> tuple[XORReport, SingleNeuronClassifier | None]:
    """Train both neuron kinds for each seed; returns the report and the last solved IC model."""
    runs: list[XORRun] = []
    solved_ic = None
    seeds = range(cfg.first_seed, cfg.first_seed + cfg.seeds)
    for seed in tqdm(seeds, desc="XOR seeds"):
        for kind in ("standard", "ic"):
            model, run = train_xor_neuron(kind, seed, cfg)
            runs.append(run)
            if kind == "ic" and (run.solved or solved_ic is None):
                solved_ic = model
    report = XORReport(
        runs=runs,
        ic_successes=sum(r.solved for r in runs if r.neuron == "ic"),
        standard_successes=sum(r.solved for r in runs if r.neuron == "standard"),
        seeds=cfg.seeds,
    )
    logger.success(
        f"XOR: IC neuron solved {report.ic_successes}/{cfg.seeds}, "
        f"standard neuron {report.standard_successes}/{cfg.seeds}"
    )
    return report, solved_ic

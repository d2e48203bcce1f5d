from icnet.training.data_models import (
    DecayExempt,
    MetricsRecord,
    RunSummary,
    TrainConfig,
    XORConfig,
    XORReport,
    XORRun,
)
from icnet.training.experiments import run_paired_convergence, summarize_convergence
from icnet.training.loop import evaluate, iterate_minibatches, train_epochs
from icnet.training.optim import SGD, lr_at, sgd_step
from icnet.training.xor import SingleNeuronClassifier, run_xor_experiment, train_xor_neuron

__all__ = [
    "SGD",
    "DecayExempt",
    "MetricsRecord",
    "RunSummary",
    "SingleNeuronClassifier",
    "TrainConfig",
    "XORConfig",
    "XORReport",
    "XORRun",
    "evaluate",
    "iterate_minibatches",
    "lr_at",
    "run_paired_convergence",
    "run_xor_experiment",
    "sgd_step",
    "summarize_convergence",
    "train_epochs",
    "train_xor_neuron",
]

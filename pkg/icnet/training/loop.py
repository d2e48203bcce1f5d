import time
from collections.abc import Callable, Iterator, Sequence

import numpy as np
from loguru import logger
from tqdm import tqdm

from icnet.data.data_models import LabeledDataset
from icnet.data.transforms import Augmenter
from icnet.engine.autodiff import backward
from icnet.engine.record import no_grad, reset_record
from icnet.engine.tensor import Tensor
from icnet.errors import ContractError, NumericError
from icnet.nn.functional import softmax_cross_entropy
from icnet.nn.module import Module
from icnet.training.data_models import MetricsRecord, TrainConfig
from icnet.training.optim import SGD, lr_at

EpochHook = Callable[[MetricsRecord], None]


def iterate_minibatches(
    n: int, batch_size: int, rng: np.random.Generator | None = None
) -> Iterator[np.ndarray]:
    """Index arrays covering range(n); shuffled when ``rng`` is given, the last may be short."""
    order = rng.permutation(n) if rng is not None else np.arange(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def evaluate(network: Module, ds: LabeledDataset, batch_size: int = 256) -> tuple[float, float]:
    """Mean cross-entropy and top-1 accuracy with batch norms in eval mode, nothing recorded."""
    was_training = network.training
    network.eval()
    total_loss = 0.0
    correct = 0
    try:
        with no_grad():
            for indices in iterate_minibatches(len(ds), batch_size):
                x, labels = ds.batch(indices)
                logits = network(x)
                total_loss += softmax_cross_entropy(logits, labels).item() * len(indices)
                correct += int((logits.data.argmax(axis=1) == labels).sum())
    finally:
        network.train(was_training)
    return total_loss / len(ds), correct / len(ds)


def train_epochs(
    network: Module,
    train_ds: LabeledDataset,
    eval_ds: LabeledDataset,
    cfg: TrainConfig,
    hooks: Sequence[EpochHook] = (),
    augment: Augmenter | None = None,
    progress: bool = True,
) -> list[MetricsRecord]:
    """Run ``cfg.total_epochs`` epochs of minibatch SGD, evaluating after each.

    Epoch e shuffles with a generator seeded by (cfg.seed, e), so the run is a pure
    function of (seed, config, data, initial parameters). Each hook is called with the
    epoch's record as soon as it is complete.

    Raises:
        NumericError: The loss of some batch is not finite; carries epoch and batch index.
    """
    if len(train_ds) == 0:
        raise ContractError("training set is empty")
    optimizer = SGD(list(network.named_parameters()), cfg)
    metrics: list[MetricsRecord] = []
    network.train()

    for epoch in range(cfg.total_epochs):
        start = time.perf_counter()
        lr = lr_at(epoch, cfg)
        rng = np.random.default_rng((cfg.seed, epoch))
        total_loss = 0.0
        correct = 0
        batches = iterate_minibatches(len(train_ds), cfg.batch_size, rng)
        num_batches = -(-len(train_ds) // cfg.batch_size)
        bar = tqdm(
            batches, total=num_batches, desc=f"Epoch {epoch}", leave=False, disable=not progress
        )
        for batch, indices in enumerate(bar):
            x, labels = train_ds.batch(indices)
            if augment is not None:
                x = Tensor(augment.apply(x.data, epoch, indices))
            optimizer.zero_grad()
            reset_record()
            logits = network(x)
            loss = softmax_cross_entropy(logits, labels)
            value = loss.item()
            if not np.isfinite(value):
                reset_record()
                raise NumericError(
                    f"non-finite loss {value} at epoch {epoch}, batch {batch}", epoch, batch
                )
            backward(loss)
            optimizer.step(lr)
            total_loss += value * len(indices)
            correct += int((logits.data.argmax(axis=1) == labels).sum())
            logger.debug(f"epoch {epoch} batch {batch}: loss {value:.4f}")

        eval_loss, eval_acc = evaluate(network, eval_ds, cfg.batch_size)
        record = MetricsRecord(
            epoch=epoch,
            lr=lr,
            train_loss=total_loss / len(train_ds),
            train_acc=correct / len(train_ds),
            eval_loss=eval_loss,
            eval_acc=eval_acc,
            wall_seconds=time.perf_counter() - start if cfg.timing else 0.0,
        )
        metrics.append(record)
        for hook in hooks:
            hook(record)
        logger.success(
            f"Epoch {epoch}: lr {lr:.4g}, train loss {record.train_loss:.4f} "
            f"acc {record.train_acc:.4f}, eval loss {eval_loss:.4f} acc {eval_acc:.4f}"
        )
    return metrics

from collections.abc import Sequence

import numpy as np

from icnet.engine.tensor import Tensor
from icnet.errors import ContractError, DimensionError
from icnet.training.data_models import DecayExempt, TrainConfig

_EXEMPT_SUFFIXES = {
    DecayExempt.NONE: (),
    DecayExempt.BN: (".gamma", ".beta"),
    DecayExempt.W_PRIME: (".w_prime",),
    DecayExempt.BN_AND_W_PRIME: (".gamma", ".beta", ".w_prime"),
}


def lr_at(epoch: int, cfg: TrainConfig) -> float:
    """Learning rate of ``epoch`` (0-based).

    lr0 * factor ** (drops so far), where drops happen every ``lr_drop_every`` epochs or
    at each of ``lr_milestones``; epochs of the final stage use ``final_stage_lr``.
    """
    if epoch < 0:
        raise ContractError(f"epoch must be non-negative, got {epoch}")
    if cfg.final_stage_epochs and epoch >= cfg.epochs:
        return cfg.final_stage_lr
    if cfg.lr_milestones is not None:
        drops = sum(1 for m in cfg.lr_milestones if epoch >= m)
    else:
        drops = epoch // cfg.lr_drop_every
    return cfg.lr0 * cfg.lr_drop_factor**drops


def sgd_step(
    params: Sequence[Tensor],
    grads: Sequence[np.ndarray | None],
    velocity: list[np.ndarray],
    cfg: TrainConfig,
    lr: float,
    decay: Sequence[bool] | None = None,
) -> list[np.ndarray]:
    """One in-place update: g = grad + wd * p; v = mu * v + g; p = p - lr * v.

    A missing gradient counts as zero. ``decay[i] = False`` turns weight decay off for
    parameter i. Returns the updated velocity list.
    """
    if lr <= 0:
        raise ContractError(f"learning rate must be positive, got {lr}")
    if not len(params) == len(grads) == len(velocity):
        raise DimensionError(
            f"{len(params)} params, {len(grads)} grads, {len(velocity)} velocity slots"
        )
    for i, (p, grad) in enumerate(zip(params, grads, strict=True)):
        g = np.zeros_like(p.data) if grad is None else grad
        if g.shape != p.shape or velocity[i].shape != p.shape:
            raise DimensionError(
                f"parameter {p.name or i}: shape {p.shape}, grad {g.shape}, "
                f"velocity {velocity[i].shape}"
            )
        if cfg.weight_decay and (decay is None or decay[i]):
            g = g + cfg.weight_decay * p.data
        velocity[i] = cfg.momentum * velocity[i] + g
        p.data -= lr * velocity[i]
    return velocity


class SGD:
    """Momentum SGD over named parameters, with weight-decay exemptions by name suffix."""

    def __init__(self, named_params: Sequence[tuple[str, Tensor]], cfg: TrainConfig):
        self.names = [name for name, _ in named_params]
        self.params = [p for _, p in named_params]
        self.cfg = cfg
        self.velocity = [np.zeros_like(p.data) for p in self.params]
        suffixes = _EXEMPT_SUFFIXES[cfg.decay_exempt]
        self.decay = [not name.endswith(suffixes) if suffixes else True for name in self.names]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self, lr: float) -> None:
        grads = [p.grad for p in self.params]
        sgd_step(self.params, grads, self.velocity, self.cfg, lr, self.decay)

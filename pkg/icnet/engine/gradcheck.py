from collections.abc import Callable, Sequence

import numpy as np
from loguru import logger

from icnet.engine.autodiff import backward, zero_grads
from icnet.engine.record import no_grad, reset_record, trace_kinks
from icnet.engine.tensor import Tensor
from icnet.errors import ContractError, NumericError

Exclusion = Callable[[Tensor, int], bool]


def near_zero(threshold: float) -> Exclusion:
    """Exclusion predicate skipping coordinates whose current value is within ``threshold`` of 0."""
    return lambda tensor, index: abs(tensor.data.flat[index]) < threshold


def _probe(f: Callable[[], Tensor]) -> tuple[float, list]:
    with no_grad(), trace_kinks() as trace:
        value = f().item()
    if not np.isfinite(value):
        raise NumericError(f"objective is not finite at probe point ({value})")
    return value, trace


def finite_diff_check(
    f: Callable[[], Tensor],
    params: Sequence[Tensor],
    eps: float = 1e-3,
    exclusion: Exclusion | None = None,
    skip_kinks: bool = True,
) -> float:
    """Compare backward() gradients with central differences.

    ``f`` reads the current values of ``params`` and returns a scalar tensor. Each
    coordinate is perturbed by ``+-eps`` in place; coordinates where ``exclusion`` holds
    are skipped, and with ``skip_kinks`` so are coordinates whose perturbation flips any
    ReLU or max-pool decision (the central difference straddles a kink there).

    Returns:
        max over tested coordinates of |analytic - numeric| / max(1, |numeric|);
        0.0 when every coordinate was skipped.
    """
    if eps <= 0:
        raise ContractError(f"eps must be positive, got {eps}")

    zero_grads(params)
    reset_record()
    loss = f()
    backward(loss)
    analytic = [np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params]

    _, base_trace = _probe(f)
    worst = 0.0
    tested = skipped = 0
    for p, grad in zip(params, analytic, strict=True):
        flat = p.data.reshape(-1)
        for i in range(flat.size):
            if exclusion is not None and exclusion(p, i):
                skipped += 1
                continue
            original = flat[i]
            flat[i] = original + eps
            f_plus, trace_plus = _probe(f)
            flat[i] = original - eps
            f_minus, trace_minus = _probe(f)
            flat[i] = original
            if skip_kinks and (trace_plus != base_trace or trace_minus != base_trace):
                skipped += 1
                continue
            numeric = (f_plus - f_minus) / (2 * eps)
            err = abs(grad.flat[i] - numeric) / max(1.0, abs(numeric))
            worst = max(worst, err)
            tested += 1

    logger.debug(
        f"Gradient check: {tested} coordinates tested, {skipped} skipped, max err {worst:.3e}"
    )
    return worst

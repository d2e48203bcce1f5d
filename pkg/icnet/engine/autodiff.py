from collections.abc import Iterable

import numpy as np
from loguru import logger

from icnet.engine.tensor import Tensor
from icnet.errors import ContractError, GraphStateError


def backward(loss: Tensor, retain_record: bool = False) -> dict[Tensor, np.ndarray]:
    """Reverse-mode pass from a scalar ``loss``.

    Gradients are added into ``.grad`` of every ``requires_grad`` tensor reachable from the
    loss (accumulation is additive, callers zero grads between steps). The record is
    released afterwards unless ``retain_record`` is set.

    Args:
        loss: Single-element tensor produced on a live computation record.
        retain_record: Keep the record alive for further backward passes.

    Returns:
        Map from each reachable leaf tensor to the gradient contributed by this pass.
    """
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        raise ContractError("loss does not depend on any tensor that requires grad")

    seed = np.ones_like(loss.data)
    if loss.record is None:
        loss.accumulate_grad(seed)
        return {loss: seed}

    record = loss.record
    if not record.alive:
        raise GraphStateError("backward on a released computation record")

    grads: dict[int, np.ndarray] = {loss.node_id: seed}
    for op in reversed(record.ops[: loss.op_index + 1]):
        g = grads.pop(op.output, None)
        if g is None:
            continue
        record.tensors[op.output].accumulate_grad(g)
        for node_id, input_grad in zip(op.inputs, op.backward(g), strict=True):
            if node_id is None or input_grad is None:
                continue
            if node_id in grads:
                grads[node_id] = grads[node_id] + input_grad
            else:
                grads[node_id] = input_grad

    leaf_grads: dict[Tensor, np.ndarray] = {}
    for node_id, g in grads.items():
        tensor = record.tensors[node_id]
        tensor.accumulate_grad(g)
        leaf_grads[tensor] = g

    logger.debug(f"Backward visited {loss.op_index + 1} ops, {len(leaf_grads)} leaves")
    if not retain_record:
        record.release()
    return leaf_grads


def zero_grads(params: Iterable[Tensor]) -> None:
    for p in params:
        p.zero_grad()

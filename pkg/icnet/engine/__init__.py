from icnet.engine.autodiff import backward, zero_grads
from icnet.engine.gradcheck import finite_diff_check, near_zero
from icnet.engine.record import ComputationRecord, no_grad, reset_record
from icnet.engine.tensor import (
    ACTIVATIONS,
    Tensor,
    broadcast_to,
    create,
    elementwise,
    identity,
    matmul,
    relu,
    reshape,
)

__all__ = [
    "ACTIVATIONS",
    "ComputationRecord",
    "Tensor",
    "backward",
    "broadcast_to",
    "create",
    "elementwise",
    "finite_diff_check",
    "identity",
    "matmul",
    "near_zero",
    "no_grad",
    "relu",
    "reset_record",
    "reshape",
    "zero_grads",
]

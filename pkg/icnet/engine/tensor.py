import itertools
from collections.abc import Sequence
from typing import Literal

import numpy as np

from icnet.engine.record import (
    RecordedOp,
    current_record,
    is_grad_enabled,
    note_pattern,
)
from icnet.errors import ContractError, DimensionError, GraphStateError

_node_ids = itertools.count()

ElementwiseKind = Literal["add", "sub", "mul", "scalar-mul", "relu"]


class Tensor:
    """Dense float64 array with an optional gradient slot.

    ``data`` is always a C-contiguous float64 array, so ``data.ravel()`` is the row-major
    element storage. Tensors produced while gradient recording is enabled and that depend
    on a ``requires_grad`` tensor are linked into the active computation record.
    """

    __array_priority__ = 100

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.name = name
        self.node_id = next(_node_ids)
        self.record = None
        self.op_index: int | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.data

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, grad: np.ndarray) -> None:
        if grad.shape != self.shape:
            raise DimensionError(f"gradient shape {grad.shape} != tensor shape {self.shape}")
        self.grad = grad.copy() if self.grad is None else self.grad + grad

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    def __add__(self, other):
        return elementwise("add", self, other)

    def __radd__(self, other):
        return elementwise("add", self, other)

    def __sub__(self, other):
        return elementwise("sub", self, other)

    def __rsub__(self, other):
        return elementwise("add", elementwise("scalar-mul", self, -1.0), other)

    def __mul__(self, other):
        kind = "mul" if isinstance(other, Tensor) else "scalar-mul"
        return elementwise(kind, self, other)

    def __rmul__(self, other):
        return elementwise("scalar-mul", self, other)

    def __neg__(self):
        return elementwise("scalar-mul", self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def relu(self) -> "Tensor":
        return elementwise("relu", self, None)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        return reduce_sum(self, axis, keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        total = reduce_sum(self, axis, keepdims)
        count = self.size // max(total.size, 1) if axis is not None else self.size
        return elementwise("scalar-mul", total, 1.0 / count)

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], tuple | list):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def broadcast_to(self, shape: Sequence[int]) -> "Tensor":
        return broadcast_to(self, tuple(shape))


def record_op(
    name: str,
    out_data: np.ndarray,
    inputs: Sequence[Tensor | None],
    backward,
) -> Tensor:
    """Wrap ``out_data`` in a Tensor and append its backward rule to the active record.

    ``backward`` receives the output gradient and returns one gradient (or None) per entry
    of ``inputs``. Nothing is recorded when recording is disabled or no input needs grad.
    """
    tracked = [t for t in inputs if t is not None and t.requires_grad]
    out = Tensor(out_data)
    if not tracked or not is_grad_enabled():
        return out

    record = current_record()
    for t in tracked:
        if t.record is not None and t.record is not record:
            raise GraphStateError(f"{t!r} belongs to a released computation record")

    out.requires_grad = True
    out.record = record
    op = RecordedOp(
        name=name,
        inputs=tuple(t.node_id if t is not None and t.requires_grad else None for t in inputs),
        output=out.node_id,
        backward=backward,
    )
    participants = {t.node_id: t for t in tracked}
    participants[out.node_id] = out
    out.op_index = record.append(op, participants)
    return out


def create(shape: Sequence[int], fill=0.0, requires_grad: bool = False) -> Tensor:
    """Build a tensor of ``shape`` from a scalar fill value or a flat element array."""
    shape = tuple(int(s) for s in shape)
    if any(s < 0 for s in shape):
        raise DimensionError(f"negative extent in shape {shape}")
    if np.isscalar(fill):
        data = np.full(shape, float(fill), dtype=np.float64)
    else:
        flat = np.asarray(fill, dtype=np.float64).ravel()
        expected = int(np.prod(shape, dtype=np.int64))
        if flat.size != expected:
            raise DimensionError(
                f"fill has {flat.size} elements but shape {list(shape)} needs {expected}"
            )
        data = flat.reshape(shape)
    return Tensor(data, requires_grad=requires_grad)


def elementwise(kind: ElementwiseKind, a: Tensor, b=None) -> Tensor:
    """Elementwise add, sub, mul (equal shapes), scalar-mul (b a number) or relu (b unused)."""
    if kind == "relu":
        mask = a.data > 0
        note_pattern(mask)
        # NaN passes through so non-finite activations reach the loss
        out = np.where(mask | np.isnan(a.data), a.data, 0.0)
        return record_op("relu", out, (a,), lambda g: (g * mask,))

    if kind == "scalar-mul":
        if isinstance(b, Tensor):
            raise ContractError("scalar-mul expects a number as second operand")
        c = float(b)
        return record_op("scalar-mul", a.data * c, (a,), lambda g: (g * c,))

    if not isinstance(b, Tensor):
        if not np.isscalar(b):
            raise DimensionError(f"{kind} expects a Tensor of shape {a.shape} or a scalar")
        c = float(b)
        if kind == "add":
            return record_op("add-scalar", a.data + c, (a,), lambda g: (g,))
        if kind == "sub":
            return record_op("sub-scalar", a.data - c, (a,), lambda g: (g,))
        return record_op("scalar-mul", a.data * c, (a,), lambda g: (g * c,))

    if a.shape != b.shape:
        raise DimensionError(f"{kind}: shape mismatch {a.shape} vs {b.shape}")
    if kind == "add":
        return record_op("add", a.data + b.data, (a, b), lambda g: (g, g))
    if kind == "sub":
        return record_op("sub", a.data - b.data, (a, b), lambda g: (g, -g))
    if kind == "mul":
        a_data, b_data = a.data, b.data
        return record_op("mul", a_data * b_data, (a, b), lambda g: (g * b_data, g * a_data))
    raise ContractError(f"unknown elementwise kind {kind!r}")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul needs rank-2 operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul inner extents differ: {a.shape} x {b.shape}")
    a_data, b_data = a.data, b.data

    def backward(g):
        ga = g @ b_data.T if a.requires_grad else None
        gb = a_data.T @ g if b.requires_grad else None
        return ga, gb

    return record_op("matmul", a_data @ b_data, (a, b), backward)


def reduce_sum(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = a.data.sum(axis=axis, keepdims=keepdims)
    in_shape = a.shape

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, in_shape).copy(),)

    return record_op("sum", np.asarray(out), (a,), backward)


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    try:
        out = a.data.reshape(shape)
    except ValueError as e:
        raise DimensionError(f"cannot reshape {a.shape} to {shape}") from e
    in_shape = a.shape
    return record_op("reshape", out, (a,), lambda g: (g.reshape(in_shape),))


def broadcast_to(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    """Broadcast following numpy rules; the backward pass sums over broadcast axes."""
    try:
        out = np.broadcast_to(a.data, shape).copy()
    except ValueError as e:
        raise DimensionError(f"cannot broadcast {a.shape} to {shape}") from e
    in_shape = a.shape
    lead = len(shape) - len(in_shape)

    def backward(g):
        g = g.sum(axis=tuple(range(lead))) if lead else g
        axes = tuple(i for i, s in enumerate(in_shape) if s == 1 and g.shape[i] != 1)
        if axes:
            g = g.sum(axis=axes, keepdims=True)
        return (g,)

    return record_op("broadcast", out, (a,), backward)


def relu(a: Tensor) -> Tensor:
    return elementwise("relu", a)


def identity(a: Tensor) -> Tensor:
    return a


ACTIVATIONS = {
    "identity": identity,
    "relu": relu,
}

from collections.abc import Callable, Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from typing import NamedTuple

import numpy as np
from loguru import logger

BackwardRule = Callable[[np.ndarray], tuple[np.ndarray | None, ...]]


class RecordedOp(NamedTuple):
    """One differentiable operation: input node ids, output node id and its backward rule."""

    name: str
    inputs: tuple[int | None, ...]
    output: int
    backward: BackwardRule


class ComputationRecord:
    """Ordered tape of operations for reverse-mode differentiation.

    Operations are appended as they execute, so the list is topologically ordered by
    construction. A record is confined to the thread (context) that created it.
    """

    def __init__(self):
        self.ops: list[RecordedOp] = []
        self.tensors: dict[int, object] = {}
        self.alive = True

    def append(self, op: RecordedOp, participants: dict[int, object]) -> int:
        self.tensors.update(participants)
        self.ops.append(op)
        return len(self.ops) - 1

    def release(self) -> None:
        """Drop all recorded operations; later backward calls on this record fail."""
        logger.debug(f"Releasing computation record with {len(self.ops)} ops")
        self.ops.clear()
        self.tensors.clear()
        self.alive = False

    def __len__(self) -> int:
        return len(self.ops)


_active_record: ContextVar[ComputationRecord | None] = ContextVar("active_record", default=None)
_grad_enabled: ContextVar[bool] = ContextVar("grad_enabled", default=True)
_kink_trace: ContextVar[list | None] = ContextVar("kink_trace", default=None)


def current_record() -> ComputationRecord:
    """Return the live record of this context, starting a fresh one if needed."""
    record = _active_record.get()
    if record is None or not record.alive:
        record = ComputationRecord()
        _active_record.set(record)
    return record


def reset_record() -> None:
    """Discard the current record (e.g. after an abandoned forward pass)."""
    record = _active_record.get()
    if record is not None and record.alive:
        record.release()
    _active_record.set(None)


def is_grad_enabled() -> bool:
    return _grad_enabled.get()


@contextmanager
def no_grad() -> Iterator[None]:
    """Run forward operations without recording them."""
    token = _grad_enabled.set(False)
    try:
        yield
    finally:
        _grad_enabled.reset(token)


@contextmanager
def trace_kinks() -> Iterator[list]:
    """Collect activation-pattern fingerprints of every ReLU / max-pool evaluated inside.

    Two forward passes that cross no kink produce identical traces.
    """
    trace: list = []
    token = _kink_trace.set(trace)
    try:
        yield trace
    finally:
        _kink_trace.reset(token)


def note_pattern(pattern: np.ndarray) -> None:
    trace = _kink_trace.get()
    if trace is not None:
        trace.append(hash(np.ascontiguousarray(pattern).tobytes()))

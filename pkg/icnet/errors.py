"""Error taxonomy shared by all icnet modules.

Every class derives from the builtin exception a caller would naturally catch, so
``except ValueError`` around shape or format problems keeps working.
"""


class DimensionError(ValueError):
    """Shape, extent or channel mismatch."""


class ContractError(ValueError):
    """A documented precondition of an operation does not hold."""


class GraphStateError(RuntimeError):
    """Backward requested on a computation record that has already been released."""


class NumericError(ArithmeticError):
    """Non-finite values where finite ones are required."""

    def __init__(self, message: str, epoch: int | None = None, batch: int | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class FormatError(ValueError):
    """Malformed binary dataset file."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SpecError(ValueError):
    """Model spec that cannot be built or transformed."""

    def __init__(self, message: str, layer_index: int | None = None, kind: str | None = None):
        where = f"layer {layer_index} ({kind}): " if layer_index is not None else ""
        super().__init__(f"{where}{message}")
        self.layer_index = layer_index
        self.kind = kind


class PropertyViolation(AssertionError):
    """A numerical property check failed; ``value`` holds the offending input."""

    def __init__(self, message: str, value=None):
        super().__init__(message)
        self.value = value

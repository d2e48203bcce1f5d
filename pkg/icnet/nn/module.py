from collections.abc import Iterator

from icnet.engine.tensor import Tensor
from icnet.nn.data_models import BatchNormState


class Module:
    """Base class for anything with a forward pass and named parameters.

    Subclasses implement :meth:`forward`, :meth:`named_parameters` and, when they hold
    batch norms, :meth:`batch_norms`.
    """

    training: bool = True

    def forward(self, x: Tensor) -> Tensor:
        raise NotImplementedError

    def __call__(self, x: Tensor) -> Tensor:
        return self.forward(x)

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        yield from ()

    def named_buffers(self) -> Iterator[tuple[str, Tensor]]:
        """Non-trainable state saved with the parameters (running statistics, fixed w')."""
        yield from ()

    def batch_norms(self) -> Iterator[BatchNormState]:
        yield from ()

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def named_state(self) -> list[tuple[str, Tensor]]:
        return [*self.named_parameters(), *self.named_buffers()]

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def train(self, mode: bool = True) -> "Module":
        self.training = mode
        for bn in self.batch_norms():
            bn.mode = "train" if mode else "eval"
        return self

    def eval(self) -> "Module":
        return self.train(False)

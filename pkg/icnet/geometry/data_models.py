import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class CollisionInput(BaseModel):
    """Two bodies on a line: m1 moves at v1 toward m2, which is at rest."""

    m1: float
    m2: float
    v1: float


class HyperplaneQuery(BaseModel):
    """Weights W of an IC neuron and the scalar w' defining H = (W - w' I)^T x."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray
    w_prime: float

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])


class SweepReport(BaseModel):
    """Outcome of evaluating cos(theta) over an increasing grid of w' values."""

    dim: int
    num_points: int
    strictly_decreasing: bool
    cos_min: float
    cos_max: float
    zero_crossing: float = Field(description="Analytic root W^T I / N")
    cos_at_zero_crossing: float
    bracket: tuple[float, float] = Field(description="Adjacent grid points where the sign changes")


class TwoInputNeuron(BaseModel):
    """relu-gated neuron on two inputs: g(w.x + b1 + relu(w_inner.x + b2)).

    ``outer_relu`` selects g = relu (else identity); ``w_inner = None`` gives a plain
    neuron without the inner branch.
    """

    w: tuple[float, float]
    b1: float = 0.0
    w_inner: tuple[float, float] | None = None
    b2: float = 0.0
    outer_relu: bool = True


class RegionMap(BaseModel):
    """Grid of linear-region labels over a rectangle of the input plane."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    labels: np.ndarray
    bounds: tuple[float, float, float, float]
    num_regions: int

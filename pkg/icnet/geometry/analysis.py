"""Collision model, hyperplane rotation under w' and decision regions of 2-input neurons."""

from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from icnet.errors import ContractError, PropertyViolation
from icnet.geometry.data_models import (
    CollisionInput,
    HyperplaneQuery,
    RegionMap,
    SweepReport,
    TwoInputNeuron,
)


def collision_velocities(c: CollisionInput) -> tuple[float, float]:
    """Velocities after a 1-D elastic collision with the second body at rest."""
    if c.m1 <= 0 or c.m2 <= 0:
        raise ContractError(f"masses must be positive, got m1={c.m1}, m2={c.m2}")
    total = c.m1 + c.m2
    return (c.m1 - c.m2) / total * c.v1, 2 * c.m1 / total * c.v1


def collision_weight(c: CollisionInput) -> float:
    """Transmission coefficient w = 2 m1 / (m1 + m2)."""
    if c.m1 <= 0 or c.m2 <= 0:
        raise ContractError(f"masses must be positive, got m1={c.m1}, m2={c.m2}")
    return 2 * c.m1 / (c.m1 + c.m2)


def collision_transmit(w: float, v1: float) -> tuple[float, float, float]:
    """(relu((w - 1) v1), w v1, their sum): the information carried on after the collision."""
    v1_out = max((w - 1.0) * v1, 0.0)
    v2_out = w * v1
    return v1_out, v2_out, v1_out + v2_out


def _check_weights(weights: np.ndarray) -> np.ndarray:
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)
    if weights.size < 2:
        raise ContractError(f"need at least two weights, got {weights.size}")
    return weights


def cos_theta_curve(weights: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """cos of the angle between H = W - w' I and I for every w' in ``grid``."""
    weights = _check_weights(weights)
    grid = np.asarray(grid, dtype=np.float64).reshape(-1)
    n = weights.size
    h = weights[None, :] - grid[:, None]
    norms = np.linalg.norm(h, axis=1)
    if np.any(norms == 0):
        bad = grid[norms == 0][0]
        raise ContractError(f"H vanishes at w'={bad}: W is constant and equal to w'")
    return h.sum(axis=1) / (norms * np.sqrt(n))


def hyperplane_cos_theta(q: HyperplaneQuery) -> float:
    return float(cos_theta_curve(q.weights, np.array([q.w_prime]))[0])


def zero_crossing(weights: np.ndarray) -> float:
    """The w' at which H is orthogonal to I, i.e. W^T I / N."""
    return float(np.mean(_check_weights(weights)))


def default_sweep_grid(weights: np.ndarray, num: int = 2001, limit: float = 1e3) -> np.ndarray:
    """Symmetric grid with log-spaced magnitudes up to ``limit``, plus 0 and the zero crossing."""
    half = (num - 1) // 2
    magnitudes = np.logspace(-3, np.log10(limit), half)
    grid = np.concatenate([-magnitudes[::-1], [0.0], magnitudes, [zero_crossing(weights)]])
    return np.unique(grid)


def theorem31_sweep(weights: np.ndarray, grid: np.ndarray | None = None) -> SweepReport:
    """Check that cos(theta) falls strictly from near 1 to near -1 as w' increases.

    The grid must be strictly increasing and bracket W^T I / N; the cosine must stay
    inside (-1, 1), vanish at W^T I / N to 1e-10 and change sign across it.

    Raises:
        ContractError: W is constant, or the grid is unusable.
        PropertyViolation: a property fails; ``value`` is the offending w'.
    """
    weights = _check_weights(weights)
    if np.all(weights == weights[0]):
        raise ContractError("W is parallel to I (constant weights); the rotation is undefined")
    grid = default_sweep_grid(weights) if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ContractError("sweep grid must be a strictly increasing 1-D array")

    z = zero_crossing(weights)
    if not grid[0] < z < grid[-1]:
        raise ContractError(f"grid [{grid[0]}, {grid[-1]}] does not bracket w'={z}")

    cos = cos_theta_curve(weights, grid)
    steps = np.diff(cos)
    if np.any(steps >= 0):
        i = int(np.argmax(steps >= 0))
        raise PropertyViolation(f"cos(theta) does not decrease after w'={grid[i]}", grid[i + 1])
    if np.any(np.abs(cos) >= 1):
        i = int(np.argmax(np.abs(cos) >= 1))
        raise PropertyViolation(f"|cos(theta)| reaches 1 at w'={grid[i]}", grid[i])

    cos_z = float(cos_theta_curve(weights, np.array([z]))[0])
    if abs(cos_z) > 1e-10:
        raise PropertyViolation(f"cos(theta) = {cos_z:.3e} at the zero crossing", z)

    lo = int(np.searchsorted(grid, z, side="left")) - 1
    hi = int(np.searchsorted(grid, z, side="right"))
    if not (cos[lo] > 0 > cos[hi]):
        raise PropertyViolation(
            f"no sign change between w'={grid[lo]} and w'={grid[hi]}", (grid[lo], grid[hi])
        )

    return SweepReport(
        dim=weights.size,
        num_points=grid.size,
        strictly_decreasing=True,
        cos_min=float(cos.min()),
        cos_max=float(cos.max()),
        zero_crossing=z,
        cos_at_zero_crossing=cos_z,
        bracket=(float(grid[lo]), float(grid[hi])),
    )


def ic_neuron(
    w: tuple[float, float], w_prime: float = 1.0, b1: float = 0.0, b2: float = 0.0
) -> TwoInputNeuron:
    """relu(w.x + b1 + relu((w - w').x + b2)), the 2-input IC neuron with a relu output."""
    return TwoInputNeuron(
        w=w, b1=b1, w_inner=(w[0] - w_prime, w[1] - w_prime), b2=b2, outer_relu=True
    )


def neuron_branches(neuron: TwoInputNeuron, x1: np.ndarray, x2: np.ndarray):
    """Pre-activations (outer, inner) of ``neuron`` at the points (x1, x2)."""
    inner = np.zeros_like(x1, dtype=np.float64)
    if neuron.w_inner is not None:
        inner = neuron.w_inner[0] * x1 + neuron.w_inner[1] * x2 + neuron.b2
    outer = neuron.w[0] * x1 + neuron.w[1] * x2 + neuron.b1 + np.maximum(inner, 0.0)
    return outer, inner


def neuron_value(neuron: TwoInputNeuron, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    outer, _ = neuron_branches(neuron, x1, x2)
    return np.maximum(outer, 0.0) if neuron.outer_relu else outer


def region_labels(neuron: TwoInputNeuron, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """0: outer branch inactive; 1: outer active, inner inactive; 2: both active."""
    outer, inner = neuron_branches(neuron, x1, x2)
    labels = np.where(outer > 0, 1, 0)
    if neuron.w_inner is not None:
        labels = np.where((outer > 0) & (inner > 0), 2, labels)
    return labels.astype(np.int64)


def region_map(
    neuron: TwoInputNeuron,
    bounds: tuple[float, float] | tuple[float, float, float, float] = (-1.5, 1.5),
    resolution: int = 512,
) -> RegionMap:
    """Label every cell centre of a ``resolution`` x ``resolution`` grid.

    Row i holds x2 = y_lo + (i + 0.5) * dy, column j holds x1 = x_lo + (j + 0.5) * dx.
    ``bounds`` is (lo, hi) for both axes or (x_lo, x_hi, y_lo, y_hi).
    """
    if resolution < 2:
        raise ContractError(f"resolution must be at least 2, got {resolution}")
    x_lo, x_hi, y_lo, y_hi = bounds * 2 if len(bounds) == 2 else bounds
    xs = x_lo + (np.arange(resolution) + 0.5) * (x_hi - x_lo) / resolution
    ys = y_lo + (np.arange(resolution) + 0.5) * (y_hi - y_lo) / resolution
    x1, x2 = np.meshgrid(xs, ys)
    labels = region_labels(neuron, x1, x2)
    num = int(np.unique(labels).size)
    logger.debug(f"Region map {resolution}x{resolution}: {num} regions")
    return RegionMap(labels=labels, bounds=(x_lo, x_hi, y_lo, y_hi), num_regions=num)


def write_region_csv(regions: RegionMap, path: str | Path) -> Path:
    """One grid row per line, comma-separated integer labels, no header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(regions.labels).to_csv(path, header=False, index=False)
    logger.success(f"Region map written to {path}")
    return path


def write_sweep_csv(weights: np.ndarray, grid: np.ndarray, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"w_prime": grid, "cos_theta": cos_theta_curve(weights, grid)})
    frame.to_csv(path, index=False)
    logger.success(f"Sweep written to {path}")
    return path

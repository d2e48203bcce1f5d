"""Numerical properties of the IC unit, the hyperplane rotation and the collision model."""

import numpy as np
from tqdm import tqdm

from icnet.checks.data_models import CheckOptions
from icnet.engine.record import no_grad
from icnet.engine.tensor import Tensor
from icnet.errors import PropertyViolation
from icnet.geometry.analysis import (
    collision_transmit,
    collision_velocities,
    collision_weight,
    theorem31_sweep,
)
from icnet.geometry.data_models import CollisionInput
from icnet.ic.data_models import ICConvParams, ICDenseParams
from icnet.ic.functional import ic_conv_forward, ic_dense_forward, ic_dense_piecewise
from icnet.nn.data_models import ConvParams
from icnet.nn.functional import conv2d


def check_equivalence(opts: CheckOptions) -> str:
    """The IC neuron equals its two-branch form on random inputs to 1e-12."""
    rng = np.random.default_rng(opts.seed)
    trials = opts.trials or 10_000
    n_in = opts.dim or 8
    worst = 0.0
    with no_grad():
        for _ in range(trials):
            x = Tensor(rng.standard_normal((1, n_in)))
            params = ICDenseParams(
                weight=Tensor(rng.standard_normal((4, n_in))),
                w_prime=Tensor(rng.standard_normal(4)),
                bias_main=Tensor(rng.standard_normal(4)),
                bias_inner=Tensor(rng.standard_normal(4)),
            )
            diff = np.abs(ic_dense_forward(x, params).data - ic_dense_piecewise(x, params).data)
            worst = max(worst, float(diff.max()))
            if worst >= 1e-12:
                raise PropertyViolation(f"IC neuron and branch form differ by {worst:.3e}", worst)
    return f"{trials} random neurons, max abs diff {worst:.2e}"


def _random_conv(rng: np.random.Generator, low: float, high: float) -> ConvParams:
    c_in, c_out = rng.integers(1, 4, size=2)
    k = int(rng.integers(2, 4))
    weight = rng.uniform(low, high, (c_out, c_in, k, k))
    return ConvParams(weight=Tensor(weight), stride=int(rng.integers(1, 3)), padding=k // 2)


def check_reduction(opts: CheckOptions) -> str:
    """IC conv reduces to conv when its inner branch is off, and to 2x conv when w' = 0."""
    rng = np.random.default_rng(opts.seed)
    trials = opts.trials or 100
    with no_grad():
        for trial in range(trials):
            conv = _random_conv(rng, -1.0, 1.0)
            x = Tensor(rng.uniform(0.01, 1.0, (2, conv.in_channels, 6, 6)))
            # |w| <= 1 and x > 0 bound every output by the window sum over all channels
            ic = ICConvParams(
                conv=conv, w_prime=Tensor(np.full((conv.out_channels, conv.in_channels), 2.0))
            )
            if not np.array_equal(ic_conv_forward(x, ic).data, conv2d(x, conv).data):
                raise PropertyViolation(
                    f"inactive inner branch changed the output (trial {trial})", trial
                )

            conv = _random_conv(rng, 0.0, 1.0)
            x = Tensor(rng.uniform(0.0, 1.0, (2, conv.in_channels, 6, 6)))
            ic = ICConvParams(
                conv=conv, w_prime=Tensor(np.zeros((conv.out_channels, conv.in_channels)))
            )
            if not np.array_equal(ic_conv_forward(x, ic).data, 2 * conv2d(x, conv).data):
                raise PropertyViolation(f"w' = 0 did not double the output (trial {trial})", trial)
    return f"{trials} constructions of each reduction hold bitwise"


def check_theorem31(opts: CheckOptions) -> str:
    """Random non-constant W: cos(theta) strictly decreasing, bounded, zero at mean(W)."""
    rng = np.random.default_rng(opts.seed)
    trials = opts.trials or 100
    dims = [opts.dim] if opts.dim else [2, 8, 64]
    for dim in dims:
        for _ in tqdm(range(trials), desc=f"Sweeps (N={dim})", leave=False):
            weights = rng.standard_normal(dim)
            try:
                theorem31_sweep(weights)
            except PropertyViolation as e:
                raise PropertyViolation(f"N={dim}, W={weights.tolist()}: {e}", e.value) from e
    return f"{trials} sweeps per dimension {dims} pass"


def check_collision(opts: CheckOptions) -> str:
    """Momentum and energy conservation, and agreement of the transmitted split."""
    rng = np.random.default_rng(opts.seed)
    trials = opts.trials or 10_000
    for _ in range(trials):
        m1, m2 = rng.uniform(0.1, 10.0, size=2)
        v1 = rng.uniform(-10.0, 10.0)
        c = CollisionInput(m1=m1, m2=m2, v1=v1)
        v1_out, v2_out = collision_velocities(c)
        momentum, momentum_after = m1 * v1, m1 * v1_out + m2 * v2_out
        energy, energy_after = 0.5 * m1 * v1**2, 0.5 * m1 * v1_out**2 + 0.5 * m2 * v2_out**2
        scale_p = max(abs(momentum), 1e-300)
        scale_e = max(abs(energy), 1e-300)
        if abs(momentum - momentum_after) / scale_p > 1e-10:
            raise PropertyViolation(f"momentum not conserved for {c}", c)
        if abs(energy - energy_after) / scale_e > 1e-10:
            raise PropertyViolation(f"energy not conserved for {c}", c)
        if v1 > 0:
            left, right, _ = collision_transmit(collision_weight(c), v1)
            if not np.isclose(left, max(v1_out, 0.0), rtol=1e-12, atol=1e-12) or not np.isclose(
                right, v2_out, rtol=1e-12, atol=1e-12
            ):
                raise PropertyViolation(
                    f"transmitted split disagrees with the collision for {c}", c
                )
    return f"{trials} random collisions conserve momentum and energy"

"""Barrier network h_omega and the CBF hyperparameters."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from diffnet import Mlp, forward, init_mlp
from errors import UsageError

# Untrained h is weakly positive so {s | h(s) >= 0} starts out non-empty
BARRIER_OUTPUT_BIAS: float = 0.1


@dataclass(frozen=True, eq=False)
class Barrier:
    """h_omega: observation -> scalar; h >= 0 marks the certified-safe region."""

    h_net: Mlp

    @property
    def params(self) -> np.ndarray:
        return self.h_net.params

    def with_params(self, params: np.ndarray) -> "Barrier":
        return Barrier(self.h_net.with_params(params))


def init_barrier(
    obs_dim: int,
    hidden: Sequence[int],
    rng: np.random.Generator,
    output_bias: float = BARRIER_OUTPUT_BIAS,
) -> Barrier:
    return Barrier(init_mlp((obs_dim, *hidden, 1), rng, output_bias=output_bias))


def barrier_values(b: Barrier, obs: np.ndarray) -> np.ndarray:
    """h(s) for a batch of observations, shape (n,)."""
    return forward(b.h_net, np.atleast_2d(obs))[:, 0]


@dataclass(frozen=True)
class CbfConfig:
    """
    Control-barrier settings.

    Attributes:
        lam: Slope of the class-K function alpha(h) = lam * h
        w: Weight of L_derivative in L_combined
        margin_safe: Hinge margin on safe states
        margin_pd: Hinge margin on potentially-dangerous states
        dt: Seconds per step, shared with the environment
        barrier_epochs: Step-1 epoch budget
        joint_iters: Step-2 iteration budget
        freeze_barrier_in_step2: Keep h_omega fixed during Step 2
        hidden: Hidden widths of h_omega
        barrier_step_size: Adam step size for h_omega
        barrier_minibatch: Minibatch size for barrier updates
        holdout_fraction: Share of each state set held out in Step 1
        min_accuracy: Held-out sign accuracy below which Step 1 fails
        loss_tolerance: Step 1 stops early once the mean loss drops below this
        explored_cap: Maximum explored states fed to L_derivative per iteration
        derivative_minibatch: Explored states per L_derivative gradient
        refine_steps: Barrier updates per Step-2 iteration when not frozen
    """

    lam: float = 1.0
    w: float = 0.5
    margin_safe: float = 0.05
    margin_pd: float = 0.05
    dt: float = 0.1
    barrier_epochs: int = 200
    joint_iters: int = 50
    freeze_barrier_in_step2: bool = True
    hidden: Tuple[int, ...] = (128, 128)
    barrier_step_size: float = 1e-3
    barrier_minibatch: int = 256
    holdout_fraction: float = 0.2
    min_accuracy: float = 0.8
    loss_tolerance: float = 1e-3
    explored_cap: int = 2048
    derivative_minibatch: int = 256
    refine_steps: int = 8

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise UsageError(f"lambda must be positive (class-K), got {self.lam}")
        if self.w < 0:
            raise UsageError(f"w must be >= 0, got {self.w}")
        if self.margin_safe < 0 or self.margin_pd < 0:
            raise UsageError("Hinge margins must be >= 0")
        if self.dt <= 0:
            raise UsageError(f"dt must be positive, got {self.dt}")
        if self.lam * self.dt > 1.0:
            raise UsageError(
                f"lambda * dt = {self.lam * self.dt} exceeds 1 (discrete-time infeasible)"
            )
        if not 0.0 < self.holdout_fraction < 1.0:
            raise UsageError("holdout_fraction must lie in (0, 1)")
        if self.barrier_epochs < 0 or self.joint_iters < 0:
            raise UsageError("Budgets must be >= 0")

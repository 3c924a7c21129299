"""Neural control barrier function: network, losses, checks and training."""

from .barrier import BARRIER_OUTPUT_BIAS, Barrier, CbfConfig, barrier_values, init_barrier
from .losses import (
    DerivativeTerms,
    barrier_loss,
    barrier_loss_and_grad,
    combined_grad,
    combined_loss,
    derivative_loss,
    derivative_terms,
)
from .trainer import CbfirlResult, run_cbfirl, sign_accuracy, train_barrier, train_cbfirl
from .verify import estimate_y, r3_satisfaction, trajectory_y

__all__ = [
    "BARRIER_OUTPUT_BIAS",
    "Barrier",
    "CbfConfig",
    "CbfirlResult",
    "DerivativeTerms",
    "barrier_loss",
    "barrier_loss_and_grad",
    "barrier_values",
    "combined_grad",
    "combined_loss",
    "derivative_loss",
    "derivative_terms",
    "estimate_y",
    "init_barrier",
    "r3_satisfaction",
    "run_cbfirl",
    "sign_accuracy",
    "train_barrier",
    "train_cbfirl",
    "trajectory_y",
]

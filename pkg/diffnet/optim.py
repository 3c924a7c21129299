"""Adaptive moment estimation (Adam) over flat parameter vectors."""

from dataclasses import dataclass, replace
from typing import Protocol, Tuple, TypeVar

import numpy as np

from errors import DimensionMismatchError, TrainingDivergedError

DEFAULT_STEP_SIZE: float = 3e-4
DEFAULT_BETA1: float = 0.9
DEFAULT_BETA2: float = 0.999
DEFAULT_EPSILON: float = 1e-8


class Parameterized(Protocol):
    params: np.ndarray

    def with_params(self, params: np.ndarray) -> "Parameterized": ...


P = TypeVar("P", bound=Parameterized)


@dataclass(frozen=True, eq=False)
class OptimState:
    """
    Adam moments and hyperparameters for one parameter vector.

    Attributes:
        m: First-moment estimate
        v: Second-moment estimate
        t: Number of updates applied so far
        step_size: Learning rate
        beta1: First-moment decay
        beta2: Second-moment decay
        epsilon: Denominator guard
    """

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    step_size: float = DEFAULT_STEP_SIZE
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    epsilon: float = DEFAULT_EPSILON

    @classmethod
    def fresh(cls, size: int, step_size: float = DEFAULT_STEP_SIZE, **kwargs) -> "OptimState":
        return cls(m=np.zeros(size), v=np.zeros(size), step_size=step_size, **kwargs)


def adam_update(
    opt: OptimState, params: np.ndarray, grad: np.ndarray
) -> Tuple[OptimState, np.ndarray]:
    """
    One bias-corrected Adam step on a flat vector.

    Raises:
        DimensionMismatchError: If grad, params and moments differ in length
        TrainingDivergedError: If grad has a non-finite entry
    """
    grad = np.asarray(grad, dtype=np.float64)
    if not (grad.shape == params.shape == opt.m.shape):
        raise DimensionMismatchError(
            f"Gradient {grad.shape}, params {params.shape} and optimizer "
            f"{opt.m.shape} are not aligned"
        )
    if not np.all(np.isfinite(grad)):
        raise TrainingDivergedError("Non-finite gradient entry")

    t = opt.t + 1
    m = opt.beta1 * opt.m + (1.0 - opt.beta1) * grad
    v = opt.beta2 * opt.v + (1.0 - opt.beta2) * grad**2
    m_hat = m / (1.0 - opt.beta1**t)
    v_hat = v / (1.0 - opt.beta2**t)
    new_params = params - opt.step_size * m_hat / (np.sqrt(v_hat) + opt.epsilon)
    return replace(opt, m=m, v=v, t=t), new_params


def opt_step(opt: OptimState, net: P, grad: np.ndarray) -> Tuple[OptimState, P]:
    """Apply adam_update to anything exposing .params and .with_params()."""
    new_opt, new_params = adam_update(opt, net.params, grad)
    return new_opt, net.with_params(new_params)

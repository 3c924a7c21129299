"""Clipped-surrogate policy loss (L_policy) with its exact gradient."""

from typing import Optional, Tuple

import numpy as np

from airl.policy import Policy, logprob_backward, policy_logprob
from airl.rollout import RolloutBatch

DEFAULT_CLIP: float = 0.2
DEFAULT_ENTROPY_COEF: float = 0.01


def surrogate_terms(
    ratio: np.ndarray, advantages: np.ndarray, clip: float = DEFAULT_CLIP
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-sample min(r*A, clip(r)*A) and the mask where the gradient flows.
    """
    unclipped = ratio * advantages
    clipped = np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantages
    return np.minimum(unclipped, clipped), unclipped <= clipped


def policy_loss_and_grad(
    p: Policy,
    observations: np.ndarray,
    actions: np.ndarray,
    behavior_logprobs: np.ndarray,
    advantages: np.ndarray,
    clip: float = DEFAULT_CLIP,
    entropy_coef: float = DEFAULT_ENTROPY_COEF,
) -> Tuple[float, np.ndarray]:
    """
    -mean(min(r*A, clip(r, 1-eps, 1+eps)*A)) - entropy_coef * H(pi).

    Minimizing this ascends J(pi). The gradient is with respect to p.params.
    """
    ratio = np.exp(policy_logprob(p, observations, actions) - behavior_logprobs)
    surrogate, flows = surrogate_terms(ratio, advantages, clip)
    loss = -np.mean(surrogate) - entropy_coef * p.entropy()

    upstream = -(advantages * ratio * flows) / len(ratio)
    grad = logprob_backward(p, observations, actions, upstream)
    # dH/dlog_std = 1 for every action dimension
    grad[-len(p.log_std) :] -= entropy_coef
    return float(loss), grad


def policy_loss(
    p: Policy,
    batch: RolloutBatch,
    clip: float = DEFAULT_CLIP,
    entropy_coef: float = DEFAULT_ENTROPY_COEF,
    advantages: Optional[np.ndarray] = None,
) -> float:
    """L_policy over a whole rollout batch (raw advantages unless given)."""
    return policy_loss_and_grad(
        p,
        batch.observations,
        batch.actions,
        batch.logprobs,
        batch.advantages if advantages is None else advantages,
        clip,
        entropy_coef,
    )[0]

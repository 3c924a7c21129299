"""Adversarial IRL: policy, discriminator, rollouts and losses.

The training loop lives in airl.trainer and is imported from there.
"""

from .discriminator import (
    Discriminator,
    advantage_estimate,
    discriminator_loss,
    discriminator_loss_and_grad,
    discriminator_output,
    init_discriminator,
    recovered_reward,
)
from .losses import policy_loss, policy_loss_and_grad
from .policy import (
    Policy,
    init_critic,
    init_policy,
    policy_action,
    policy_logprob,
    state_values,
)
from .rollout import RolloutBatch, collect_rollouts, compute_gae, discounted_returns

__all__ = [
    "Discriminator",
    "Policy",
    "RolloutBatch",
    "advantage_estimate",
    "collect_rollouts",
    "compute_gae",
    "discounted_returns",
    "discriminator_loss",
    "discriminator_loss_and_grad",
    "discriminator_output",
    "init_critic",
    "init_discriminator",
    "init_policy",
    "policy_action",
    "policy_logprob",
    "policy_loss",
    "policy_loss_and_grad",
    "recovered_reward",
    "state_values",
]

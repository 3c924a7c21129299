"""AIRL discriminator D = exp(f) / (exp(f) + pi(a|s)), evaluated in log space."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from airl.policy import Policy, policy_logprob
from diffnet import Mlp, backward, forward, init_mlp
from errors import TrainingDivergedError


@dataclass(frozen=True, eq=False)
class Discriminator:
    """f_net maps concat(observation, action) to the scalar f_theta(s, a)."""

    f_net: Mlp

    @property
    def params(self) -> np.ndarray:
        return self.f_net.params

    def with_params(self, params: np.ndarray) -> "Discriminator":
        return Discriminator(self.f_net.with_params(params))


def init_discriminator(
    obs_dim: int, act_dim: int, hidden: Sequence[int], rng: np.random.Generator
) -> Discriminator:
    return Discriminator(init_mlp((obs_dim + act_dim, *hidden, 1), rng))


def _pairs(s: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.concatenate([np.atleast_2d(s), np.atleast_2d(a)], axis=1)


def _squeeze_like(values: np.ndarray, s: np.ndarray):
    return float(values[0]) if np.ndim(s) == 1 else values


def advantage_estimate(d: Discriminator, s: np.ndarray, a: np.ndarray):
    """f_theta(s, a)."""
    f = forward(d.f_net, _pairs(s, a))[:, 0]
    if not np.all(np.isfinite(f)):
        raise TrainingDivergedError("Discriminator produced a non-finite output")
    return _squeeze_like(f, s)


def sigmoid(z: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -np.asarray(z, dtype=np.float64)))


def discriminator_logits(d: Discriminator, p: Policy, s: np.ndarray, a: np.ndarray):
    """f_theta(s, a) - log pi(a|s), the log-odds of D."""
    f = np.atleast_1d(advantage_estimate(d, s, a))
    logits = f - np.atleast_1d(policy_logprob(p, np.atleast_2d(s), np.atleast_2d(a)))
    return _squeeze_like(logits, s)


def discriminator_output(d: Discriminator, p: Policy, s: np.ndarray, a: np.ndarray):
    """D_theta(s, a) = sigmoid(f - log pi), strictly inside (0, 1)."""
    out = sigmoid(discriminator_logits(d, p, s, a))
    return float(out) if np.ndim(out) == 0 else out


def recovered_reward(d: Discriminator, p: Policy, s: np.ndarray, a: np.ndarray):
    """log D - log(1 - D), which equals f_theta(s, a) - log pi(a|s)."""
    return discriminator_logits(d, p, s, a)


def discriminator_loss_and_grad(
    d: Discriminator,
    p: Policy,
    expert_batch: Tuple[np.ndarray, np.ndarray],
    policy_batch: Tuple[np.ndarray, np.ndarray],
) -> Tuple[float, np.ndarray]:
    """
    Binary cross entropy with expert pairs labelled 1 and policy pairs 0.

    The policy is held constant; the gradient covers d.params only.

    Returns:
        Tuple of (mean -log D over expert + mean -log(1-D) over policy, gradient)
    """
    expert_obs, expert_act = expert_batch
    policy_obs, policy_act = policy_batch
    z_expert = np.atleast_1d(discriminator_logits(d, p, expert_obs, expert_act))
    z_policy = np.atleast_1d(discriminator_logits(d, p, policy_obs, policy_act))
    n_expert, n_policy = len(z_expert), len(z_policy)

    loss = np.mean(np.logaddexp(0.0, -z_expert)) + np.mean(np.logaddexp(0.0, z_policy))

    g_expert, _ = backward(
        d.f_net,
        _pairs(expert_obs, expert_act),
        ((sigmoid(z_expert) - 1.0) / n_expert)[:, None],
    )
    g_policy, _ = backward(
        d.f_net,
        _pairs(policy_obs, policy_act),
        (sigmoid(z_policy) / n_policy)[:, None],
    )
    return float(loss), g_expert + g_policy


def discriminator_loss(
    d: Discriminator,
    p: Policy,
    expert_batch: Tuple[np.ndarray, np.ndarray],
    policy_batch: Tuple[np.ndarray, np.ndarray],
) -> float:
    return discriminator_loss_and_grad(d, p, expert_batch, policy_batch)[0]

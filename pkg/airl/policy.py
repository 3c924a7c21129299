"""Diagonal-Gaussian policy and the value baseline used for GAE."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from diffnet import Mlp, backward, forward, init_mlp

LOG_STD_MIN: float = -5.0
LOG_STD_MAX: float = 2.0
INITIAL_LOG_STD: float = -0.5
HALF_LOG_TWO_PI: float = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class Policy:
    """
    pi_phi(a|s) = N(mean_net(s), diag(exp(log_std))^2).

    Sampled actions are clamped to [-a_max, a_max] before execution.
    """

    mean_net: Mlp
    log_std: np.ndarray
    a_max: float

    def __post_init__(self) -> None:
        log_std = np.clip(np.array(self.log_std, dtype=np.float64), LOG_STD_MIN, LOG_STD_MAX)
        log_std.setflags(write=False)
        object.__setattr__(self, "log_std", log_std)

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([self.mean_net.params, self.log_std])

    def with_params(self, params: np.ndarray) -> "Policy":
        split = self.mean_net.params.size
        return Policy(self.mean_net.with_params(params[:split]), params[split:], self.a_max)

    @property
    def std(self) -> np.ndarray:
        return np.exp(self.log_std)

    def entropy(self) -> float:
        """Differential entropy of the Gaussian, independent of the state."""
        return float(np.sum(self.log_std + HALF_LOG_TWO_PI + 0.5))


def init_policy(
    obs_dim: int,
    act_dim: int,
    hidden: Sequence[int],
    rng: np.random.Generator,
    a_max: float,
    log_std: float = INITIAL_LOG_STD,
) -> Policy:
    mean_net = init_mlp((obs_dim, *hidden, act_dim), rng)
    return Policy(mean_net, np.full(act_dim, log_std), a_max)


def policy_mean(p: Policy, obs: np.ndarray) -> np.ndarray:
    return forward(p.mean_net, obs)


def policy_action(p: Policy, obs: np.ndarray) -> np.ndarray:
    """Deterministic action: the clamped mean."""
    return np.clip(policy_mean(p, obs), -p.a_max, p.a_max)


def sample_action(p: Policy, obs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Unclamped Gaussian sample; callers clamp before stepping."""
    mean = policy_mean(p, obs)
    return mean + p.std * rng.standard_normal(np.shape(mean))


def gaussian_logprob(mean: np.ndarray, log_std: np.ndarray, a: np.ndarray) -> np.ndarray:
    z = (np.asarray(a) - mean) / np.exp(log_std)
    return np.sum(-0.5 * z**2 - log_std - HALF_LOG_TWO_PI, axis=-1)


def policy_logprob(p: Policy, s: np.ndarray, a: np.ndarray) -> np.ndarray:
    """log pi(a|s); scalar for one pair, shape (n,) for a batch."""
    return gaussian_logprob(policy_mean(p, s), p.log_std, a)


def logprob_backward(
    p: Policy, obs: np.ndarray, actions: np.ndarray, upstream: np.ndarray
) -> np.ndarray:
    """
    Gradient of sum_i upstream_i * log pi(a_i|s_i) with respect to p.params.

    Args:
        p: Policy
        obs: Observations, shape (n, obs_dim)
        actions: Actions, shape (n, act_dim)
        upstream: Per-sample weights, shape (n,)
    """
    mean = policy_mean(p, obs)
    var = np.exp(2.0 * p.log_std)
    diff = np.asarray(actions) - mean
    upstream = np.asarray(upstream)[:, None]
    mean_grad, _ = backward(p.mean_net, obs, upstream * diff / var)
    log_std_grad = np.sum(upstream * (diff**2 / var - 1.0), axis=0)
    return np.concatenate([mean_grad, log_std_grad])


def init_critic(
    obs_dim: int, hidden: Sequence[int], rng: np.random.Generator
) -> Mlp:
    return init_mlp((obs_dim, *hidden, 1), rng)


def state_values(critic: Mlp, obs: np.ndarray) -> np.ndarray:
    return forward(critic, np.atleast_2d(obs))[:, 0]


def critic_loss_and_grad(
    critic: Mlp, obs: np.ndarray, returns: np.ndarray
) -> Tuple[float, np.ndarray]:
    """Half mean squared error of V(s) against the discounted returns."""
    error = state_values(critic, obs) - returns
    grad, _ = backward(critic, obs, (error / len(error))[:, None])
    return float(0.5 * np.mean(error**2)), grad

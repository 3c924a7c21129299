"""On-policy rollouts with recovered rewards and GAE advantages."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from airl.discriminator import Discriminator, recovered_reward
from airl.policy import Policy, policy_logprob, policy_mean, state_values
from diffnet import Mlp
from dynamics import EnvConfig, is_collision, is_success, observe, reset, step
from errors import UsageError

DEFAULT_GAMMA: float = 0.99
DEFAULT_GAE_LAMBDA: float = 0.95


@dataclass(eq=False)
class RolloutBatch:
    """
    Flat on-policy batch; episodes are stored back to back.

    Attributes:
        observations: (N, obs_dim)
        actions: Raw Gaussian samples, (N, act_dim)
        executed: Clamped actions sent to the environment, (N, act_dim)
        logprobs: log pi_behavior(actions | observations), (N,)
        rewards: Recovered rewards, (N,)
        values: Critic values, (N,)
        advantages: GAE estimates, (N,)
        returns: Discounted reward-to-go within each episode, (N,)
        dones: True on the last step of each episode, (N,)
        collisions: Post-step collision flags, (N,)
        episode_seeds: reset() seed of each episode
        episode_success: Whether each episode reached the goal
        episode_collision: Whether each episode collided at any step
        gamma: Discount factor
        gae_lambda: GAE mixing factor
    """

    observations: np.ndarray
    actions: np.ndarray
    executed: np.ndarray
    logprobs: np.ndarray
    rewards: np.ndarray
    values: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray
    dones: np.ndarray
    collisions: np.ndarray
    episode_seeds: List[int]
    episode_success: np.ndarray
    episode_collision: np.ndarray
    gamma: float = DEFAULT_GAMMA
    gae_lambda: float = DEFAULT_GAE_LAMBDA

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def episode_starts(self) -> np.ndarray:
        return np.concatenate([[0], np.flatnonzero(self.dones[:-1]) + 1])


def discounted_returns(rewards: np.ndarray, dones: np.ndarray, gamma: float) -> np.ndarray:
    """Reward-to-go per step; sums restart after every done flag."""
    returns = np.zeros(len(rewards))
    running = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        if dones[t]:
            running = 0.0
        running = rewards[t] + gamma * running
        returns[t] = running
    return returns


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    gamma: float,
    gae_lambda: float,
) -> np.ndarray:
    """
    Generalized advantage estimation over back-to-back episodes.

    Episode ends (success or horizon) are treated as terminal, so the next
    value there is zero. With gae_lambda = 0 this is the one-step TD residual.
    """
    if not 0.0 < gamma < 1.0:
        raise UsageError(f"gamma must lie in (0, 1), got {gamma}")
    advantages = np.zeros(len(rewards))
    last = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        nonterminal = 0.0 if dones[t] else 1.0
        next_value = values[t + 1] if t + 1 < len(values) else 0.0
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        last = delta + gamma * gae_lambda * nonterminal * last
        advantages[t] = last
    return advantages


def collect_rollouts(
    p: Policy,
    cfg: EnvConfig,
    n_steps: int,
    seed: int,
    discriminator: Optional[Discriminator] = None,
    critic: Optional[Mlp] = None,
    gamma: float = DEFAULT_GAMMA,
    gae_lambda: float = DEFAULT_GAE_LAMBDA,
) -> RolloutBatch:
    """
    Roll out whole episodes until at least n_steps transitions are stored.

    Episode i resets with seed + i and draws action noise from its own
    stream keyed on (seed, i). Episodes are stepped in lockstep waves whose
    sizes depend only on n_steps and the horizon. Without a discriminator
    the rewards are zero; without a critic the values are zero.

    Raises:
        UsageError: If n_steps is smaller than the horizon
    """
    if n_steps < cfg.horizon:
        raise UsageError(f"n_steps={n_steps} must be >= horizon={cfg.horizon}")

    episodes: List[dict] = []
    collected = 0
    while collected < n_steps:
        wave = -(-(n_steps - collected) // cfg.horizon)
        first = len(episodes)
        wave_episodes = _run_wave(p, cfg, seed, range(first, first + wave))
        episodes.extend(wave_episodes)
        collected += sum(len(e["obs"]) for e in wave_episodes)

    observations = np.concatenate([e["obs"] for e in episodes])
    actions = np.concatenate([e["act"] for e in episodes])
    executed = np.clip(actions, -p.a_max, p.a_max)
    dones = np.concatenate(
        [np.arange(len(e["obs"])) == len(e["obs"]) - 1 for e in episodes]
    )
    collisions = np.concatenate([e["collision"] for e in episodes])

    if discriminator is not None:
        rewards = np.asarray(recovered_reward(discriminator, p, observations, executed))
    else:
        rewards = np.zeros(len(observations))
    values = state_values(critic, observations) if critic is not None else np.zeros(len(observations))

    return RolloutBatch(
        observations=observations,
        actions=actions,
        executed=executed,
        logprobs=policy_logprob(p, observations, actions),
        rewards=rewards,
        values=values,
        advantages=compute_gae(rewards, values, dones, gamma, gae_lambda),
        returns=discounted_returns(rewards, dones, gamma),
        dones=dones,
        collisions=collisions,
        episode_seeds=[e["seed"] for e in episodes],
        episode_success=np.array([e["success"] for e in episodes], dtype=bool),
        episode_collision=np.array([bool(np.any(e["collision"])) for e in episodes]),
        gamma=gamma,
        gae_lambda=gae_lambda,
    )


def _run_wave(p: Policy, cfg: EnvConfig, seed: int, indices: range) -> List[dict]:
    """Step a group of episodes together, batching the policy forward pass."""
    states = [reset(cfg, seed + i) for i in indices]
    rngs = [np.random.default_rng([seed, i]) for i in indices]
    records = [
        {"seed": seed + i, "obs": [], "act": [], "collision": [], "success": False}
        for i in indices
    ]
    active = list(range(len(states)))
    while active:
        obs = np.array([observe(states[j], cfg) for j in active])
        means = np.atleast_2d(policy_mean(p, obs))
        still_active = []
        for row, j in enumerate(active):
            action = means[row] + p.std * rngs[j].standard_normal(cfg.dim)
            states[j] = step(states[j], np.clip(action, -p.a_max, p.a_max), cfg)
            record = records[j]
            record["obs"].append(obs[row])
            record["act"].append(action)
            record["collision"].append(is_collision(states[j], cfg))
            if is_success(states[j], cfg):
                record["success"] = True
            elif states[j].t < cfg.horizon:
                still_active.append(j)
        active = still_active

    for record in records:
        record["obs"] = np.array(record["obs"])
        record["act"] = np.array(record["act"])
        record["collision"] = np.array(record["collision"], dtype=bool)
    return records

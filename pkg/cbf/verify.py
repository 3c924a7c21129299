"""Sampled checks of the three barrier requirements (the y function)."""

from typing import List, Tuple

import numpy as np

from airl.policy import Policy, policy_mean
from airl.rollout import RolloutBatch
from cbf.barrier import Barrier, CbfConfig, barrier_values
from cbf.losses import r3_slack
from dynamics import EnvConfig, transition_observation
from errors import UsageError


def explored_slacks(
    b: Barrier, p: Policy, explored: np.ndarray, cfg: CbfConfig, env: EnvConfig
) -> np.ndarray:
    """R3 slack of every explored state with h >= 0 (possibly empty)."""
    explored = np.atleast_2d(explored)
    if len(explored) == 0:
        return np.zeros(0)
    h_now = barrier_values(b, explored)
    chosen = explored[h_now >= 0]
    if len(chosen) == 0:
        return np.zeros(0)
    next_states = transition_observation(chosen, np.atleast_2d(policy_mean(p, chosen)), env)
    return r3_slack(h_now[h_now >= 0], barrier_values(b, next_states), cfg.dt, cfg.lam)


def estimate_y(
    b: Barrier,
    p: Policy,
    safe: np.ndarray,
    pd: np.ndarray,
    explored: np.ndarray,
    cfg: CbfConfig,
    env: EnvConfig,
) -> float:
    """
    min(min_safe h, min_pd -h, min over explored h>=0 states of the R3 slack).

    The third term is +inf when no explored state has h >= 0. A positive
    result means every sampled state satisfies all three requirements.
    """
    if len(safe) == 0 or len(pd) == 0 or len(explored) == 0:
        raise UsageError("estimate_y needs non-empty safe, pd and explored sets")
    slacks = explored_slacks(b, p, explored, cfg, env)
    third = float(slacks.min()) if len(slacks) else float("inf")
    return min(
        float(barrier_values(b, safe).min()),
        float((-barrier_values(b, pd)).min()),
        third,
    )


def r3_satisfaction(
    b: Barrier, p: Policy, explored: np.ndarray, cfg: CbfConfig, env: EnvConfig
) -> Tuple[float, int]:
    """
    Share of explored h >= 0 states whose R3 hinge is exactly zero.

    Returns:
        Tuple of (fraction, number of h >= 0 states); fraction is 1.0 when
        no state qualifies
    """
    slacks = explored_slacks(b, p, explored, cfg, env)
    if len(slacks) == 0:
        return 1.0, 0
    return float(np.mean(slacks >= 0)), len(slacks)


def trajectory_y(
    b: Barrier,
    p: Policy,
    safe: np.ndarray,
    pd: np.ndarray,
    batch: RolloutBatch,
    cfg: CbfConfig,
    env: EnvConfig,
) -> List[float]:
    """y evaluated once per rollout episode, each with its own explored states."""
    starts = list(batch.episode_starts) + [len(batch)]
    return [
        estimate_y(b, p, safe, pd, batch.observations[lo:hi], cfg, env)
        for lo, hi in zip(starts, starts[1:])
    ]

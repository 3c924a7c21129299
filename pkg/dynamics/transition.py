"""One-step transition expressed directly on observations.

The barrier losses need h(T(s, a)) for states that only exist as
observations (explored batches, demo states), and its gradient with respect
to the action. The agent part matches step() exactly; the K observed
obstacles advance by their stored velocities and keep their slot order.
"""

from typing import Tuple

import numpy as np

from dynamics.env import EnvConfig
from errors import DimensionMismatchError


def split_observations(
    obs: np.ndarray, cfg: EnvConfig
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Split a batch of observations into its parts.

    Args:
        obs: Array of shape (n, obs_dim)
        cfg: Environment config the observations came from

    Returns:
        Tuple of (agent_pos, agent_vel, rel_pos, obs_vel) with shapes
        (n, dim), (n, dim), (n, k, dim), (n, k, dim)
    """
    obs = np.atleast_2d(np.asarray(obs, dtype=np.float64))
    if obs.shape[1] != cfg.obs_dim:
        raise DimensionMismatchError(
            f"Observation width {obs.shape[1]} != expected {cfg.obs_dim}"
        )
    d, k = cfg.dim, cfg.k_nearest
    neighbours = obs[:, 2 * d :].reshape(len(obs), k, 2 * d)
    return obs[:, :d], obs[:, d : 2 * d], neighbours[..., :d], neighbours[..., d:]


def _agent_update(vel: np.ndarray, pos: np.ndarray, action: np.ndarray, cfg: EnvConfig):
    accel = np.clip(action, -cfg.a_max, cfg.a_max)
    raw_vel = vel + accel * cfg.dt
    speed = np.linalg.norm(raw_vel, axis=1, keepdims=True)
    scale = np.where(speed > cfg.v_max, cfg.v_max / np.maximum(speed, 1e-300), 1.0)
    new_vel = raw_vel * scale
    raw_pos = pos + new_vel * cfg.dt
    new_pos = np.clip(raw_pos, -cfg.arena_half_width, cfg.arena_half_width)
    return raw_vel, speed, scale, new_vel, raw_pos, new_pos


def transition_observation(
    obs: np.ndarray, action: np.ndarray, cfg: EnvConfig
) -> np.ndarray:
    """Apply T(s, a) to a batch of observations; returns shape (n, obs_dim)."""
    pos, vel, rel, obs_vel = split_observations(obs, cfg)
    action = np.atleast_2d(np.asarray(action, dtype=np.float64))
    if action.shape != pos.shape:
        raise DimensionMismatchError(
            f"Action batch shape {action.shape} != {pos.shape}"
        )
    *_, new_vel, _, new_pos = _agent_update(vel, pos, action, cfg)
    new_rel = rel + obs_vel * cfg.dt - (new_pos - pos)[:, None, :]
    neighbours = np.concatenate([new_rel, obs_vel], axis=2).reshape(len(pos), -1)
    return np.concatenate([new_pos, new_vel, neighbours], axis=1)


def transition_vjp(
    obs: np.ndarray, action: np.ndarray, cotangent: np.ndarray, cfg: EnvConfig
) -> np.ndarray:
    """
    Pull a cotangent on T(s, a) back onto the action.

    Args:
        obs: Observations, shape (n, obs_dim)
        action: Actions, shape (n, dim)
        cotangent: dL/dT(s, a), shape (n, obs_dim)
        cfg: Environment config

    Returns:
        dL/da with shape (n, dim); zero along clamped components
    """
    pos, vel, _, _ = split_observations(obs, cfg)
    action = np.atleast_2d(np.asarray(action, dtype=np.float64))
    cotangent = np.atleast_2d(np.asarray(cotangent, dtype=np.float64))
    d, k = cfg.dim, cfg.k_nearest
    raw_vel, speed, scale, _, raw_pos, _ = _agent_update(vel, pos, action, cfg)

    g_nb = cotangent[:, 2 * d :].reshape(len(pos), k, 2 * d)
    g_pos = cotangent[:, :d] - g_nb[..., :d].sum(axis=1)
    inside = np.abs(raw_pos) <= cfg.arena_half_width
    g_new_vel = cotangent[:, d : 2 * d] + g_pos * inside * cfg.dt

    # Norm rescale: d(v_max * u/|u|)/du = (v_max/|u|) (I - u u^T / |u|^2)
    unit = raw_vel / np.maximum(speed, 1e-300)
    projected = g_new_vel - unit * np.sum(unit * g_new_vel, axis=1, keepdims=True)
    g_raw_vel = np.where(speed > cfg.v_max, scale * projected, g_new_vel)

    active = np.abs(action) <= cfg.a_max
    return g_raw_vel * cfg.dt * active

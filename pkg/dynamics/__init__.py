"""Deterministic point-mass environments with moving obstacles."""

from .env import (
    EnvConfig,
    WorldState,
    clamp_action,
    clamp_speed,
    is_collision,
    is_success,
    min_obstacle_distance,
    nearest_obstacles,
    observe,
    reset,
    step,
)
from .transition import split_observations, transition_observation, transition_vjp

__all__ = [
    "EnvConfig",
    "WorldState",
    "clamp_action",
    "clamp_speed",
    "is_collision",
    "is_success",
    "min_obstacle_distance",
    "nearest_obstacles",
    "observe",
    "reset",
    "step",
    "split_observations",
    "transition_observation",
    "transition_vjp",
]

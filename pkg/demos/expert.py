"""
Scripted potential-field expert used in place of human demonstrators.

The expert clamps its acceleration to a_max by rescaling the whole vector
until its largest component equals a_max, keeping the heading. The result
lies in [-a_max, a_max] per component, so clamp_action leaves it unchanged.
"""

from dataclasses import dataclass

import numpy as np

from dynamics import EnvConfig, WorldState


@dataclass(frozen=True)
class ExpertGains:
    """
    Potential-field gains.

    Attributes:
        k_attract: Attractive gain; the pull is k_attract * (goal - pos),
            rescaled to unit length beyond distance 1
        k_damp: Velocity damping gain
        k_repulse: Repulsive gain of the (1/d - 1/d0) / d^2 term
        influence_factor: Obstacles act within influence_factor * collision_radius
    """

    k_attract: float = 1.0
    k_damp: float = 0.5
    k_repulse: float = 0.01
    influence_factor: float = 3.0


def attractive_term(s: WorldState, cfg: EnvConfig, gains: ExpertGains) -> np.ndarray:
    to_goal = np.asarray(cfg.goal) - s.agent_pos
    return gains.k_attract * to_goal / max(float(np.linalg.norm(to_goal)), 1.0)


def repulsive_term(s: WorldState, cfg: EnvConfig, gains: ExpertGains) -> np.ndarray:
    influence = gains.influence_factor * cfg.collision_radius
    offsets = s.agent_pos - s.obstacle_pos
    dists = np.linalg.norm(offsets, axis=1)
    active = (dists < influence) & (dists > 0.0)
    if not np.any(active):
        return np.zeros(cfg.dim)
    d = dists[active]
    magnitude = gains.k_repulse * (1.0 / d - 1.0 / influence) / d**2
    return np.sum((magnitude / d)[:, None] * offsets[active], axis=0)


def limit_acceleration(force: np.ndarray, a_max: float) -> np.ndarray:
    """Scale the whole vector so no component exceeds a_max (keeps direction)."""
    peak = float(np.max(np.abs(force))) if force.size else 0.0
    if peak <= a_max:
        return force
    return np.clip(force * (a_max / peak), -a_max, a_max)


def expert_action(
    s: WorldState, cfg: EnvConfig, gains: ExpertGains = ExpertGains()
) -> np.ndarray:
    """Attraction to the goal, repulsion from nearby obstacles, velocity damping."""
    force = (
        attractive_term(s, cfg, gains)
        + repulsive_term(s, cfg, gains)
        - gains.k_damp * s.agent_vel
    )
    return limit_acceleration(force, cfg.a_max)

"""Demonstration trajectories, the safe set S_s and the near-obstacle set S_pd."""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from rich.console import Console

from demos.expert import ExpertGains, expert_action
from dynamics import (
    EnvConfig,
    WorldState,
    is_collision,
    is_success,
    min_obstacle_distance,
    observe,
    reset,
    step,
)
from errors import ExpertTooWeakError, ThresholdInfeasibleError, UsageError

_console = Console(stderr=True)

DEFAULT_DEMO_COUNT: int = 64
DEFAULT_PD_COUNT: int = 1024

# generate_demos gives up when fewer than 5% of the first 1000 rollouts pass
EXPERT_PROBE_ATTEMPTS: int = 1000
EXPERT_MIN_ACCEPTANCE: float = 0.05

# collect_pd_states gives up below 0.1% acceptance over 10^6 proposals
PD_MAX_PROPOSALS: int = 1_000_000
PD_MIN_ACCEPTANCE: float = 0.001
# Agent placements drawn per sampled obstacle layout
PD_AGENTS_PER_WORLD: int = 16

Controller = Callable[[WorldState, EnvConfig], np.ndarray]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    One episode as seen by the learner.

    Attributes:
        seed: Seed passed to reset()
        observations: Pre-step observations, shape (T, obs_dim)
        actions: Executed actions, shape (T, dim)
        collisions: Collision flag of the post-step state, shape (T,)
        successes: Success flag of the post-step state, shape (T,)
    """

    seed: int
    observations: np.ndarray
    actions: np.ndarray
    collisions: np.ndarray
    successes: np.ndarray

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def collided(self) -> bool:
        return bool(np.any(self.collisions))

    @property
    def succeeded(self) -> bool:
        return bool(np.any(self.successes))


@dataclass(eq=False)
class DemoSet:
    """
    Everything Step 1 learns from.

    Attributes:
        demos: Safe, successful expert trajectories
        safe_states: All demo observations in order (S_s)
        pd_states: Near-obstacle observations (approximate S_pd)
        d_pd: Distance threshold used to collect pd_states
        acceptance_ratio: Fraction of expert rollouts kept
    """

    demos: List[Trajectory]
    safe_states: np.ndarray
    pd_states: np.ndarray
    d_pd: float
    acceptance_ratio: float = 1.0
    expert_pairs: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None)

    def expert_batch(self) -> Tuple[np.ndarray, np.ndarray]:
        """All (observation, action) pairs of the demos, stacked."""
        if self.expert_pairs is None:
            self.expert_pairs = (
                np.concatenate([d.observations for d in self.demos]),
                np.concatenate([d.actions for d in self.demos]),
            )
        return self.expert_pairs


def rollout(
    cfg: EnvConfig,
    seed: int,
    controller: Controller,
    stop_on_success: bool = True,
) -> Tuple[Trajectory, WorldState]:
    """
    Run a controller from reset(cfg, seed) until success or the horizon.

    Returns:
        Tuple of (trajectory, final world state)
    """
    state = reset(cfg, seed)
    observations, actions, collisions, successes = [], [], [], []
    while state.t < cfg.horizon:
        observations.append(observe(state, cfg))
        action = np.asarray(controller(state, cfg), dtype=np.float64)
        state = step(state, action, cfg)
        actions.append(np.clip(action, -cfg.a_max, cfg.a_max))
        collisions.append(is_collision(state, cfg))
        successes.append(is_success(state, cfg))
        if stop_on_success and successes[-1]:
            break
    trajectory = Trajectory(
        seed=seed,
        observations=np.array(observations),
        actions=np.array(actions),
        collisions=np.array(collisions, dtype=bool),
        successes=np.array(successes, dtype=bool),
    )
    return trajectory, state


def replay(trajectory: Trajectory, cfg: EnvConfig) -> Trajectory:
    """Re-run stored actions through the dynamics from the stored seed."""
    actions = iter(trajectory.actions)
    replayed, _ = rollout(
        cfg, trajectory.seed, lambda state, _cfg: next(actions), stop_on_success=True
    )
    return replayed


def generate_demos_with_stats(
    cfg: EnvConfig, n: int, seed: int, gains: ExpertGains = ExpertGains()
) -> Tuple[List[Trajectory], float]:
    """
    Roll out the expert from seeds seed, seed+1, ... keeping only safe successes.

    Returns:
        Tuple of (accepted trajectories, acceptance ratio)

    Raises:
        ExpertTooWeakError: If acceptance is below 5% after 1000 attempts
    """
    if n < 1:
        raise UsageError(f"Demo count must be >= 1, got {n}")

    def controller(state: WorldState, env: EnvConfig) -> np.ndarray:
        return expert_action(state, env, gains)

    accepted: List[Trajectory] = []
    attempts = 0
    while len(accepted) < n:
        trajectory, _ = rollout(cfg, seed + attempts, controller)
        attempts += 1
        if trajectory.succeeded and not trajectory.collided:
            accepted.append(trajectory)
        if attempts >= EXPERT_PROBE_ATTEMPTS and len(accepted) < n:
            ratio = len(accepted) / attempts
            if ratio < EXPERT_MIN_ACCEPTANCE:
                raise ExpertTooWeakError(
                    f"Expert accepted {len(accepted)}/{attempts} rollouts "
                    f"({ratio:.1%} < {EXPERT_MIN_ACCEPTANCE:.0%})"
                )

    ratio = len(accepted) / attempts
    if ratio < 0.5:
        _console.print(
            f"[yellow]Warning: expert acceptance ratio is only {ratio:.1%}[/yellow]"
        )
    return accepted, ratio


def generate_demos(
    cfg: EnvConfig, n: int, seed: int, gains: ExpertGains = ExpertGains()
) -> List[Trajectory]:
    return generate_demos_with_stats(cfg, n, seed, gains)[0]


def collect_safe_states(demos: List[Trajectory]) -> np.ndarray:
    """Every demo observation, demo by demo, in order (no deduplication)."""
    if not demos:
        raise UsageError("Need at least one demonstration")
    return np.concatenate([d.observations for d in demos])


def _sample_ball(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    direction = rng.standard_normal(dim)
    direction /= max(float(np.linalg.norm(direction)), 1e-12)
    return direction * radius * rng.uniform() ** (1.0 / dim)


def collect_pd_states(
    cfg: EnvConfig, count: int = DEFAULT_PD_COUNT, d_pd: float = 0.1, seed: int = 0
) -> np.ndarray:
    """
    Sample near-obstacle states: collision_radius <= min distance < d_pd.

    Agent position is uniform in the arena, velocity uniform in the v_max
    ball, obstacles come from reset() with a freshly drawn seed.

    Raises:
        UsageError: If d_pd <= collision_radius
        ThresholdInfeasibleError: If acceptance stays below 0.1% over 10^6 proposals
    """
    if d_pd <= cfg.collision_radius:
        raise UsageError(
            f"d_pd={d_pd} must exceed collision_radius={cfg.collision_radius}"
        )
    rng = np.random.default_rng(seed)
    half_width = cfg.arena_half_width
    kept: List[np.ndarray] = []
    proposals = 0
    while len(kept) < count:
        if proposals >= PD_MAX_PROPOSALS:
            ratio = len(kept) / proposals
            if ratio < PD_MIN_ACCEPTANCE:
                raise ThresholdInfeasibleError(
                    f"Only {len(kept)} of {proposals} proposals fell in "
                    f"[{cfg.collision_radius}, {d_pd})"
                )
        world = reset(cfg, int(rng.integers(0, 2**31 - 1)))
        for _ in range(PD_AGENTS_PER_WORLD):
            proposals += 1
            pos = rng.uniform(-half_width, half_width, size=cfg.dim)
            vel = _sample_ball(rng, cfg.dim, cfg.v_max)
            candidate = world.with_agent(pos, vel)
            distance = min_obstacle_distance(candidate)
            if cfg.collision_radius <= distance < d_pd:
                kept.append(observe(candidate, cfg))
                if len(kept) == count:
                    break
    return np.array(kept)


def build_demo_set(
    cfg: EnvConfig,
    n_demos: int = DEFAULT_DEMO_COUNT,
    pd_count: int = DEFAULT_PD_COUNT,
    d_pd: Optional[float] = None,
    seed: int = 0,
    gains: ExpertGains = ExpertGains(),
) -> DemoSet:
    """Run all three collectors; d_pd defaults to 2 * collision_radius."""
    threshold = 2.0 * cfg.collision_radius if d_pd is None else d_pd
    demos, ratio = generate_demos_with_stats(cfg, n_demos, seed, gains)
    return DemoSet(
        demos=demos,
        safe_states=collect_safe_states(demos),
        pd_states=collect_pd_states(cfg, pd_count, threshold, seed),
        d_pd=threshold,
        acceptance_ratio=ratio,
    )

"""Point-mass arena with moving obstacles (2D racecar / 3D drone)."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from errors import ConfigurationInfeasibleError, EpisodeFinishedError, UsageError

# Rejection-sampling budget per obstacle in reset()
MAX_PLACEMENT_ATTEMPTS: int = 10_000


@dataclass(frozen=True)
class EnvConfig:
    """
    Static description of one environment.

    Attributes:
        dim: Spatial dimension (2 racecar, 3 drone)
        n_obstacles: Number of moving obstacles
        k_nearest: Obstacles included in each observation
        dt: Seconds per step
        horizon: Maximum steps per episode
        arena_half_width: Arena is [-w, w]^dim
        start: Agent start position
        goal: Goal position
        goal_radius: Success radius around the goal
        collision_radius: Agent radius plus obstacle radius
        obstacle_speed_max: Upper bound on sampled obstacle speed
        a_max: Per-component acceleration clamp
        v_max: Agent speed clamp (norm)
        seed: Base seed for runs using this config
    """

    dim: int = 2
    n_obstacles: int = 8
    k_nearest: int = 4
    dt: float = 0.1
    horizon: int = 100
    arena_half_width: float = 1.0
    start: Tuple[float, ...] = (-0.9, -0.9)
    goal: Tuple[float, ...] = (0.9, 0.9)
    goal_radius: float = 0.1
    collision_radius: float = 0.05
    obstacle_speed_max: float = 0.1
    a_max: float = 1.0
    v_max: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise UsageError(f"dim must be 2 or 3, got {self.dim}")
        if self.dt <= 0:
            raise UsageError(f"dt must be positive, got {self.dt}")
        if self.horizon < 1:
            raise UsageError(f"horizon must be >= 1, got {self.horizon}")
        if self.n_obstacles < 1:
            raise UsageError(f"n_obstacles must be >= 1, got {self.n_obstacles}")
        if not 1 <= self.k_nearest <= self.n_obstacles:
            raise UsageError(
                f"k_nearest must lie in [1, n_obstacles={self.n_obstacles}], "
                f"got {self.k_nearest}"
            )
        for name in ("goal_radius", "collision_radius", "arena_half_width"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if self.a_max <= 0 or self.v_max <= 0 or self.obstacle_speed_max < 0:
            raise UsageError("a_max and v_max must be positive, speeds non-negative")
        for name in ("start", "goal"):
            point = getattr(self, name)
            if len(point) != self.dim:
                raise UsageError(f"{name} must have {self.dim} components")
            if any(abs(c) > self.arena_half_width for c in point):
                raise UsageError(f"{name} lies outside the arena")
        gap = np.linalg.norm(np.subtract(self.goal, self.start))
        if gap <= self.goal_radius:
            raise UsageError("start already lies inside the goal region")

    @property
    def obs_dim(self) -> int:
        """Length of every observation vector."""
        return 2 * self.dim * (1 + self.k_nearest)

    @classmethod
    def for_dim(cls, dim: int, corner: float = 0.9, **overrides) -> "EnvConfig":
        """Build a config whose start/goal sit at opposite arena corners."""
        overrides.setdefault("start", tuple([-corner] * dim))
        overrides.setdefault("goal", tuple([corner] * dim))
        return cls(dim=dim, **overrides)


@dataclass(frozen=True, eq=False)
class WorldState:
    """
    Full simulator state. Arrays are read-only; step() builds new ones.

    Attributes:
        t: Step index
        agent_pos: Agent position, shape (dim,)
        agent_vel: Agent velocity, shape (dim,)
        obstacle_pos: Obstacle centres, shape (n_obstacles, dim)
        obstacle_vel: Obstacle velocities, shape (n_obstacles, dim)
    """

    t: int
    agent_pos: np.ndarray
    agent_vel: np.ndarray
    obstacle_pos: np.ndarray
    obstacle_vel: np.ndarray

    def __post_init__(self) -> None:
        for name in ("agent_pos", "agent_vel", "obstacle_pos", "obstacle_vel"):
            array = np.array(getattr(self, name), dtype=np.float64)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WorldState):
            return NotImplemented
        return self.t == other.t and all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ("agent_pos", "agent_vel", "obstacle_pos", "obstacle_vel")
        )

    def with_agent(
        self, pos: np.ndarray, vel: Optional[np.ndarray] = None
    ) -> "WorldState":
        """Copy of this state with the agent moved (obstacles untouched)."""
        return WorldState(
            t=self.t,
            agent_pos=pos,
            agent_vel=np.zeros_like(self.agent_vel) if vel is None else vel,
            obstacle_pos=self.obstacle_pos,
            obstacle_vel=self.obstacle_vel,
        )


def _sample_velocities(
    rng: np.random.Generator, count: int, dim: int, speed_max: float
) -> np.ndarray:
    """Uniform samples from the ball of radius speed_max."""
    direction = rng.standard_normal((count, dim))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    direction = direction / np.maximum(norms, 1e-12)
    radius = speed_max * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / dim)
    return direction * radius


def reset(cfg: EnvConfig, seed: int) -> WorldState:
    """
    Sample an initial state.

    The agent sits at rest on cfg.start. Obstacles are placed uniformly in
    the arena outside a 2*collision_radius ball around start and goal.

    Raises:
        ConfigurationInfeasibleError: If an obstacle cannot be placed
    """
    rng = np.random.default_rng(seed)
    start = np.asarray(cfg.start, dtype=np.float64)
    goal = np.asarray(cfg.goal, dtype=np.float64)
    clearance = 2.0 * cfg.collision_radius
    half_width = cfg.arena_half_width

    positions = np.empty((cfg.n_obstacles, cfg.dim))
    for index in range(cfg.n_obstacles):
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            candidate = rng.uniform(-half_width, half_width, size=cfg.dim)
            if (
                np.linalg.norm(candidate - start) > clearance
                and np.linalg.norm(candidate - goal) > clearance
            ):
                positions[index] = candidate
                break
        else:
            raise ConfigurationInfeasibleError(
                f"Could not place obstacle {index} after "
                f"{MAX_PLACEMENT_ATTEMPTS} attempts"
            )

    velocities = _sample_velocities(
        rng, cfg.n_obstacles, cfg.dim, cfg.obstacle_speed_max
    )
    return WorldState(
        t=0,
        agent_pos=start,
        agent_vel=np.zeros(cfg.dim),
        obstacle_pos=positions,
        obstacle_vel=velocities,
    )


def clamp_action(action: np.ndarray, cfg: EnvConfig) -> np.ndarray:
    """Clamp each acceleration component to [-a_max, a_max]."""
    return np.clip(np.asarray(action, dtype=np.float64), -cfg.a_max, cfg.a_max)


def clamp_speed(vel: np.ndarray, v_max: float) -> np.ndarray:
    """Rescale velocity rows whose norm exceeds v_max back onto the sphere."""
    vel = np.asarray(vel, dtype=np.float64)
    speed = np.linalg.norm(vel, axis=-1, keepdims=True)
    scale = np.where(speed > v_max, v_max / np.maximum(speed, 1e-300), 1.0)
    return vel * scale


def _advance_obstacles(
    pos: np.ndarray, vel: np.ndarray, dt: float, half_width: float
) -> Tuple[np.ndarray, np.ndarray]:
    moved = pos + vel * dt
    above = moved > half_width
    below = moved < -half_width
    moved = np.where(above, 2.0 * half_width - moved, moved)
    moved = np.where(below, -2.0 * half_width - moved, moved)
    bounced = np.where(above | below, -vel, vel)
    return moved, bounced


def step(s: WorldState, a: np.ndarray, cfg: EnvConfig) -> WorldState:
    """
    Advance one step with semi-implicit Euler. Pure: `s` is not modified.

    Raises:
        EpisodeFinishedError: If s.t has already reached the horizon
    """
    if s.t >= cfg.horizon:
        raise EpisodeFinishedError(f"Episode finished at t={s.t}")

    accel = clamp_action(a, cfg)
    vel = clamp_speed(s.agent_vel + accel * cfg.dt, cfg.v_max)
    pos = np.clip(s.agent_pos + vel * cfg.dt, -cfg.arena_half_width, cfg.arena_half_width)
    obstacle_pos, obstacle_vel = _advance_obstacles(
        s.obstacle_pos, s.obstacle_vel, cfg.dt, cfg.arena_half_width
    )
    return WorldState(
        t=s.t + 1,
        agent_pos=pos,
        agent_vel=vel,
        obstacle_pos=obstacle_pos,
        obstacle_vel=obstacle_vel,
    )


def obstacle_distances(s: WorldState) -> np.ndarray:
    """Centre distance from the agent to every obstacle."""
    return np.linalg.norm(s.obstacle_pos - s.agent_pos, axis=1)


def nearest_obstacles(s: WorldState, k: int) -> np.ndarray:
    """Indices of the k nearest obstacles; ties go to the lower index."""
    return np.argsort(obstacle_distances(s), kind="stable")[:k]


def observe(s: WorldState, cfg: EnvConfig) -> np.ndarray:
    """
    Flatten a state into the fixed-length observation vector.

    Layout: [agent_pos, agent_vel, then for each of the k nearest obstacles
    (obs_pos - agent_pos, obs_vel)].
    """
    chosen = nearest_obstacles(s, cfg.k_nearest)
    relative = s.obstacle_pos[chosen] - s.agent_pos
    neighbours = np.concatenate([relative, s.obstacle_vel[chosen]], axis=1)
    return np.concatenate([s.agent_pos, s.agent_vel, neighbours.ravel()])


def min_obstacle_distance(s: WorldState) -> float:
    """Smallest agent-to-obstacle centre distance."""
    return float(obstacle_distances(s).min())


def is_collision(s: WorldState, cfg: EnvConfig) -> bool:
    """True iff the agent overlaps an obstacle (touching counts as safe)."""
    return min_obstacle_distance(s) < cfg.collision_radius


def is_success(s: WorldState, cfg: EnvConfig) -> bool:
    """True iff the agent is inside the goal ball (boundary included)."""
    return bool(np.linalg.norm(s.agent_pos - np.asarray(cfg.goal)) <= cfg.goal_radius)

"""Configuration for the CBFIRL command line."""

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from airl.trainer import AirlConfig
from cbf.barrier import CbfConfig
from demos import ExpertGains
from dynamics import EnvConfig
from errors import UsageError

# Environment presets; explicit config keys override these
PRESETS: Dict[str, Dict[str, Any]] = {
    "racecar-8": {
        "name": "2D racecar, 8 obstacles",
        "dim": 2,
        "n_obstacles": 8,
        "k_nearest": 4,
        "horizon": 100,
    },
    "racecar-16": {
        "name": "2D racecar, 16 obstacles",
        "dim": 2,
        "n_obstacles": 16,
        "k_nearest": 4,
        "horizon": 100,
    },
    "drone-32": {
        "name": "3D drone, 32 obstacles",
        "dim": 3,
        "n_obstacles": 32,
        "k_nearest": 8,
        "horizon": 400,
    },
}

DEFAULT_PRESET = "racecar-8"

# Config file used when --config is not given (can be overridden via environment variable)
CONFIG_ENV_VAR = "CBFIRL_CONFIG"

# EnvConfig fields a config file may override
ENV_KEYS: Tuple[str, ...] = (
    "n_obstacles",
    "k_nearest",
    "dt",
    "horizon",
    "arena_half_width",
    "goal_radius",
    "collision_radius",
    "obstacle_speed_max",
    "a_max",
    "v_max",
)


def parse_ints(text: str) -> Tuple[int, ...]:
    """'64,64' -> (64, 64)."""
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise UsageError(f"Expected comma-separated integers, got {text!r}") from e


def parse_floats(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise UsageError(f"Expected comma-separated numbers, got {text!r}") from e


class RunConfig(BaseModel):
    """
    Every tunable of a run, flat. Unknown keys are rejected.

    Env fields left as None take their value from the preset, then from
    EnvConfig defaults.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    mode: Literal["airl", "cbfirl"] = "cbfirl"
    preset: str = DEFAULT_PRESET
    seed: int = Field(default=0, ge=0)
    output_dir: str = "runs/default"

    # Environment overrides
    n_obstacles: Optional[int] = None
    k_nearest: Optional[int] = None
    dt: Optional[float] = None
    horizon: Optional[int] = None
    arena_half_width: Optional[float] = None
    goal_radius: Optional[float] = None
    collision_radius: Optional[float] = None
    obstacle_speed_max: Optional[float] = None
    a_max: Optional[float] = None
    v_max: Optional[float] = None
    start: Optional[str] = None
    goal: Optional[str] = None

    # Expert and demo sets
    k_attract: float = 1.0
    k_damp: float = 0.5
    k_repulse: float = 0.01
    influence_factor: float = 3.0
    n_demos: int = Field(default=64, ge=1)
    pd_count: int = Field(default=1024, ge=1)
    d_pd: Optional[float] = None

    # AIRL
    airl_iters: int = Field(default=100, ge=0)
    hidden: str = "64,64"
    n_steps: int = Field(default=2048, ge=1)
    minibatch: int = Field(default=256, ge=1)
    epochs: int = Field(default=4, ge=0)
    disc_epochs: int = Field(default=1, ge=0)
    gamma: float = Field(default=0.99, gt=0.0, lt=1.0)
    gae_lambda: float = Field(default=0.95, ge=0.0, le=1.0)
    clip: float = Field(default=0.2, gt=0.0)
    entropy_coef: float = Field(default=0.01, ge=0.0)
    policy_step_size: float = Field(default=3e-4, gt=0.0)
    disc_step_size: float = Field(default=3e-4, gt=0.0)
    value_step_size: float = Field(default=1e-3, gt=0.0)
    eval_every: int = Field(default=10, ge=1)
    train_eval_episodes: int = Field(default=20, ge=1)

    # Control barrier
    cbf_lambda: float = Field(default=1.0, gt=0.0)
    w: float = Field(default=0.5, ge=0.0)
    margin_safe: float = Field(default=0.05, ge=0.0)
    margin_pd: float = Field(default=0.05, ge=0.0)
    barrier_epochs: int = Field(default=200, ge=0)
    joint_iters: int = Field(default=50, ge=0)
    freeze_barrier: bool = True
    barrier_hidden: str = "128,128"
    barrier_step_size: float = Field(default=1e-3, gt=0.0)
    barrier_minibatch: int = Field(default=256, ge=1)
    holdout_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    min_accuracy: float = Field(default=0.8, ge=0.0, le=1.0)
    loss_tolerance: float = Field(default=1e-3, ge=0.0)
    explored_cap: int = Field(default=2048, ge=1)
    derivative_minibatch: int = Field(default=256, ge=1)
    refine_steps: int = Field(default=8, ge=0)

    # Evaluation and harness
    eval_episodes: int = Field(default=100, ge=1)
    eval_seed: int = Field(default=0, ge=0)
    seeds: str = "0,1,2,3,4"
    heatmap_resolution: int = Field(default=64, ge=2)
    heatmap_seed: int = Field(default=0, ge=0)

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, value: str) -> str:
        if value not in PRESETS:
            raise ValueError(f"unknown preset {value!r}; choose from {', '.join(PRESETS)}")
        return value

    @field_validator("hidden", "barrier_hidden", "seeds")
    @classmethod
    def _int_list(cls, value: str) -> str:
        if not parse_ints(value):
            raise ValueError("needs at least one integer")
        if any(n < 0 for n in parse_ints(value)):
            raise ValueError("integers must be >= 0")
        return value

    def env_config(self) -> EnvConfig:
        preset = PRESETS[self.preset]
        overrides = {
            key: preset[key] for key in ("n_obstacles", "k_nearest", "horizon") if key in preset
        }
        for key in ENV_KEYS:
            value = getattr(self, key)
            if value is not None:
                overrides[key] = value
        if self.start is not None:
            overrides["start"] = parse_floats(self.start)
        if self.goal is not None:
            overrides["goal"] = parse_floats(self.goal)
        return EnvConfig.for_dim(preset["dim"], seed=self.seed, **overrides)

    def gains(self) -> ExpertGains:
        return ExpertGains(self.k_attract, self.k_damp, self.k_repulse, self.influence_factor)

    def airl_config(self) -> AirlConfig:
        return AirlConfig(
            hidden=parse_ints(self.hidden),
            n_steps=self.n_steps,
            minibatch=self.minibatch,
            epochs=self.epochs,
            disc_epochs=self.disc_epochs,
            gamma=self.gamma,
            gae_lambda=self.gae_lambda,
            clip=self.clip,
            entropy_coef=self.entropy_coef,
            policy_step_size=self.policy_step_size,
            disc_step_size=self.disc_step_size,
            value_step_size=self.value_step_size,
            eval_every=self.eval_every,
            eval_episodes=self.train_eval_episodes,
        )

    def cbf_config(self) -> CbfConfig:
        return CbfConfig(
            lam=self.cbf_lambda,
            w=self.w,
            margin_safe=self.margin_safe,
            margin_pd=self.margin_pd,
            dt=self.env_config().dt,
            barrier_epochs=self.barrier_epochs,
            joint_iters=self.joint_iters,
            freeze_barrier_in_step2=self.freeze_barrier,
            hidden=parse_ints(self.barrier_hidden),
            barrier_step_size=self.barrier_step_size,
            barrier_minibatch=self.barrier_minibatch,
            holdout_fraction=self.holdout_fraction,
            min_accuracy=self.min_accuracy,
            loss_tolerance=self.loss_tolerance,
            explored_cap=self.explored_cap,
            derivative_minibatch=self.derivative_minibatch,
            refine_steps=self.refine_steps,
        )

    def seed_list(self) -> List[int]:
        return list(parse_ints(self.seeds))

    def to_text(self) -> str:
        """One `key = value` line per field, declaration order; None is left blank."""
        lines = []
        for key, value in self.model_dump().items():
            if value is None:
                lines.append(f"{key} =")
            elif isinstance(value, bool):
                lines.append(f"{key} = {str(value).lower()}")
            elif isinstance(value, float):
                lines.append(f"{key} = {value!r}")
            else:
                lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> Dict[str, Optional[str]]:
    """
    Parse `key = value` lines; `#` starts a comment, blank values mean None.

    Raises:
        UsageError: On a line without '=' or a repeated key
    """
    values: Dict[str, Optional[str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise UsageError(f"Line {number}: expected 'key = value', got {raw.strip()!r}")
        if key in values:
            raise UsageError(f"Line {number}: duplicate key {key!r}")
        values[key] = value or None
    return values


def build_config(values: Dict[str, Any]) -> RunConfig:
    """
    Validate raw values into a RunConfig.

    Raises:
        UsageError: Naming the first offending key
    """
    try:
        return RunConfig(**{k: v for k, v in values.items() if v is not None})
    except ValidationError as e:
        error = e.errors()[0]
        key = ".".join(str(part) for part in error["loc"]) or "config"
        if error["type"] == "extra_forbidden":
            raise UsageError(f"Unknown config key: {key}") from e
        raise UsageError(f"Invalid value for {key}: {error['msg']}") from e


def default_config_path() -> Optional[Path]:
    path = os.environ.get(CONFIG_ENV_VAR)
    return Path(path) if path else None


def load_config(path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Read a config file (or $CBFIRL_CONFIG, or nothing) and apply overrides on top."""
    path = path or default_config_path()
    values: Dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"Could not read config file {path}: {e}") from e
        values.update(parse_config_text(text))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build_config(values)

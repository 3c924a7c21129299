"""Success and collision rates of a policy over seeded evaluation episodes."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np

from airl.policy import Policy, policy_action
from demos.collect import rollout
from dynamics import EnvConfig, observe
from errors import UsageError

DEFAULT_EVAL_EPISODES: int = 100


@dataclass(frozen=True)
class EpisodeRecord:
    seed: int
    success: bool
    collision: bool
    steps: int


@dataclass
class Metrics:
    """
    Evaluation summary; the rates are always the means of the records.

    Attributes:
        records: One entry per evaluation episode
    """

    records: List[EpisodeRecord] = field(default_factory=list)

    @property
    def n_episodes(self) -> int:
        return len(self.records)

    @property
    def success_rate(self) -> float:
        return float(np.mean([r.success for r in self.records])) if self.records else 0.0

    @property
    def collision_rate(self) -> float:
        return float(np.mean([r.collision for r in self.records])) if self.records else 0.0

    def to_text(self) -> str:
        lines = [
            f"n_episodes = {self.n_episodes}",
            f"success_rate = {self.success_rate!r}",
            f"collision_rate = {self.collision_rate!r}",
            "# episodes",
            "seed,success,collision,steps",
        ]
        lines.extend(
            f"{r.seed},{int(r.success)},{int(r.collision)},{r.steps}" for r in self.records
        )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Metrics":
        lines = text.splitlines()
        try:
            start = lines.index("seed,success,collision,steps") + 1
        except ValueError as e:
            raise UsageError("Metrics file has no episode table") from e
        records = []
        for line in lines[start:]:
            if not line.strip():
                continue
            seed, success, collision, steps = line.split(",")
            records.append(
                EpisodeRecord(int(seed), success == "1", collision == "1", int(steps))
            )
        return cls(records)

    def save(self, path: Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "Metrics":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def evaluate(
    p: Policy, cfg: EnvConfig, n_episodes: int = DEFAULT_EVAL_EPISODES, seed: int = 0
) -> Metrics:
    """
    Roll out the policy mean (no noise) on seeds seed, seed+1, ...

    An episode ends on success or at the horizon; collision and success
    are recorded independently, so one episode may score both.
    """
    if n_episodes < 1:
        raise UsageError(f"n_episodes must be >= 1, got {n_episodes}")

    def controller(state, env: EnvConfig) -> np.ndarray:
        return policy_action(p, observe(state, env))

    records = []
    for index in range(n_episodes):
        trajectory, _ = rollout(cfg, seed + index, controller)
        records.append(
            EpisodeRecord(
                seed=seed + index,
                success=trajectory.succeeded,
                collision=trajectory.collided,
                steps=len(trajectory),
            )
        )
    return Metrics(records)

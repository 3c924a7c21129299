"""Paired-seed AIRL vs CBFIRL comparison, reported as mean (stdev)."""

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from airl.trainer import AirlConfig, AirlTrainer
from callbacks import TrainingCallback
from cbf.barrier import CbfConfig
from cbf.trainer import run_cbfirl
from demos import DemoSet
from dynamics import EnvConfig
from errors import UsageError
from harness.metrics import DEFAULT_EVAL_EPISODES, Metrics, evaluate

MODES = ("airl", "cbfirl")


@dataclass
class Comparison:
    """
    Per-seed evaluation metrics of both modes.

    Attributes:
        seeds: Training seeds, shared by both modes
        results: mode -> one Metrics per seed, in seed order
    """

    seeds: List[int]
    results: Dict[str, List[Metrics]] = field(default_factory=dict)

    def rates(self, mode: str, metric: str) -> np.ndarray:
        return np.array([getattr(m, metric) for m in self.results[mode]])

    def mean_std(self, mode: str, metric: str):
        values = self.rates(mode, metric)
        return float(values.mean()), float(values.std())

    @property
    def collision_improvement(self) -> float:
        """Relative drop of the mean collision rate, in percent (0 when AIRL never collides)."""
        base, _ = self.mean_std("airl", "collision_rate")
        ours, _ = self.mean_std("cbfirl", "collision_rate")
        return 0.0 if base == 0 else 100.0 * (base - ours) / base

    def to_text(self) -> str:
        lines = [
            f"seeds = {','.join(str(s) for s in self.seeds)}",
            "mode,success_rate,collision_rate",
        ]
        for mode in MODES:
            cells = [mode]
            for metric in ("success_rate", "collision_rate"):
                mean, std = self.mean_std(mode, metric)
                cells.append(f"{mean:.2f} ({std:.2f})")
            lines.append(",".join(cells))
        lines.append(f"collision_improvement_percent = {self.collision_improvement:.2f}")
        lines.append("# per seed")
        lines.append("mode,seed,success_rate,collision_rate")
        for mode in MODES:
            for seed, metrics in zip(self.seeds, self.results[mode]):
                lines.append(
                    f"{mode},{seed},{metrics.success_rate!r},{metrics.collision_rate!r}"
                )
        return "\n".join(lines) + "\n"

    def save(self, path: Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


def compare(
    env: EnvConfig,
    demos: DemoSet,
    seeds: Sequence[int],
    airl_iters: int,
    airl_cfg: AirlConfig = AirlConfig(),
    cbf_cfg: Optional[CbfConfig] = None,
    n_episodes: int = DEFAULT_EVAL_EPISODES,
    eval_seed: int = 0,
    callbacks: Iterable[TrainingCallback] = (),
) -> Comparison:
    """
    Train both modes on every seed and evaluate on the same episodes.

    The two modes of one seed share the AIRL pre-training; AIRL then keeps
    going for joint_iters more iterations so both see the same number of
    policy updates.
    """
    if not seeds:
        raise UsageError("compare needs at least one seed")
    cbf_cfg = cbf_cfg or CbfConfig(dt=env.dt)
    callbacks = list(callbacks)
    comparison = Comparison(seeds=list(seeds), results={mode: [] for mode in MODES})
    for seed in seeds:
        pretrained = AirlTrainer(env, demos, seed, airl_cfg, callbacks)
        pretrained.run(airl_iters)

        result = run_cbfirl(
            env,
            demos,
            seed,
            airl_iters,
            airl_cfg,
            cbf_cfg,
            callbacks,
            pretrained=pretrained,
        )
        baseline = copy.copy(pretrained)
        baseline.run(cbf_cfg.joint_iters)

        comparison.results["airl"].append(
            evaluate(baseline.policy, env, n_episodes, seed=eval_seed)
        )
        comparison.results["cbfirl"].append(
            evaluate(result.policy, env, n_episodes, seed=eval_seed)
        )
    return comparison

"""Pipeline commands behind the CBFIRL CLI."""

import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table
from rich.text import Text

from airl.policy import Policy
from airl.rollout import collect_rollouts
from airl.trainer import AirlTrainer
from callbacks import MetricsLogCallbackHandler, ProgressCallbackHandler, TrainingCallback
from cbf.barrier import Barrier
from cbf.trainer import run_cbfirl, sign_accuracy
from cbf.verify import estimate_y, r3_satisfaction, trajectory_y
from config import PRESETS, RunConfig
from demos import (
    DemoSet,
    build_demo_set,
    collect_safe_states,
    read_demos,
    read_states,
    write_demos,
    write_states,
)
from diffnet import Mlp, load_checkpoint, save_checkpoint
from dynamics import EnvConfig, reset
from errors import UsageError
from harness.compare import compare
from harness.heatmap import heatmap, render_png
from harness.metrics import Metrics, evaluate

DEMOS_FILE = "demos.csv"
PD_STATES_FILE = "pd_states.csv"
POLICY_FILE = "policy.ckpt"
DISCRIMINATOR_FILE = "discriminator.ckpt"
CRITIC_FILE = "critic.ckpt"
BARRIER_FILE = "barrier.ckpt"
METRICS_LOG_FILE = "metrics_log.csv"
SUMMARY_FILE = "train_summary.txt"
METRICS_FILE = "metrics.txt"
HEATMAP_FILE = "heatmap.csv"
HEATMAP_PNG_FILE = "heatmap.png"
VERIFY_FILE = "verify.txt"
COMPARISON_FILE = "comparison.txt"
CONFIG_ECHO_FILE = "config.cfg"
RUN_INFO_FILE = "run_info.txt"

# Seed of the fresh rollouts `verify` checks the barrier on
VERIFY_ROLLOUT_SEED: int = 1_500_000_000


def write_key_values(path: Path, values: Dict[str, object]) -> None:
    lines = []
    for key, value in values.items():
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_policy(path: Path, a_max: float) -> Policy:
    mean_net, log_std = load_checkpoint(path)
    if len(log_std) != mean_net.n_outputs:
        raise UsageError(f"{path} is not a policy checkpoint")
    return Policy(mean_net, log_std, a_max)


def load_barrier(path: Path) -> Barrier:
    h_net, _ = load_checkpoint(path)
    if h_net.n_outputs != 1:
        raise UsageError(f"{path} is not a barrier checkpoint")
    return Barrier(h_net)


def _check_obs_dim(net: Mlp, env: EnvConfig, path: Path) -> None:
    if net.n_inputs != env.obs_dim:
        raise UsageError(
            f"{path} expects {net.n_inputs} inputs but preset observations have {env.obs_dim}"
        )


class CommandHandler:
    """Runs each CLI subcommand against one output directory."""

    def __init__(self, console: Console, quiet: bool = False):
        self.console = console
        self.quiet = quiet
        self.commands = {
            "gen-demos": self.gen_demos,
            "train": self.train,
            "eval": self.evaluate,
            "heatmap": self.heatmap,
            "verify": self.verify,
            "compare": self.compare,
        }

    def execute(self, name: str, cfg: RunConfig, **options) -> List[Path]:
        """
        Run one subcommand; timestamps go to the run-info sidecar only.

        Returns:
            Paths of the files written
        """
        if name not in self.commands:
            raise UsageError(f"Unknown command: {name}")
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / CONFIG_ECHO_FILE).write_text(cfg.to_text(), encoding="utf-8")

        started = datetime.now(timezone.utc)
        clock = time.perf_counter()
        written = self.commands[name](cfg, out, **options)
        write_key_values(
            out / RUN_INFO_FILE,
            {
                "command": name,
                "started": started.isoformat(timespec="seconds"),
                "seconds": round(time.perf_counter() - clock, 3),
            },
        )
        for path in written:
            self._print_success(f"wrote {path}")
        return written

    def _callbacks(self, out: Optional[Path] = None) -> List[TrainingCallback]:
        callbacks: List[TrainingCallback] = [ProgressCallbackHandler(quiet=self.quiet)]
        if out is not None:
            callbacks.append(MetricsLogCallbackHandler(out / METRICS_LOG_FILE))
        return callbacks

    def _demo_set(self, cfg: RunConfig, out: Path) -> DemoSet:
        """Reuse demos.csv / pd_states.csv from `out` when present, else generate them."""
        env = cfg.env_config()
        demos_path, pd_path = out / DEMOS_FILE, out / PD_STATES_FILE
        if demos_path.exists() and pd_path.exists():
            demos = read_demos(demos_path)
            pd_states = read_states(pd_path)
            if pd_states.shape[1] != env.obs_dim:
                raise UsageError(f"{pd_path} does not match preset {cfg.preset}")
            return DemoSet(
                demos=demos,
                safe_states=collect_safe_states(demos),
                pd_states=pd_states,
                d_pd=cfg.d_pd if cfg.d_pd is not None else 2.0 * env.collision_radius,
            )
        return build_demo_set(env, cfg.n_demos, cfg.pd_count, cfg.d_pd, cfg.seed, cfg.gains())

    def gen_demos(self, cfg: RunConfig, out: Path) -> List[Path]:
        env = cfg.env_config()
        self._print_info(f"Collecting demos on {PRESETS[cfg.preset]['name']}")
        demo_set = build_demo_set(
            env, cfg.n_demos, cfg.pd_count, cfg.d_pd, cfg.seed, cfg.gains()
        )
        write_demos(out / DEMOS_FILE, demo_set.demos)
        write_states(out / PD_STATES_FILE, demo_set.pd_states)
        self._print_info(f"Expert acceptance ratio: {demo_set.acceptance_ratio:.1%}")
        return [out / DEMOS_FILE, out / PD_STATES_FILE]

    def train(self, cfg: RunConfig, out: Path) -> List[Path]:
        env = cfg.env_config()
        demo_set = self._demo_set(cfg, out)
        callbacks = self._callbacks(out)
        written = [out / METRICS_LOG_FILE]
        if cfg.mode == "airl":
            trainer = AirlTrainer(env, demo_set, cfg.seed, cfg.airl_config(), callbacks)
            report = trainer.run(cfg.airl_iters)
        else:
            result = run_cbfirl(
                env,
                demo_set,
                cfg.seed,
                cfg.airl_iters,
                cfg.airl_config(),
                cfg.cbf_config(),
                callbacks,
            )
            trainer, report = result.trainer, result.report
            save_checkpoint(out / BARRIER_FILE, result.barrier.h_net)
            written.append(out / BARRIER_FILE)

        save_checkpoint(out / POLICY_FILE, trainer.policy.mean_net, trainer.policy.log_std)
        save_checkpoint(out / DISCRIMINATOR_FILE, trainer.discriminator.f_net)
        save_checkpoint(out / CRITIC_FILE, trainer.critic)
        summary = {"mode": cfg.mode, "iterations": trainer.iteration, **report.summary}
        last = report.last_evaluation()
        if last is not None:
            summary["last_success_rate"] = last.success_rate
            summary["last_collision_rate"] = last.collision_rate
        write_key_values(out / SUMMARY_FILE, summary)
        written += [
            out / POLICY_FILE,
            out / DISCRIMINATOR_FILE,
            out / CRITIC_FILE,
            out / SUMMARY_FILE,
        ]
        return written

    def evaluate(self, cfg: RunConfig, out: Path, checkpoint: Optional[Path] = None) -> List[Path]:
        env = cfg.env_config()
        path = Path(checkpoint) if checkpoint else out / POLICY_FILE
        policy = load_policy(path, env.a_max)
        _check_obs_dim(policy.mean_net, env, path)
        metrics = evaluate(policy, env, cfg.eval_episodes, seed=cfg.eval_seed)
        metrics.save(out / METRICS_FILE)
        self._show_metrics(metrics)
        return [out / METRICS_FILE]

    def heatmap(
        self,
        cfg: RunConfig,
        out: Path,
        checkpoint: Optional[Path] = None,
        png: bool = False,
    ) -> List[Path]:
        env = cfg.env_config()
        path = Path(checkpoint) if checkpoint else out / BARRIER_FILE
        barrier = load_barrier(path)
        _check_obs_dim(barrier.h_net, env, path)
        frozen = reset(env, cfg.heatmap_seed)
        grid = heatmap(barrier, frozen, env, cfg.heatmap_resolution)
        grid.save(out / HEATMAP_FILE)
        written = [out / HEATMAP_FILE]
        if png:
            render_png(grid, frozen, env, out / HEATMAP_PNG_FILE)
            written.append(out / HEATMAP_PNG_FILE)
        return written

    def verify(self, cfg: RunConfig, out: Path, checkpoint: Optional[Path] = None) -> List[Path]:
        """y, R3 satisfaction and sign accuracy of a trained barrier/policy pair."""
        env, cbf_cfg = cfg.env_config(), cfg.cbf_config()
        path = Path(checkpoint) if checkpoint else out / BARRIER_FILE
        barrier = load_barrier(path)
        _check_obs_dim(barrier.h_net, env, path)
        policy = load_policy(out / POLICY_FILE, env.a_max)
        demo_set = self._demo_set(cfg, out)

        batch = collect_rollouts(
            policy, env, cfg.n_steps, seed=cfg.seed + VERIFY_ROLLOUT_SEED
        )
        safe, pd = demo_set.safe_states, demo_set.pd_states
        y = estimate_y(barrier, policy, safe, pd, batch.observations, cbf_cfg, env)
        fraction, count = r3_satisfaction(barrier, policy, batch.observations, cbf_cfg, env)
        per_episode = np.array(trajectory_y(barrier, policy, safe, pd, batch, cbf_cfg, env))
        values = {
            "estimate_y": float(y),
            "r3_satisfaction": fraction,
            "r3_states": count,
            "trajectory_y_positive": float(np.mean(per_episode > 0)),
            "sign_accuracy": sign_accuracy(barrier, safe, pd),
        }
        write_key_values(out / VERIFY_FILE, values)
        self._show_values("Barrier checks", values)
        return [out / VERIFY_FILE]

    def compare(self, cfg: RunConfig, out: Path) -> List[Path]:
        env = cfg.env_config()
        demo_set = self._demo_set(cfg, out)
        comparison = compare(
            env,
            demo_set,
            cfg.seed_list(),
            cfg.airl_iters,
            cfg.airl_config(),
            cfg.cbf_config(),
            cfg.eval_episodes,
            cfg.eval_seed,
            self._callbacks(),
        )
        comparison.save(out / COMPARISON_FILE)
        table = Table(title="AIRL vs CBFIRL")
        for column in ("mode", "success rate", "collision rate"):
            table.add_column(column)
        for mode in ("airl", "cbfirl"):
            cells = [mode]
            for metric in ("success_rate", "collision_rate"):
                mean, std = comparison.mean_std(mode, metric)
                cells.append(f"{mean:.2f} ({std:.2f})")
            table.add_row(*cells)
        self.console.print(table)
        self._print_info(f"Collision improvement: {comparison.collision_improvement:.2f}%")
        return [out / COMPARISON_FILE]

    def _show_metrics(self, metrics: Metrics) -> None:
        self._show_values(
            "Evaluation",
            {
                "episodes": metrics.n_episodes,
                "success rate": metrics.success_rate,
                "collision rate": metrics.collision_rate,
            },
        )

    def _show_values(self, title: str, values: Dict[str, object]) -> None:
        self.console.print(f"\n[bold cyan]{title}:[/bold cyan]")
        for key, value in values.items():
            shown = f"{value:.4g}" if isinstance(value, float) else str(value)
            self.console.print(f"  {key}: [green]{shown}[/green]")

    def _print_success(self, message: str) -> None:
        self.console.print(Text(f"✓ {message}", style="bold green"))

    def print_error(self, message: str, hint: Optional[str] = None) -> None:
        """
        Print an error message with red styling, plus an optional yellow hint.

        Args:
            message: The error message to display
            hint: Follow-up suggestion, if any
        """
        self.console.print(Text(f"\n✗ {message}", style="bold red"))
        if hint:
            self.console.print(Text(f" {hint}", style="yellow"))

    def _print_info(self, message: str) -> None:
        text = Text(f" {message}", style="yellow")
        self.console.print(text)


def split_assignment(token: str) -> Tuple[str, str]:
    """'key=value' -> ('key', 'value')."""
    key, sep, value = token.partition("=")
    if not sep or not key.strip():
        raise UsageError(f"Expected key=value, got {token!r}")
    return key.strip(), value.strip()

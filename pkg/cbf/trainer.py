"""Step 1 (barrier from demos) and Step 2 (policy shaped by the barrier)."""

import copy
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from airl.discriminator import Discriminator
from airl.policy import Policy
from airl.rollout import collect_rollouts
from airl.trainer import AirlConfig, AirlTrainer
from callbacks import CallbackGroup, IterationRecord, TrainingCallback, TrainReport
from cbf.barrier import Barrier, CbfConfig, barrier_values, init_barrier
from cbf.losses import barrier_loss_and_grad, combined_grad, derivative_terms
from cbf.verify import estimate_y, r3_satisfaction, trajectory_y
from demos import DemoSet
from diffnet import OptimState, opt_step
from dynamics import EnvConfig, split_observations
from errors import BarrierUnlearnableError, UsageError

# Safe states sampled for the per-iteration y estimate
Y_SAFE_SAMPLE: int = 1024
# Seed offset of the fresh rollouts used for the final R3 check
VERIFY_SEED_OFFSET: int = 2_000_000_000
# Stream tag of the explored-pool subsample
POOL_STREAM: int = 5


@dataclass
class CbfirlResult:
    trainer: AirlTrainer
    barrier: Barrier
    report: TrainReport

    @property
    def policy(self) -> Policy:
        return self.trainer.policy

    @property
    def discriminator(self) -> Discriminator:
        return self.trainer.discriminator


def _split(states: np.ndarray, fraction: float, rng: np.random.Generator):
    order = rng.permutation(len(states))
    n_hold = int(round(fraction * len(states)))
    return states[order[n_hold:]], states[order[:n_hold]]


def sign_accuracy(b: Barrier, safe: np.ndarray, pd: np.ndarray) -> float:
    """Share of safe states with h >= 0 and pd states with h < 0."""
    correct = np.sum(barrier_values(b, safe) >= 0) + np.sum(barrier_values(b, pd) < 0)
    return float(correct) / (len(safe) + len(pd))


def train_barrier(
    b: Barrier,
    demos: DemoSet,
    cfg: CbfConfig,
    seed: int,
    callbacks: Iterable[TrainingCallback] = (),
) -> Tuple[Barrier, TrainReport]:
    """
    Minibatch Adam on the margined barrier loss (mean per minibatch).

    Stops after cfg.barrier_epochs or once the mean training loss is below
    cfg.loss_tolerance, then scores sign accuracy on a held-out split.

    Raises:
        BarrierUnlearnableError: If held-out accuracy ends below cfg.min_accuracy
    """
    if len(demos.safe_states) == 0 or len(demos.pd_states) == 0:
        raise UsageError("train_barrier needs both safe and pd states")
    group = CallbackGroup(callbacks)
    report = TrainReport()
    rng = np.random.default_rng([seed, 2])
    safe_train, safe_hold = _split(demos.safe_states, cfg.holdout_fraction, rng)
    pd_train, pd_hold = _split(demos.pd_states, cfg.holdout_fraction, rng)
    states = np.concatenate([safe_train, pd_train])
    is_safe = np.concatenate([np.ones(len(safe_train), bool), np.zeros(len(pd_train), bool)])

    opt = OptimState.fresh(b.params.size, cfg.barrier_step_size)
    group.on_phase_start("barrier", cfg.barrier_epochs)
    epochs_run = 0
    for epoch in range(cfg.barrier_epochs):
        order = rng.permutation(len(states))
        for start in range(0, len(order), cfg.barrier_minibatch):
            idx = order[start : start + cfg.barrier_minibatch]
            _, grad = barrier_loss_and_grad(
                b,
                states[idx][is_safe[idx]],
                states[idx][~is_safe[idx]],
                cfg.margin_safe,
                cfg.margin_pd,
                normalizer=len(idx),
            )
            opt, b = opt_step(opt, b, grad)
        loss, _ = barrier_loss_and_grad(
            b, safe_train, pd_train, cfg.margin_safe, cfg.margin_pd, normalizer=len(states)
        )
        record = IterationRecord(phase="barrier", iteration=epoch, loss_barrier=loss)
        report.add(record)
        group.on_iteration_end(record)
        epochs_run = epoch + 1
        if loss < cfg.loss_tolerance:
            break

    accuracy = sign_accuracy(b, safe_hold, pd_hold)
    report.summary["barrier_holdout_accuracy"] = accuracy
    report.summary["barrier_epochs_run"] = float(epochs_run)
    if report.records:
        report.summary["barrier_final_loss"] = report.records[-1].loss_barrier
    group.on_phase_end("barrier", {"held-out sign accuracy": accuracy})
    if epochs_run > 0 and accuracy < cfg.min_accuracy:
        raise BarrierUnlearnableError(
            f"Held-out sign accuracy {accuracy:.3f} < {cfg.min_accuracy}"
        )
    return b, report


def nearest_distance(obs: np.ndarray, env: EnvConfig) -> np.ndarray:
    """Distance to the first (nearest) observed obstacle of each observation."""
    _, _, rel, _ = split_observations(obs, env)
    return np.linalg.norm(rel[:, 0, :], axis=1)


class JointPhase:
    """Step 2: AIRL iterations whose policy loss carries w * L_derivative."""

    def __init__(
        self,
        trainer: AirlTrainer,
        barrier: Barrier,
        cfg: CbfConfig,
        callbacks: Iterable[TrainingCallback] = (),
    ):
        self.trainer = trainer
        self.barrier = barrier
        self.cfg = cfg
        self.callbacks = CallbackGroup(callbacks)
        self.barrier_opt = OptimState.fresh(barrier.params.size, cfg.barrier_step_size)
        safe = trainer.demos.safe_states
        pick = np.random.default_rng([trainer.seed, 4]).permutation(len(safe))
        self.safe_sample = safe[pick[:Y_SAFE_SAMPLE]]

    def _explored_pool(self, observations: np.ndarray) -> np.ndarray:
        """States with h >= 0, uniformly subsampled down to explored_cap."""
        kept = observations[barrier_values(self.barrier, observations) >= 0]
        if len(kept) <= self.cfg.explored_cap:
            return kept
        # Own stream: the update rng must stay untouched for the w = 0 reduction
        rng = np.random.default_rng([self.trainer.seed, self.trainer.iteration, POOL_STREAM])
        pick = rng.choice(len(kept), size=self.cfg.explored_cap, replace=False)
        return kept[np.sort(pick)]

    def _derivative_objective(self, pool: np.ndarray):
        cfg, env = self.cfg, self.trainer.env

        def objective(policy: Policy, rng: np.random.Generator):
            idx = rng.integers(0, len(pool), size=min(cfg.derivative_minibatch, len(pool)))
            terms = derivative_terms(self.barrier, policy, pool[idx], cfg, env, normalize=True)
            return terms.loss, combined_grad(
                np.zeros_like(terms.grad_policy), terms.grad_policy, cfg.w
            )

        return objective

    def _refine_barrier(
        self, observations: np.ndarray, pool: np.ndarray, rng: np.random.Generator
    ) -> float:
        """A few barrier steps on explored clear states, pd states and w * L_derivative."""
        demos, env, cfg = self.trainer.demos, self.trainer.env, self.cfg
        clear = observations[nearest_distance(observations, env) >= demos.d_pd]
        pd = demos.pd_states
        losses = []
        for _ in range(cfg.refine_steps):
            safe_batch = clear
            if len(clear):
                pick = rng.integers(0, len(clear), size=min(cfg.barrier_minibatch, len(clear)))
                safe_batch = clear[pick]
            pick = rng.integers(0, len(pd), size=min(cfg.barrier_minibatch, len(pd)))
            pd_batch = pd[pick]
            loss, grad = barrier_loss_and_grad(
                self.barrier,
                safe_batch,
                pd_batch,
                cfg.margin_safe,
                cfg.margin_pd,
                normalizer=len(safe_batch) + len(pd_batch),
            )
            if len(pool) and cfg.w > 0:
                idx = rng.integers(0, len(pool), size=min(cfg.derivative_minibatch, len(pool)))
                terms = derivative_terms(
                    self.barrier, self.trainer.policy, pool[idx], cfg, env, normalize=True
                )
                grad = grad + cfg.w * terms.grad_barrier
            self.barrier_opt, self.barrier = opt_step(self.barrier_opt, self.barrier, grad)
            losses.append(loss)
        return float(np.mean(losses)) if losses else float("nan")

    def run(self, iters: int) -> TrainReport:
        trainer, cfg = self.trainer, self.cfg
        report = TrainReport()
        self.callbacks.on_phase_start("joint", iters)
        for step_index in range(iters):
            batch = trainer.collect()
            rng = trainer.update_rng()
            record = IterationRecord(phase="joint", iteration=trainer.iteration)
            record.loss_discriminator = trainer.update_discriminator(batch, rng)

            pool = self._explored_pool(batch.observations)
            extra = self._derivative_objective(pool) if cfg.w > 0 and len(pool) else None
            record.loss_policy, _ = trainer.update_policy(batch, rng, extra)
            if not cfg.freeze_barrier_in_step2:
                record.loss_barrier = self._refine_barrier(batch.observations, pool, rng)

            record.loss_derivative = derivative_terms(
                self.barrier, trainer.policy, pool, cfg, trainer.env, normalize=True
            ).loss
            record.estimate_y = estimate_y(
                self.barrier,
                trainer.policy,
                self.safe_sample,
                trainer.demos.pd_states,
                batch.observations,
                cfg,
                trainer.env,
            )
            if trainer.should_evaluate(step_index == iters - 1):
                trainer.attach_evaluation(record)
            report.add(record)
            self.callbacks.on_iteration_end(record)
            trainer.iteration += 1
        self.callbacks.on_phase_end("joint")
        return report

    def final_checks(self) -> dict:
        """R3 satisfaction and per-trajectory y on fresh policy rollouts."""
        trainer = self.trainer
        fresh = collect_rollouts(
            trainer.policy,
            trainer.env,
            trainer.cfg.n_steps,
            seed=trainer.seed + VERIFY_SEED_OFFSET,
        )
        fraction, count = r3_satisfaction(
            self.barrier, trainer.policy, fresh.observations, self.cfg, trainer.env
        )
        ys = trajectory_y(
            self.barrier,
            trainer.policy,
            self.safe_sample,
            trainer.demos.pd_states,
            fresh,
            self.cfg,
            trainer.env,
        )
        return {
            "r3_satisfaction": fraction,
            "r3_states": float(count),
            "trajectory_y_positive": float(np.mean(np.array(ys) > 0)),
        }


def run_cbfirl(
    env: EnvConfig,
    demos: DemoSet,
    seed: int,
    airl_iters: int,
    airl_cfg: AirlConfig = AirlConfig(),
    cbf_cfg: Optional[CbfConfig] = None,
    callbacks: Iterable[TrainingCallback] = (),
    pretrained: Optional[AirlTrainer] = None,
) -> CbfirlResult:
    """
    AIRL pre-training, then Step 1, then Step 2.

    Args:
        pretrained: An AirlTrainer that already ran its pre-training; it is
            copied, not modified
    """
    cbf_cfg = cbf_cfg or CbfConfig(dt=env.dt)
    callbacks = list(callbacks)
    report = TrainReport()
    if pretrained is None:
        trainer = AirlTrainer(env, demos, seed, airl_cfg, callbacks)
        report.extend(trainer.run(airl_iters))
    else:
        trainer = copy.copy(pretrained)

    barrier = init_barrier(env.obs_dim, cbf_cfg.hidden, np.random.default_rng([seed, 3]))
    barrier, barrier_report = train_barrier(barrier, demos, cbf_cfg, seed, callbacks)
    report.extend(barrier_report)

    joint = JointPhase(trainer, barrier, cbf_cfg, callbacks)
    report.extend(joint.run(cbf_cfg.joint_iters))
    report.summary.update(joint.final_checks())
    return CbfirlResult(trainer=trainer, barrier=joint.barrier, report=report)


def train_cbfirl(
    env: EnvConfig,
    demos: DemoSet,
    seed: int,
    airl_iters: int = 100,
    airl_cfg: AirlConfig = AirlConfig(),
    cbf_cfg: Optional[CbfConfig] = None,
    callbacks: Iterable[TrainingCallback] = (),
) -> Tuple[Policy, Discriminator, Barrier, TrainReport]:
    """Full CBFIRL pipeline; joint_iters = 0 stops after Step 1."""
    result = run_cbfirl(env, demos, seed, airl_iters, airl_cfg, cbf_cfg, callbacks)
    return result.policy, result.discriminator, result.barrier, result.report

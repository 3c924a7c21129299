"""AIRL training loop: rollouts, discriminator BCE steps, clipped policy steps."""

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from airl.discriminator import Discriminator, discriminator_loss_and_grad, init_discriminator
from airl.losses import DEFAULT_CLIP, DEFAULT_ENTROPY_COEF, policy_loss_and_grad
from airl.policy import Policy, critic_loss_and_grad, init_critic, init_policy
from airl.rollout import DEFAULT_GAE_LAMBDA, DEFAULT_GAMMA, RolloutBatch, collect_rollouts
from callbacks import CallbackGroup, IterationRecord, TrainingCallback, TrainReport
from demos import DemoSet
from diffnet import Mlp, OptimState, opt_step
from dynamics import EnvConfig
from errors import UsageError
from harness.metrics import evaluate

# Episode seeds of consecutive training iterations are this far apart
ROLLOUT_SEED_STRIDE: int = 100_000
# Evaluation episodes use seeds far away from every training rollout
EVAL_SEED_OFFSET: int = 1_000_000_000

# Extra objective added to L_policy: (policy, rng) -> (value, gradient)
ExtraObjective = Callable[[Policy, np.random.Generator], Tuple[float, np.ndarray]]


@dataclass(frozen=True)
class AirlConfig:
    """
    Hyperparameters of the adversarial imitation loop.

    Attributes:
        hidden: Hidden widths of the policy mean, discriminator and critic nets
        n_steps: Environment steps collected per iteration
        minibatch: Minibatch size for every update
        epochs: Policy/critic passes over each batch
        disc_epochs: Discriminator passes over each batch
        gamma: Discount factor
        gae_lambda: GAE mixing factor
        clip: Ratio clip of the surrogate objective
        entropy_coef: Entropy bonus weight
        policy_step_size: Adam step size for the policy
        disc_step_size: Adam step size for the discriminator
        value_step_size: Adam step size for the critic
        eval_every: Evaluate the policy mean every this many iterations
        eval_episodes: Episodes per periodic evaluation
    """

    hidden: Tuple[int, ...] = (64, 64)
    n_steps: int = 2048
    minibatch: int = 256
    epochs: int = 4
    disc_epochs: int = 1
    gamma: float = DEFAULT_GAMMA
    gae_lambda: float = DEFAULT_GAE_LAMBDA
    clip: float = DEFAULT_CLIP
    entropy_coef: float = DEFAULT_ENTROPY_COEF
    policy_step_size: float = 3e-4
    disc_step_size: float = 3e-4
    value_step_size: float = 1e-3
    eval_every: int = 10
    eval_episodes: int = 20

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise UsageError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.minibatch < 1 or self.epochs < 0 or self.disc_epochs < 0:
            raise UsageError("minibatch must be >= 1 and epoch counts >= 0")


def _normalized(values: np.ndarray) -> np.ndarray:
    return (values - values.mean()) / max(float(values.std()), 1e-8)


class AirlTrainer:
    """
    Holds the three AIRL nets and their optimizers between iterations.

    Every iteration draws its rollout seeds and shuffling stream from
    (seed, iteration), so continuing a trainer for k more iterations gives
    the same result as a longer run.
    """

    def __init__(
        self,
        env: EnvConfig,
        demos: DemoSet,
        seed: int,
        cfg: AirlConfig = AirlConfig(),
        callbacks: Iterable[TrainingCallback] = (),
    ):
        if not demos.demos:
            raise UsageError("AIRL needs at least one demonstration")
        self.env = env
        self.demos = demos
        self.seed = seed
        self.cfg = cfg
        self.callbacks = CallbackGroup(callbacks)
        self.iteration = 0

        rng = np.random.default_rng([seed, 0])
        self.policy: Policy = init_policy(env.obs_dim, env.dim, cfg.hidden, rng, env.a_max)
        self.discriminator: Discriminator = init_discriminator(
            env.obs_dim, env.dim, cfg.hidden, rng
        )
        self.critic: Mlp = init_critic(env.obs_dim, cfg.hidden, rng)
        self.policy_opt = OptimState.fresh(self.policy.params.size, cfg.policy_step_size)
        self.disc_opt = OptimState.fresh(self.discriminator.params.size, cfg.disc_step_size)
        self.critic_opt = OptimState.fresh(self.critic.params.size, cfg.value_step_size)

    def update_rng(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, self.iteration, 1])

    def collect(self) -> RolloutBatch:
        return collect_rollouts(
            self.policy,
            self.env,
            self.cfg.n_steps,
            seed=self.seed + ROLLOUT_SEED_STRIDE * (self.iteration + 1),
            discriminator=self.discriminator,
            critic=self.critic,
            gamma=self.cfg.gamma,
            gae_lambda=self.cfg.gae_lambda,
        )

    def _minibatches(self, n: int, rng: np.random.Generator):
        order = rng.permutation(n)
        for start in range(0, n, self.cfg.minibatch):
            yield order[start : start + self.cfg.minibatch]

    def update_discriminator(self, batch: RolloutBatch, rng: np.random.Generator) -> float:
        """BCE steps on policy minibatches paired with equally many expert pairs."""
        expert_obs, expert_act = self.demos.expert_batch()
        losses = []
        for _ in range(self.cfg.disc_epochs):
            for idx in self._minibatches(len(batch), rng):
                pick = rng.integers(0, len(expert_obs), size=len(idx))
                loss, grad = discriminator_loss_and_grad(
                    self.discriminator,
                    self.policy,
                    (expert_obs[pick], expert_act[pick]),
                    (batch.observations[idx], batch.executed[idx]),
                )
                self.disc_opt, self.discriminator = opt_step(
                    self.disc_opt, self.discriminator, grad
                )
                losses.append(loss)
        return float(np.mean(losses)) if losses else float("nan")

    def update_policy(
        self,
        batch: RolloutBatch,
        rng: np.random.Generator,
        extra: Optional[ExtraObjective] = None,
    ) -> Tuple[float, Optional[float]]:
        """
        Clipped-surrogate steps (plus any extra objective) and critic regression.

        Returns:
            Tuple of (mean policy loss, mean extra objective or None)
        """
        advantages = _normalized(batch.advantages)
        policy_losses, extra_losses = [], []
        for _ in range(self.cfg.epochs):
            for idx in self._minibatches(len(batch), rng):
                loss, grad = policy_loss_and_grad(
                    self.policy,
                    batch.observations[idx],
                    batch.actions[idx],
                    batch.logprobs[idx],
                    advantages[idx],
                    self.cfg.clip,
                    self.cfg.entropy_coef,
                )
                if extra is not None:
                    extra_loss, extra_grad = extra(self.policy, rng)
                    grad = grad + extra_grad
                    extra_losses.append(extra_loss)
                self.policy_opt, self.policy = opt_step(self.policy_opt, self.policy, grad)
                policy_losses.append(loss)

                _, critic_grad = critic_loss_and_grad(
                    self.critic, batch.observations[idx], batch.returns[idx]
                )
                self.critic_opt, self.critic = opt_step(
                    self.critic_opt, self.critic, critic_grad
                )
        mean_policy = float(np.mean(policy_losses)) if policy_losses else float("nan")
        mean_extra = float(np.mean(extra_losses)) if extra_losses else None
        return mean_policy, mean_extra

    def should_evaluate(self, last: bool) -> bool:
        return last or (self.iteration + 1) % self.cfg.eval_every == 0

    def attach_evaluation(self, record: IterationRecord) -> None:
        metrics = evaluate(
            self.policy,
            self.env,
            self.cfg.eval_episodes,
            seed=self.seed + EVAL_SEED_OFFSET,
        )
        record.success_rate = metrics.success_rate
        record.collision_rate = metrics.collision_rate

    def run(self, iters: int, phase: str = "airl") -> TrainReport:
        """Plain AIRL for `iters` iterations."""
        report = TrainReport()
        self.callbacks.on_phase_start(phase, iters)
        for step_index in range(iters):
            batch = self.collect()
            rng = self.update_rng()
            record = IterationRecord(phase=phase, iteration=self.iteration)
            record.loss_discriminator = self.update_discriminator(batch, rng)
            record.loss_policy, _ = self.update_policy(batch, rng)
            if self.should_evaluate(step_index == iters - 1):
                self.attach_evaluation(record)
            report.add(record)
            self.callbacks.on_iteration_end(record)
            self.iteration += 1
        self.callbacks.on_phase_end(phase)
        return report


def train_airl(
    env: EnvConfig,
    demos: DemoSet,
    iters: int,
    seed: int,
    cfg: AirlConfig = AirlConfig(),
    callbacks: Iterable[TrainingCallback] = (),
) -> Tuple[Policy, Discriminator, TrainReport]:
    """Run AIRL from scratch; iters = 0 returns the initialized nets."""
    trainer = AirlTrainer(env, demos, seed, cfg, callbacks)
    report = trainer.run(iters)
    return trainer.policy, trainer.discriminator, report

import numpy as np
import pytest

from airl.trainer import AirlConfig, AirlTrainer
from cbf.barrier import CbfConfig, init_barrier
from cbf.trainer import JointPhase, run_cbfirl, sign_accuracy, train_barrier
from errors import BarrierUnlearnableError


@pytest.fixture
def tiny_airl():
    return AirlConfig(hidden=(8,), n_steps=80, minibatch=40, epochs=1, eval_every=5, eval_episodes=2)


def tiny_cbf(**overrides):
    settings = dict(
        hidden=(8,),
        barrier_epochs=3,
        joint_iters=1,
        barrier_minibatch=32,
        min_accuracy=0.0,
        derivative_minibatch=16,
        refine_steps=2,
    )
    settings.update(overrides)
    return CbfConfig(**settings)


def test_train_barrier_reports_its_summary(tiny_env, tiny_demos):
    b = init_barrier(tiny_env.obs_dim, (8,), np.random.default_rng(0))
    _, report = train_barrier(b, tiny_demos, tiny_cbf(), seed=0)
    assert set(report.summary) == {
        "barrier_holdout_accuracy",
        "barrier_epochs_run",
        "barrier_final_loss",
    }
    assert 1 <= report.summary["barrier_epochs_run"] <= 3
    assert [r.phase for r in report.records] == ["barrier"] * len(report.records)


def test_zero_epochs_leave_the_barrier_alone(tiny_env, tiny_demos):
    b = init_barrier(tiny_env.obs_dim, (8,), np.random.default_rng(0))
    trained, report = train_barrier(b, tiny_demos, tiny_cbf(barrier_epochs=0, min_accuracy=1.0), 0)
    np.testing.assert_array_equal(trained.params, b.params)
    assert report.records == []


def test_unlearnable_barrier_raises(constant_barrier, tiny_demos):
    cfg = tiny_cbf(barrier_epochs=2, barrier_step_size=1e-9, min_accuracy=0.99, loss_tolerance=0.0)
    with pytest.raises(BarrierUnlearnableError):
        train_barrier(constant_barrier(0.1), tiny_demos, cfg, seed=0)


def test_sign_accuracy_counts_both_sets(constant_barrier, random_observations):
    safe, pd = random_observations(3), random_observations(1, seed=1)
    assert sign_accuracy(constant_barrier(0.1), safe, pd) == 0.75
    assert sign_accuracy(constant_barrier(-0.1), safe, pd) == 0.25


def test_zero_weight_with_frozen_barrier_is_plain_airl(tiny_env, tiny_demos, tiny_airl):
    result = run_cbfirl(
        tiny_env, tiny_demos, 2, airl_iters=1, airl_cfg=tiny_airl, cbf_cfg=tiny_cbf(w=0.0)
    )
    plain = AirlTrainer(tiny_env, tiny_demos, 2, tiny_airl)
    plain.run(2)
    np.testing.assert_array_equal(result.policy.params, plain.policy.params)
    np.testing.assert_array_equal(result.discriminator.params, plain.discriminator.params)


def test_unfrozen_barrier_keeps_learning(tiny_env, tiny_demos, tiny_airl):
    frozen = run_cbfirl(tiny_env, tiny_demos, 0, 0, tiny_airl, tiny_cbf())
    unfrozen = run_cbfirl(
        tiny_env, tiny_demos, 0, 0, tiny_airl, tiny_cbf(freeze_barrier_in_step2=False)
    )
    assert not np.array_equal(frozen.barrier.params, unfrozen.barrier.params)
    joint = unfrozen.report.phase("joint")
    assert len(joint) == 1
    assert joint[0].loss_barrier is not None
    assert joint[0].estimate_y is not None


def test_pretrained_trainer_is_not_modified(tiny_env, tiny_demos, tiny_airl):
    pretrained = AirlTrainer(tiny_env, tiny_demos, 0, tiny_airl)
    pretrained.run(1)
    before = pretrained.policy.params.copy()
    run_cbfirl(tiny_env, tiny_demos, 0, 1, tiny_airl, tiny_cbf(), pretrained=pretrained)
    np.testing.assert_array_equal(pretrained.policy.params, before)
    assert pretrained.iteration == 1


def test_final_checks_are_reported(tiny_env, tiny_demos, tiny_airl):
    result = run_cbfirl(tiny_env, tiny_demos, 0, 0, tiny_airl, tiny_cbf())
    summary = result.report.summary
    assert 0.0 <= summary["r3_satisfaction"] <= 1.0
    assert 0.0 <= summary["trajectory_y_positive"] <= 1.0
    assert summary["r3_states"] >= 0


def test_explored_pool_samples_the_whole_batch(
    tiny_env, tiny_demos, tiny_airl, constant_barrier, random_observations
):
    trainer = AirlTrainer(tiny_env, tiny_demos, 0, tiny_airl)
    phase = JointPhase(trainer, constant_barrier(0.1), tiny_cbf(explored_cap=50))
    observations = random_observations(200)
    pool = phase._explored_pool(observations)

    assert pool.shape == (50, observations.shape[1])
    rows = [int(np.flatnonzero((observations == row).all(axis=1))[0]) for row in pool]
    assert len(set(rows)) == 50
    assert rows == sorted(rows)
    assert max(rows) >= 50
    np.testing.assert_array_equal(pool, phase._explored_pool(observations))


def test_explored_pool_keeps_small_batches_whole(
    tiny_env, tiny_demos, tiny_airl, constant_barrier, random_observations
):
    trainer = AirlTrainer(tiny_env, tiny_demos, 0, tiny_airl)
    observations = random_observations(30)
    kept = JointPhase(trainer, constant_barrier(0.1), tiny_cbf(explored_cap=50))
    np.testing.assert_array_equal(kept._explored_pool(observations), observations)
    dropped = JointPhase(trainer, constant_barrier(-0.1), tiny_cbf(explored_cap=50))
    assert len(dropped._explored_pool(observations)) == 0

import numpy as np
import pytest

from airl.discriminator import (
    Discriminator,
    discriminator_loss,
    discriminator_loss_and_grad,
    discriminator_output,
    init_discriminator,
    recovered_reward,
)
from airl.policy import HALF_LOG_TWO_PI, Policy
from diffnet import OptimState, opt_step


@pytest.fixture
def unit_density_policy(make_constant_net):
    """One-dimensional action with pi(0|s) = 1."""
    return Policy(make_constant_net((3, 1), 0.0), np.array([-HALF_LOG_TWO_PI]), a_max=1.0)


@pytest.fixture
def zero_discriminator(make_constant_net):
    return Discriminator(make_constant_net((4, 5, 1), 0.0))


def test_output_is_one_half_when_f_is_zero_and_pi_is_one(zero_discriminator, unit_density_policy):
    value = discriminator_output(zero_discriminator, unit_density_policy, np.zeros(3), np.zeros(1))
    assert value == pytest.approx(0.5, abs=1e-12)


def test_cross_entropy_at_uniform_output_is_two_log_two(zero_discriminator, unit_density_policy):
    batch = (np.random.default_rng(0).standard_normal((4, 3)), np.zeros((4, 1)))
    loss = discriminator_loss(zero_discriminator, unit_density_policy, batch, batch)
    assert loss == pytest.approx(2 * np.log(2), abs=1e-9)


def test_recovered_reward_is_the_log_odds(random_policy, tiny_env, random_observations):
    p = random_policy(1)
    d = init_discriminator(tiny_env.obs_dim, tiny_env.dim, (6,), np.random.default_rng(2))
    obs = random_observations(4)
    actions = np.random.default_rng(3).uniform(-1, 1, size=(4, 2))
    out = discriminator_output(d, p, obs, actions)
    np.testing.assert_allclose(recovered_reward(d, p, obs, actions), np.log(out) - np.log1p(-out))
    assert np.all((out > 0) & (out < 1))


def test_output_stays_inside_the_open_interval_for_extreme_logits(unit_density_policy, make_constant_net):
    huge = Discriminator(make_constant_net((4, 1), 800.0))
    value = discriminator_output(huge, unit_density_policy, np.zeros(3), np.zeros(1))
    assert value <= 1.0
    batch = (np.zeros((1, 3)), np.zeros((1, 1)))
    assert np.isfinite(discriminator_loss(huge, unit_density_policy, batch, batch))


@pytest.mark.parametrize("seed", range(10))
def test_discriminator_gradient_matches_finite_differences(
    seed, random_policy, random_observations, tiny_env, fd, close_gradients
):
    rng = np.random.default_rng(seed)
    p = random_policy(seed)
    d = init_discriminator(tiny_env.obs_dim, tiny_env.dim, (6,), rng)
    expert = (random_observations(4, seed=seed), rng.uniform(-1, 1, size=(4, 2)))
    policy = (random_observations(5, seed=seed + 100), rng.uniform(-1, 1, size=(5, 2)))

    def objective(params):
        return discriminator_loss(d.with_params(params), p, expert, policy)

    _, grad = discriminator_loss_and_grad(d, p, expert, policy)
    close_gradients(grad, fd(objective, d.params))


def test_one_adam_step_raises_the_expert_output(unit_density_policy, make_constant_net):
    d = Discriminator(make_constant_net((4, 1), 0.0))
    expert_obs = np.random.default_rng(0).standard_normal((32, 3))
    actions = np.zeros((32, 1))
    expert, policy = (expert_obs, actions), (-expert_obs, actions)

    before = discriminator_output(d, unit_density_policy, expert_obs, actions)
    _, grad = discriminator_loss_and_grad(d, unit_density_policy, expert, policy)
    _, d = opt_step(OptimState.fresh(d.params.size, 1e-3), d, grad)

    np.testing.assert_allclose(before, 0.5)
    assert discriminator_output(d, unit_density_policy, expert_obs, actions).mean() >= 0.5
    assert discriminator_output(d, unit_density_policy, -expert_obs, actions).mean() <= 0.5

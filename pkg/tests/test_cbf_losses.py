import numpy as np
import pytest

from airl.policy import policy_mean
from cbf.barrier import Barrier, CbfConfig, barrier_values, init_barrier
from cbf.losses import (
    barrier_loss,
    barrier_loss_and_grad,
    combined_grad,
    combined_loss,
    derivative_hinge,
    derivative_loss,
    derivative_terms,
)
from diffnet import Mlp
from dynamics import transition_observation
from errors import UsageError


@pytest.fixture
def first_coordinate_barrier(tiny_env):
    """h(s) = s[0]."""
    params = np.zeros(tiny_env.obs_dim + 1)
    params[0] = 1.0
    return Barrier(Mlp((tiny_env.obs_dim, 1), params))


def test_correctly_signed_sets_cost_nothing(first_coordinate_barrier, random_observations):
    obs = random_observations(20)
    safe, pd = obs[obs[:, 0] > 0], obs[obs[:, 0] < 0]
    assert barrier_loss(first_coordinate_barrier, safe, pd) == 0.0


def test_margins_charge_states_inside_the_band(first_coordinate_barrier, tiny_env):
    safe = np.zeros((1, tiny_env.obs_dim))
    safe[0, 0] = 0.02
    pd = np.zeros((1, tiny_env.obs_dim))
    pd[0, 0] = -0.5
    loss = barrier_loss(first_coordinate_barrier, safe, pd, m_s=0.05, m_pd=0.05)
    assert loss == pytest.approx(0.03)


def test_barrier_loss_needs_both_sets(first_coordinate_barrier, random_observations):
    with pytest.raises(UsageError):
        barrier_loss(first_coordinate_barrier, random_observations(3), np.zeros((0, 12)))


@pytest.mark.parametrize("seed", range(5))
def test_barrier_gradient_matches_finite_differences(
    seed, tiny_env, random_observations, fd, close_gradients
):
    b = init_barrier(tiny_env.obs_dim, (6,), np.random.default_rng(seed))
    safe = random_observations(8, seed=seed)
    pd = random_observations(6, seed=seed + 50)

    def objective(params):
        return barrier_loss_and_grad(b.with_params(params), safe, pd, 0.05, 0.05, 14)[0]

    _, grad = barrier_loss_and_grad(b, safe, pd, 0.05, 0.05, normalizer=14)
    close_gradients(grad, fd(objective, b.params))


def test_derivative_hinge_value():
    assert derivative_hinge(np.array(1.0), np.array(0.8), 0.1, 1.0) == pytest.approx(1.0)
    assert derivative_hinge(np.array(1.0), np.array(1.2), 0.1, 1.0) == 0.0
    assert derivative_hinge(np.array(1.0), np.array(1.05), 0.1, 1.0) == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_larger_lambda_never_adds_violation(seed, tiny_env, random_policy, random_observations):
    b = init_barrier(tiny_env.obs_dim, (6,), np.random.default_rng(seed))
    p = random_policy(seed)
    states = random_observations(40, seed=seed)
    h_now = barrier_values(b, states)
    states, h_now = states[h_now >= 0], h_now[h_now >= 0]
    h_next = barrier_values(b, transition_observation(states, policy_mean(p, states), tiny_env))

    lams = [0.1, 0.5, 1.0, 5.0]
    hinges = [derivative_hinge(h_now, h_next, 0.1, lam) for lam in lams]
    for looser, tighter in zip(hinges[1:], hinges[:-1]):
        assert (looser <= tighter).all()
    losses = [derivative_loss(b, p, states, CbfConfig(lam=lam), tiny_env) for lam in lams]
    assert losses == sorted(losses, reverse=True)


def test_states_with_negative_h_do_not_contribute(
    make_constant_net, tiny_env, random_policy, random_observations
):
    negative = Barrier(make_constant_net((tiny_env.obs_dim, 4, 1), -0.2))
    terms = derivative_terms(
        negative, random_policy(0), random_observations(5), CbfConfig(), tiny_env
    )
    assert terms.n_states == 0
    assert terms.loss == 0.0
    assert not terms.grad_policy.any()


def test_constant_positive_barrier_never_violates(
    constant_barrier, tiny_env, random_policy, random_observations
):
    b = constant_barrier(0.3)
    assert derivative_loss(b, random_policy(0), random_observations(5), CbfConfig(), tiny_env) == 0.0


def _derivative_setup(seed, tiny_env, random_policy, random_observations):
    b = init_barrier(tiny_env.obs_dim, (6,), np.random.default_rng(seed))
    cfg = CbfConfig(lam=0.1)
    return b, random_policy(seed), random_observations(10, seed=seed), cfg


@pytest.mark.parametrize("seed", range(5))
def test_derivative_policy_gradient_matches_finite_differences(
    seed, tiny_env, random_policy, random_observations, fd, close_gradients
):
    b, p, states, cfg = _derivative_setup(seed, tiny_env, random_policy, random_observations)

    def objective(params):
        return derivative_terms(b, p.with_params(params), states, cfg, tiny_env, True).loss

    terms = derivative_terms(b, p, states, cfg, tiny_env, normalize=True)
    close_gradients(terms.grad_policy, fd(objective, p.params))


@pytest.mark.parametrize("seed", range(5))
def test_derivative_barrier_gradient_matches_finite_differences(
    seed, tiny_env, random_policy, random_observations, fd, close_gradients
):
    b, p, states, cfg = _derivative_setup(seed, tiny_env, random_policy, random_observations)

    def objective(params):
        return derivative_terms(b.with_params(params), p, states, cfg, tiny_env, True).loss

    terms = derivative_terms(b, p, states, cfg, tiny_env, normalize=True)
    close_gradients(terms.grad_barrier, fd(objective, b.params))


def test_zero_weight_returns_the_policy_term_untouched():
    grad = np.array([0.1, -0.2])
    assert combined_grad(grad, np.array([5.0, 5.0]), 0.0) is grad
    assert combined_loss(0.7, 123.0, 0.0) == 0.7
    assert combined_loss(0.7, 1.0, 0.5) == pytest.approx(1.2)


@pytest.mark.parametrize(
    "kwargs",
    [{"lam": 0.0}, {"lam": 20.0}, {"w": -1.0}, {"margin_safe": -0.1}, {"holdout_fraction": 1.0}],
)
def test_invalid_cbf_settings_raise(kwargs):
    with pytest.raises(UsageError):
        CbfConfig(**kwargs)

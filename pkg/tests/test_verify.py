import numpy as np
import pytest

from airl.policy import Policy, policy_mean
from airl.rollout import collect_rollouts
from cbf.barrier import Barrier, CbfConfig, barrier_values, init_barrier
from cbf.verify import estimate_y, r3_satisfaction, trajectory_y
from diffnet import Mlp, param_count
from dynamics import transition_observation
from errors import UsageError


def test_constant_positive_barrier(constant_barrier, random_policy, random_observations, tiny_env):
    b, p = constant_barrier(0.1), random_policy(0)
    safe, pd, explored = (random_observations(4, seed=s) for s in range(3))
    assert estimate_y(b, p, safe, pd, explored, CbfConfig(), tiny_env) == pytest.approx(-0.1)
    assert r3_satisfaction(b, p, explored, CbfConfig(), tiny_env) == (1.0, 4)


def test_constant_negative_barrier(constant_barrier, random_policy, random_observations, tiny_env):
    b, p = constant_barrier(-0.1), random_policy(0)
    safe, pd, explored = (random_observations(4, seed=s) for s in range(3))
    assert estimate_y(b, p, safe, pd, explored, CbfConfig(), tiny_env) == pytest.approx(-0.1)
    assert r3_satisfaction(b, p, explored, CbfConfig(), tiny_env) == (1.0, 0)


def test_empty_sets_raise(constant_barrier, random_policy, random_observations, tiny_env):
    obs = random_observations(3)
    with pytest.raises(UsageError):
        estimate_y(constant_barrier(0.1), random_policy(0), obs, obs, obs[:0], CbfConfig(), tiny_env)


def test_trajectory_y_has_one_value_per_episode(
    constant_barrier, random_policy, random_observations, tiny_env
):
    p = random_policy(0)
    batch = collect_rollouts(p, tiny_env, 80, seed=0)
    obs = random_observations(3)
    ys = trajectory_y(constant_barrier(0.1), p, obs, obs, batch, CbfConfig(), tiny_env)
    assert len(ys) == len(batch.episode_seeds)
    np.testing.assert_allclose(ys, -0.1)


def scanned_y(b, p, safe, pd, explored, cfg, env):
    """The y value worked out one state at a time."""
    terms = [float(barrier_values(b, s[None])[0]) for s in safe]
    terms += [-float(barrier_values(b, s[None])[0]) for s in pd]
    for s in explored:
        h_now = float(barrier_values(b, s[None])[0])
        if h_now < 0:
            continue
        a = policy_mean(p, s[None])
        h_next = float(barrier_values(b, transition_observation(s[None], a, env))[0])
        terms.append((h_next - h_now) / cfg.dt + cfg.lam * h_now)
    return min(terms)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_estimate_y_matches_a_state_by_state_scan(
    seed, random_policy, random_observations, tiny_env
):
    b = init_barrier(tiny_env.obs_dim, (6,), np.random.default_rng(seed))
    p = random_policy(seed)
    safe, pd, explored = (random_observations(5 + i, seed=10 * seed + i) for i in range(3))
    cfg = CbfConfig(lam=0.7)
    expected = scanned_y(b, p, safe, pd, explored, cfg, tiny_env)
    assert estimate_y(b, p, safe, pd, explored, cfg, tiny_env) == pytest.approx(expected)


@pytest.fixture
def position_barrier(tiny_env):
    """h(s) = x coordinate of the agent."""
    params = np.zeros(param_count((tiny_env.obs_dim, 1)))
    params[0] = 1.0
    return Barrier(Mlp((tiny_env.obs_dim, 1), params))


@pytest.fixture
def resting_policy(make_constant_net, tiny_env):
    net = make_constant_net((tiny_env.obs_dim, 4, tiny_env.dim), 0.0)
    return Policy(net, np.zeros(tiny_env.dim), tiny_env.a_max)


def test_positive_y_when_every_requirement_holds(
    position_barrier, resting_policy, random_observations, tiny_env
):
    safe = random_observations(6, seed=0)
    safe[:, 0] = np.abs(safe[:, 0]) + 0.05
    pd = random_observations(6, seed=1)
    pd[:, 0] = -np.abs(pd[:, 0]) - 0.05
    explored = random_observations(6, seed=2)
    explored[:, 0] = np.abs(explored[:, 0]) + 0.1
    explored[:, 2] = np.abs(explored[:, 2])
    cfg = CbfConfig()

    assert (barrier_values(position_barrier, safe) >= 0).all()
    assert (barrier_values(position_barrier, pd) < 0).all()
    y = estimate_y(position_barrier, resting_policy, safe, pd, explored, cfg, tiny_env)
    assert y > 0
    assert r3_satisfaction(position_barrier, resting_policy, explored, cfg, tiny_env) == (1.0, 6)


def test_unsafe_explored_states_leave_only_the_sign_terms(
    position_barrier, resting_policy, random_observations, tiny_env
):
    safe = random_observations(4, seed=0)
    safe[:, 0] = np.abs(safe[:, 0]) + 0.05
    pd = random_observations(4, seed=1)
    pd[:, 0] = -np.abs(pd[:, 0]) - 0.05
    explored = random_observations(4, seed=2)
    explored[:, 0] = -np.abs(explored[:, 0]) - 0.01
    cfg = CbfConfig()

    expected = min(safe[:, 0].min(), (-pd[:, 0]).min())
    y = estimate_y(position_barrier, resting_policy, safe, pd, explored, cfg, tiny_env)
    assert y == pytest.approx(expected)
    assert r3_satisfaction(position_barrier, resting_policy, explored, cfg, tiny_env) == (1.0, 0)

import numpy as np
import pytest

from dynamics import EnvConfig, WorldState, observe, step, transition_observation, transition_vjp
from errors import DimensionMismatchError


def test_transition_matches_step_for_a_single_neighbour():
    cfg = EnvConfig(n_obstacles=1, k_nearest=1)
    s = WorldState(
        t=0,
        agent_pos=np.array([0.1, -0.2]),
        agent_vel=np.array([0.3, 0.35]),
        obstacle_pos=np.array([[0.4, 0.1]]),
        obstacle_vel=np.array([[-0.05, 0.02]]),
    )
    action = np.array([0.7, -1.4])
    predicted = transition_observation(observe(s, cfg)[None, :], action[None, :], cfg)[0]
    np.testing.assert_allclose(predicted, observe(step(s, action, cfg), cfg), atol=1e-12)


def test_transition_rejects_mismatched_actions(tiny_env, random_observations):
    obs = random_observations(3)
    with pytest.raises(DimensionMismatchError):
        transition_observation(obs, np.zeros((2, tiny_env.dim)), tiny_env)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("speed", [0.2, 0.7])
def test_transition_vjp_matches_finite_differences(
    seed, speed, tiny_env, random_observations, fd, close_gradients
):
    rng = np.random.default_rng(seed)
    obs = random_observations(4, seed=seed, speed=speed)
    action = rng.uniform(-0.8, 0.8, size=(4, tiny_env.dim))
    cotangent = rng.standard_normal((4, tiny_env.obs_dim))

    def objective(flat):
        moved = transition_observation(obs, flat.reshape(action.shape), tiny_env)
        return float(np.sum(cotangent * moved))

    analytic = transition_vjp(obs, action, cotangent, tiny_env)
    close_gradients(analytic.ravel(), fd(objective, action.ravel()))


def test_transition_vjp_is_zero_along_clamped_components(tiny_env, random_observations):
    obs = random_observations(1)
    action = np.array([[3.0, 0.2]])
    grad = transition_vjp(obs, action, np.ones((1, tiny_env.obs_dim)), tiny_env)
    assert grad[0, 0] == 0.0
    assert grad[0, 1] != 0.0

import numpy as np
import pytest

from airl.policy import Policy
from cbf.barrier import Barrier
from demos import build_demo_set
from diffnet import Mlp, param_count
from dynamics import EnvConfig


def numeric_gradient(f, x: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function of a flat vector."""
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(x.size):
        bumped = x.copy()
        bumped[i] += eps
        up = f(bumped)
        bumped[i] -= 2 * eps
        down = f(bumped)
        grad[i] = (up - down) / (2 * eps)
    return grad


def assert_gradients_match(analytic: np.ndarray, numeric: np.ndarray, tol: float = 1e-4) -> None:
    scale = max(1.0, float(np.max(np.abs(numeric))))
    assert np.max(np.abs(analytic - numeric)) / scale < tol


def constant_net(layer_sizes, value: float) -> Mlp:
    """All weights zero, output bias `value`: the net returns `value` everywhere."""
    params = np.zeros(param_count(layer_sizes))
    params[-layer_sizes[-1] :] = value
    return Mlp(tuple(layer_sizes), params)


@pytest.fixture
def fd():
    return numeric_gradient


@pytest.fixture
def close_gradients():
    return assert_gradients_match


@pytest.fixture
def make_constant_net():
    return constant_net


@pytest.fixture(scope="session")
def tiny_env() -> EnvConfig:
    """Short episodes, three obstacles, start and goal 0.85 apart."""
    return EnvConfig(
        n_obstacles=3,
        k_nearest=2,
        horizon=40,
        start=(-0.3, -0.3),
        goal=(0.3, 0.3),
    )


@pytest.fixture(scope="session")
def tiny_demos(tiny_env):
    return build_demo_set(tiny_env, n_demos=3, pd_count=32, seed=0)


@pytest.fixture
def constant_barrier(tiny_env):
    def build(value: float, hidden=(4,)) -> Barrier:
        return Barrier(constant_net((tiny_env.obs_dim, *hidden, 1), value))

    return build


@pytest.fixture
def random_policy(tiny_env):
    def build(seed: int = 0, hidden=(6,), log_std: float = -0.5) -> Policy:
        rng = np.random.default_rng(seed)
        sizes = (tiny_env.obs_dim, *hidden, tiny_env.dim)
        net = Mlp(sizes, 0.3 * rng.standard_normal(param_count(sizes)))
        return Policy(net, np.full(tiny_env.dim, log_std), tiny_env.a_max)

    return build


@pytest.fixture
def random_observations(tiny_env):
    """Observations well inside the arena with generic neighbour offsets."""

    def build(n: int, seed: int = 0, speed: float = 0.2) -> np.ndarray:
        rng = np.random.default_rng(seed)
        d, k = tiny_env.dim, tiny_env.k_nearest
        pos = rng.uniform(-0.5, 0.5, size=(n, d))
        direction = rng.standard_normal((n, d))
        vel = speed * direction / np.linalg.norm(direction, axis=1, keepdims=True)
        rel = rng.uniform(-0.4, 0.4, size=(n, k, d))
        obs_vel = rng.uniform(-0.1, 0.1, size=(n, k, d))
        neighbours = np.concatenate([rel, obs_vel], axis=2).reshape(n, -1)
        return np.concatenate([pos, vel, neighbours], axis=1)

    return build

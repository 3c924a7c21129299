import numpy as np
import pytest

from demos import (
    ExpertGains,
    collect_pd_states,
    collect_safe_states,
    expert_action,
    generate_demos,
    read_demos,
    read_states,
    replay,
    write_demos,
    write_states,
)
from demos.expert import attractive_term, limit_acceleration, repulsive_term
from dynamics import EnvConfig, WorldState, clamp_action, split_observations
from errors import UsageError


def test_limit_acceleration_keeps_direction():
    np.testing.assert_allclose(limit_acceleration(np.array([2.0, -1.0]), 1.0), [1.0, -0.5])
    np.testing.assert_array_equal(limit_acceleration(np.array([0.3, 0.1]), 1.0), [0.3, 0.1])


def test_saturated_expert_action_keeps_heading_and_survives_clamping():
    cfg = EnvConfig(n_obstacles=1, k_nearest=1)
    gains = ExpertGains(k_damp=0.0)
    s = WorldState(
        t=0,
        agent_pos=np.array([0.0, 0.0]),
        agent_vel=np.zeros(2),
        obstacle_pos=np.array([[0.06, 0.02]]),
        obstacle_vel=np.zeros((1, 2)),
    )
    raw = attractive_term(s, cfg, gains) + repulsive_term(s, cfg, gains)
    action = expert_action(s, cfg, gains)
    assert np.max(np.abs(action)) == pytest.approx(cfg.a_max)
    np.testing.assert_array_equal(clamp_action(action, cfg), action)
    np.testing.assert_allclose(action / np.linalg.norm(action), raw / np.linalg.norm(raw))


def test_expert_pulls_toward_goal_when_obstacles_are_far():
    cfg = EnvConfig(n_obstacles=1, k_nearest=1)
    s = WorldState(
        t=0,
        agent_pos=np.array([0.0, 0.0]),
        agent_vel=np.zeros(2),
        obstacle_pos=np.array([[-0.8, 0.8]]),
        obstacle_vel=np.zeros((1, 2)),
    )
    action = expert_action(s, cfg, ExpertGains())
    np.testing.assert_allclose(action, np.array([0.9, 0.9]) / np.hypot(0.9, 0.9))


def test_expert_is_pushed_away_from_a_close_obstacle():
    cfg = EnvConfig(n_obstacles=1, k_nearest=1)
    gains = ExpertGains(k_attract=0.0, k_damp=0.0)
    s = WorldState(
        t=0,
        agent_pos=np.array([0.0, 0.0]),
        agent_vel=np.zeros(2),
        obstacle_pos=np.array([[0.1, 0.0]]),
        obstacle_vel=np.zeros((1, 2)),
    )
    action = expert_action(s, cfg, gains)
    assert action[0] < 0.0
    assert action[1] == pytest.approx(0.0)


def test_demos_are_safe_successes(tiny_env, tiny_demos):
    assert len(tiny_demos.demos) == 3
    for demo in tiny_demos.demos:
        assert demo.succeeded and not demo.collided
        assert np.all(np.abs(demo.actions) <= tiny_env.a_max)
    assert 0.0 < tiny_demos.acceptance_ratio <= 1.0


def test_demo_generation_is_deterministic(tiny_env):
    first = generate_demos(tiny_env, 2, seed=5)
    second = generate_demos(tiny_env, 2, seed=5)
    for a, b in zip(first, second):
        assert a.seed == b.seed
        np.testing.assert_array_equal(a.observations, b.observations)
        np.testing.assert_array_equal(a.actions, b.actions)


def test_replay_reproduces_a_demo(tiny_env, tiny_demos):
    demo = tiny_demos.demos[0]
    replayed = replay(demo, tiny_env)
    np.testing.assert_array_equal(replayed.observations, demo.observations)


def test_safe_states_concatenate_every_demo_observation(tiny_demos):
    safe = collect_safe_states(tiny_demos.demos)
    assert len(safe) == sum(len(d) for d in tiny_demos.demos)
    np.testing.assert_array_equal(safe[: len(tiny_demos.demos[0])], tiny_demos.demos[0].observations)


def test_pd_states_lie_in_the_distance_band(tiny_env, tiny_demos):
    _, _, rel, _ = split_observations(tiny_demos.pd_states, tiny_env)
    nearest = np.linalg.norm(rel[:, 0, :], axis=1)
    assert len(nearest) == 32
    assert np.all(nearest >= tiny_env.collision_radius)
    assert np.all(nearest < tiny_demos.d_pd)
    assert tiny_demos.d_pd == pytest.approx(2 * tiny_env.collision_radius)


def test_pd_threshold_must_exceed_collision_radius(tiny_env):
    with pytest.raises(UsageError):
        collect_pd_states(tiny_env, count=4, d_pd=tiny_env.collision_radius)


def test_demo_count_must_be_positive(tiny_env):
    with pytest.raises(UsageError):
        generate_demos(tiny_env, 0, seed=0)


def test_demo_and_state_files_read_back_equal(tmp_path, tiny_demos):
    write_demos(tmp_path / "demos.csv", tiny_demos.demos)
    write_states(tmp_path / "pd_states.csv", tiny_demos.pd_states)
    demos = read_demos(tmp_path / "demos.csv")
    assert [d.seed for d in demos] == [d.seed for d in tiny_demos.demos]
    for a, b in zip(demos, tiny_demos.demos):
        np.testing.assert_array_equal(a.observations, b.observations)
        np.testing.assert_array_equal(a.actions, b.actions)
        np.testing.assert_array_equal(a.successes, b.successes)
    np.testing.assert_array_equal(read_states(tmp_path / "pd_states.csv"), tiny_demos.pd_states)
    header = (tmp_path / "demos.csv").read_text().splitlines()[0]
    assert header.startswith("episode_id,t,obs_0,")
    assert header.endswith(",collision,success,seed")

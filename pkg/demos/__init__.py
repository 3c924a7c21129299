"""Scripted expert demonstrations and the state sets the barrier learns from."""

from .collect import (
    DEFAULT_DEMO_COUNT,
    DEFAULT_PD_COUNT,
    DemoSet,
    Trajectory,
    build_demo_set,
    collect_pd_states,
    collect_safe_states,
    generate_demos,
    generate_demos_with_stats,
    replay,
    rollout,
)
from .expert import ExpertGains, expert_action
from .io import read_demos, read_states, write_demos, write_states

__all__ = [
    "DEFAULT_DEMO_COUNT",
    "DEFAULT_PD_COUNT",
    "DemoSet",
    "ExpertGains",
    "Trajectory",
    "build_demo_set",
    "collect_pd_states",
    "collect_safe_states",
    "expert_action",
    "generate_demos",
    "generate_demos_with_stats",
    "read_demos",
    "read_states",
    "replay",
    "rollout",
    "write_demos",
    "write_states",
]

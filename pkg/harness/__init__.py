"""Evaluation and run plumbing.

Heatmap and comparison helpers are imported from harness.heatmap and
harness.compare, since both depend on the trainers.
"""

from .metrics import DEFAULT_EVAL_EPISODES, EpisodeRecord, Metrics, evaluate

__all__ = ["DEFAULT_EVAL_EPISODES", "EpisodeRecord", "Metrics", "evaluate"]

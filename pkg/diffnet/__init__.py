"""Small differentiable MLPs, Adam, and text checkpoints."""

from .checkpoint import format_checkpoint, load_checkpoint, parse_checkpoint, save_checkpoint
from .mlp import Mlp, backward, forward, init_mlp, param_count
from .optim import OptimState, adam_update, opt_step

__all__ = [
    "Mlp",
    "OptimState",
    "adam_update",
    "backward",
    "format_checkpoint",
    "forward",
    "init_mlp",
    "load_checkpoint",
    "opt_step",
    "param_count",
    "parse_checkpoint",
    "save_checkpoint",
]

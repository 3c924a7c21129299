"""Plain-text checkpoints shared by every network."""

from pathlib import Path
from typing import Sequence, Tuple

import numpy as np

from diffnet.mlp import Mlp, param_count
from errors import UsageError


def format_checkpoint(net: Mlp, extra: Sequence[float] = ()) -> str:
    """
    Render a net (plus optional trailing values) as checkpoint text.

    Line 1 holds the layer sizes; every following line holds one float in
    shortest round-trip form, so loading is bit-exact.
    """
    values = list(net.params) + [float(x) for x in extra]
    lines = [" ".join(str(n) for n in net.layer_sizes)]
    lines.extend(repr(float(x)) for x in values)
    return "\n".join(lines) + "\n"


def parse_checkpoint(text: str) -> Tuple[Mlp, np.ndarray]:
    """
    Inverse of format_checkpoint.

    Returns:
        Tuple of (net, extra values appended after the net parameters)

    Raises:
        UsageError: If the text is not a valid checkpoint
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise UsageError("Empty checkpoint")
    try:
        sizes = tuple(int(token) for token in lines[0].split())
        values = np.array([float(line) for line in lines[1:]], dtype=np.float64)
    except ValueError as e:
        raise UsageError(f"Malformed checkpoint: {e}") from e
    count = param_count(sizes)
    if len(values) < count:
        raise UsageError(
            f"Checkpoint for {sizes} needs {count} params, found {len(values)}"
        )
    return Mlp(sizes, values[:count]), values[count:]


def save_checkpoint(path: Path, net: Mlp, extra: Sequence[float] = ()) -> None:
    Path(path).write_text(format_checkpoint(net, extra), encoding="utf-8")


def load_checkpoint(path: Path) -> Tuple[Mlp, np.ndarray]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Could not read checkpoint {path}: {e}") from e
    return parse_checkpoint(text)

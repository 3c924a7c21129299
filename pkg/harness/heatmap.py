"""Barrier values over the arena with the obstacles frozen in place."""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np

from cbf.barrier import Barrier, barrier_values
from dynamics import EnvConfig, WorldState, observe
from errors import UnsupportedDimensionError, UsageError

DEFAULT_RESOLUTION: int = 64


@dataclass(frozen=True, eq=False)
class HeatmapGrid:
    """
    h on a resolution x resolution grid of agent positions.

    Attributes:
        values: Shape (resolution, resolution); row index = y, column index = x
        x_min, x_max, y_min, y_max: Axis bounds; the grid includes both ends
    """

    values: np.ndarray
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.resolution)

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.resolution)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeatmapGrid):
            return NotImplemented
        return np.array_equal(self.values, other.values) and (
            self.x_min,
            self.x_max,
            self.y_min,
            self.y_max,
        ) == (other.x_min, other.x_max, other.y_min, other.y_max)

    def to_text(self) -> str:
        lines = [
            f"# resolution = {self.resolution}",
            f"# x_min = {self.x_min!r}",
            f"# x_max = {self.x_max!r}",
            f"# y_min = {self.y_min!r}",
            f"# y_max = {self.y_max!r}",
        ]
        lines.extend(",".join(repr(float(v)) for v in row) for row in self.values)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "HeatmapGrid":
        header = {}
        rows: List[List[float]] = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                header[key.strip()] = value.strip()
            elif line.strip():
                rows.append([float(cell) for cell in line.split(",")])
        try:
            resolution = int(header["resolution"])
            bounds = [float(header[k]) for k in ("x_min", "x_max", "y_min", "y_max")]
        except (KeyError, ValueError) as e:
            raise UsageError(f"Malformed heatmap header: {e}") from e
        values = np.array(rows, dtype=np.float64)
        if values.shape != (resolution, resolution):
            raise UsageError(
                f"Heatmap declares resolution {resolution} but holds {values.shape}"
            )
        return cls(values, *bounds)

    def save(self, path: Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "HeatmapGrid":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def heatmap(
    b: Barrier, frozen: WorldState, cfg: EnvConfig, resolution: int = DEFAULT_RESOLUTION
) -> HeatmapGrid:
    """
    Evaluate h with the agent at rest at every grid point of the arena.

    Raises:
        UnsupportedDimensionError: If the environment is not planar
        UsageError: If resolution < 2
    """
    if cfg.dim != 2:
        raise UnsupportedDimensionError(f"heatmap needs dim = 2, got {cfg.dim}")
    if resolution < 2:
        raise UsageError(f"resolution must be >= 2, got {resolution}")
    half_width = cfg.arena_half_width
    axis = np.linspace(-half_width, half_width, resolution)
    rest = np.zeros(cfg.dim)
    observations = np.array(
        [observe(frozen.with_agent(np.array([x, y]), rest), cfg) for y in axis for x in axis]
    )
    values = barrier_values(b, observations).reshape(resolution, resolution)
    return HeatmapGrid(values, -half_width, half_width, -half_width, half_width)


def obstacle_region_means(
    grid: HeatmapGrid, frozen: WorldState, near: float, far: float
) -> Tuple[float, float]:
    """
    Mean h over cells within `near` of some obstacle, and over cells
    farther than `far` from all of them (nan when a region is empty).
    """
    xx, yy = np.meshgrid(grid.xs(), grid.ys())
    cells = np.stack([xx.ravel(), yy.ravel()], axis=1)
    distance = np.linalg.norm(
        cells[:, None, :] - frozen.obstacle_pos[None, :, :], axis=2
    ).min(axis=1)
    values = grid.values.ravel()
    near_mask, far_mask = distance < near, distance > far
    near_mean = float(values[near_mask].mean()) if near_mask.any() else float("nan")
    far_mean = float(values[far_mask].mean()) if far_mask.any() else float("nan")
    return near_mean, far_mean


def render_png(grid: HeatmapGrid, frozen: WorldState, cfg: EnvConfig, path: Path) -> None:
    """Save the grid as an image with obstacles and goal drawn on top."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Circle

    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(
        grid.values,
        origin="lower",
        extent=(grid.x_min, grid.x_max, grid.y_min, grid.y_max),
        cmap="RdYlGn",
    )
    ax.contour(grid.xs(), grid.ys(), grid.values, levels=[0.0], colors="k", linewidths=1)
    for centre in frozen.obstacle_pos:
        ax.add_patch(Circle(tuple(centre), cfg.collision_radius, color="k", fill=False))
    ax.plot(*cfg.goal, marker="*", color="b", markersize=12)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    plt.colorbar(im, ax=ax, label="h(s)")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)

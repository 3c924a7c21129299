"""CSV files for demonstration trajectories and potentially-dangerous states."""

import csv
from pathlib import Path
from typing import Dict, List

import numpy as np

from demos.collect import Trajectory
from errors import UsageError


def _fmt(value: float) -> str:
    return repr(float(value))


def write_demos(path: Path, demos: List[Trajectory]) -> None:
    """One row per step: episode_id, t, obs_*, act_*, collision, success, seed."""
    if not demos:
        raise UsageError("No demonstrations to write")
    obs_dim = demos[0].observations.shape[1]
    act_dim = demos[0].actions.shape[1]
    header = (
        ["episode_id", "t"]
        + [f"obs_{i}" for i in range(obs_dim)]
        + [f"act_{i}" for i in range(act_dim)]
        + ["collision", "success", "seed"]
    )
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for episode_id, demo in enumerate(demos):
            for t in range(len(demo)):
                writer.writerow(
                    [episode_id, t]
                    + [_fmt(x) for x in demo.observations[t]]
                    + [_fmt(x) for x in demo.actions[t]]
                    + [int(demo.collisions[t]), int(demo.successes[t]), demo.seed]
                )


def read_demos(path: Path) -> List[Trajectory]:
    """Inverse of write_demos."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or header[:2] != ["episode_id", "t"]:
            raise UsageError(f"{path} is not a demo file")
        obs_cols = [i for i, name in enumerate(header) if name.startswith("obs_")]
        act_cols = [i for i, name in enumerate(header) if name.startswith("act_")]
        rows_by_episode: Dict[int, List[List[str]]] = {}
        for row in reader:
            rows_by_episode.setdefault(int(row[0]), []).append(row)

    demos = []
    for episode_id in sorted(rows_by_episode):
        rows = rows_by_episode[episode_id]
        demos.append(
            Trajectory(
                seed=int(rows[0][-1]),
                observations=np.array([[float(r[i]) for i in obs_cols] for r in rows]),
                actions=np.array([[float(r[i]) for i in act_cols] for r in rows]),
                collisions=np.array([r[-3] == "1" for r in rows], dtype=bool),
                successes=np.array([r[-2] == "1" for r in rows], dtype=bool),
            )
        )
    return demos


def write_states(path: Path, states: np.ndarray) -> None:
    """Header obs_0..obs_{n-1}, then one observation per row."""
    states = np.atleast_2d(states)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([f"obs_{i}" for i in range(states.shape[1])])
        for row in states:
            writer.writerow([_fmt(x) for x in row])


def read_states(path: Path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header or not header[0].startswith("obs_"):
            raise UsageError(f"{path} is not a state file")
        return np.array([[float(x) for x in row] for row in reader])

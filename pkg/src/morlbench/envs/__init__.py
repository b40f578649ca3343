"""Benchmark environments: deterministic discrete-space MOMDPs."""

from __future__ import annotations

from .base import EnvSpec, StepOutcome
from .dst import DeepSeaTreasure
from .four_room import FourRoom
from .grid import GridMap, load_bundled_map, parse_map

ENV_IDS = ("dst-concave", "four-room")

# Hypervolume anchors used throughout the benchmark, per environment.
REFERENCE_POINTS: dict[str, tuple[float, ...]] = {
    "dst-concave": (0.0, -50.0),
    "four-room": (-1.0, -1.0, -1.0),
}


def make_env(env_id: str, max_episode_steps: int = 1000, grid: GridMap | None = None):
    if env_id == "dst-concave":
        return DeepSeaTreasure(grid, max_episode_steps)
    if env_id == "four-room":
        return FourRoom(grid, max_episode_steps)
    raise ValueError(f"unknown environment {env_id!r} (known: {', '.join(ENV_IDS)})")


__all__ = [
    "EnvSpec",
    "StepOutcome",
    "DeepSeaTreasure",
    "FourRoom",
    "GridMap",
    "parse_map",
    "load_bundled_map",
    "make_env",
    "ENV_IDS",
    "REFERENCE_POINTS",
]

"""Shared environment contract types."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple


class StepOutcome(NamedTuple):
    next_state: int
    reward: tuple[float, ...]
    terminated: bool
    truncated: bool


@dataclass(frozen=True)
class EnvSpec:
    name: str
    num_objectives: int
    action_count: int
    state_count: int
    max_episode_steps: int

"""Pareto Q-Learning: inner-loop multi-policy learning with set-valued
Q estimates.

Each (state, action) pair keeps the visit count, the incremental mean of
the immediate reward vector, and the non-dominated set of discounted future
returns observed to flow through it. The pair's Q-set is the mean reward
translated by gamma times each future-return point, so short-term gains
and long-term goals stay separated.

Action selection scores each action's Q-set with a set evaluation
(hypervolume against a reference point by default; cardinality and Pareto
dominance contribution are also available) and picks the best, epsilon
greedily. The agent's current front approximation is the non-dominated
union of the start state's Q-sets.

Tabular and set-valued, so memory grows with state-action pairs times
front sizes; construction refuses environments beyond a configurable
state-action cap instead of crawling.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .envs import REFERENCE_POINTS
from .moq import EpsilonSchedule, derive_streams, epsilon_at
from .pareto import (
    ParetoArchive,
    Point,
    dominates,
    hypervolume_points,
    nondominated_filter,
    nondominated_points,
)

SET_EVAL_MODES = ("hypervolume", "cardinality", "pareto")


class CapacityError(RuntimeError):
    """Environment too large for tabular set-based Q-learning."""


@dataclass(frozen=True)
class SetEvaluation:
    mode: str = "hypervolume"
    ref: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.mode not in SET_EVAL_MODES:
            raise ValueError(f"unknown set evaluation {self.mode!r}")
        if (self.ref is not None) != (self.mode == "hypervolume"):
            raise ValueError("a reference point is required exactly for hypervolume mode")


@dataclass(frozen=True)
class PqlConfig:
    gamma: float = 0.9
    total_timesteps: int = 400_000
    set_eval: str = "hypervolume"
    ref_point: tuple[float, ...] | None = None
    schedule: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    state_cap: int = 200_000

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.set_eval not in SET_EVAL_MODES:
            raise ValueError(f"unknown set evaluation {self.set_eval!r}")
        if self.total_timesteps < 0:
            raise ValueError("total_timesteps must be >= 0")


class _PairStats:
    __slots__ = ("count", "mean_reward", "future")

    def __init__(self, num_objectives: int):
        self.count = 0
        self.mean_reward = [0.0] * num_objectives
        self.future: list[Point] = []


class QSetStore:
    """Per (state, action) statistics, materialised on first visit."""

    __slots__ = ("state_count", "action_count", "num_objectives", "_states")

    def __init__(self, state_count: int, action_count: int, num_objectives: int):
        self.state_count = state_count
        self.action_count = action_count
        self.num_objectives = num_objectives
        self._states: dict[int, list[_PairStats | None]] = {}

    def pair(self, state: int, action: int) -> _PairStats | None:
        row = self._states.get(state)
        return row[action] if row is not None else None

    def ensure(self, state: int, action: int) -> _PairStats:
        if not 0 <= state < self.state_count:
            raise ValueError(f"state {state} out of range [0, {self.state_count})")
        row = self._states.get(state)
        if row is None:
            row = [None] * self.action_count
            self._states[state] = row
        stats = row[action]
        if stats is None:
            stats = _PairStats(self.num_objectives)
            row[action] = stats
        return stats


def q_set(store: QSetStore, state: int, action: int, gamma: float) -> list[Point]:
    """Current Q-set of one pair: mean reward composed with each discounted
    future return; just the mean for pairs that only reached terminals;
    empty for unvisited pairs."""
    stats = store.pair(state, action)
    if stats is None or stats.count == 0:
        return []
    mean = stats.mean_reward
    if not stats.future:
        return [tuple(mean)]
    return [tuple(m + gamma * v for m, v in zip(mean, fut)) for fut in stats.future]


def pql_update(
    store: QSetStore,
    state: int,
    action: int,
    reward,
    next_state: int,
    terminated: bool,
    gamma: float,
) -> None:
    """Fold one transition into the store.

    Advances the incremental reward mean and snapshots the non-dominated
    union of the successor state's Q-sets as this pair's future-return set
    (cleared on terminal transitions).
    """
    stats = store.ensure(state, action)
    stats.count += 1
    n = stats.count
    mean = stats.mean_reward
    for o, r_o in enumerate(reward):
        mean[o] += (r_o - mean[o]) / n
    if terminated:
        stats.future = []
        return
    union: list[Point] = []
    for a in range(store.action_count):
        union.extend(q_set(store, next_state, a, gamma))
    stats.future = nondominated_points(union)


def score_action_sets(fronts: list[list[Point]], evaluation: SetEvaluation) -> list[float]:
    """Score sibling actions' Q-sets jointly.

    hypervolume: each front's hypervolume against the reference point.
    cardinality: how many of the front's points no sibling point dominates.
    pareto: 1 if the front contributes to the non-dominated union, else 0.
    """
    if evaluation.mode == "hypervolume":
        return [hypervolume_points(front, evaluation.ref) for front in fronts]
    if evaluation.mode == "cardinality":
        scores = []
        for i, front in enumerate(fronts):
            rivals = [p for j, other in enumerate(fronts) if j != i for p in other]
            scores.append(
                float(sum(1 for p in front if not any(dominates(q, p) for q in rivals)))
            )
        return scores
    union = [p for front in fronts for p in front]
    best = set(nondominated_points(union))
    return [1.0 if any(p in best for p in front) else 0.0 for front in fronts]


def evaluate_action_set(
    front: list[Point] | tuple[Point, ...],
    evaluation: SetEvaluation,
    siblings: tuple[list[Point], ...] = (),
) -> float:
    """Score one action's Q-set in the context of its sibling actions."""
    return score_action_sets([list(front), *map(list, siblings)], evaluation)[0]


class PqlAgent:
    def __init__(self, spec, config: PqlConfig, rng: random.Random):
        pairs = spec.state_count * spec.action_count
        if pairs > config.state_cap:
            raise CapacityError(
                f"{spec.name}: {spec.state_count} states x {spec.action_count} actions "
                f"= {pairs} pairs exceeds the Pareto Q-Learning cap of {config.state_cap}; "
                "set-based tabular learning does not scale to this state space "
                "(raise state_cap to force it)"
            )
        ref = config.ref_point
        if config.set_eval == "hypervolume" and ref is None:
            ref = REFERENCE_POINTS.get(spec.name)
            if ref is None:
                raise ValueError("hypervolume set evaluation needs ref_point")
        self.config = config
        self.evaluation = SetEvaluation(config.set_eval, ref if config.set_eval == "hypervolume" else None)
        self.gamma = config.gamma
        self.rng = rng
        self.action_count = spec.action_count
        self.store = QSetStore(spec.state_count, spec.action_count, spec.num_objectives)

    def act(self, state: int, epsilon: float) -> int:
        rng = self.rng
        if epsilon > 0.0 and rng.random() < epsilon:
            return rng.randrange(self.action_count)
        fronts = [q_set(self.store, state, a, self.gamma) for a in range(self.action_count)]
        scores = score_action_sets(fronts, self.evaluation)
        best = max(scores)
        ties = [i for i, s in enumerate(scores) if s == best]
        if len(ties) == 1:
            return ties[0]
        return ties[rng.randrange(len(ties))]

    def update(self, state: int, action: int, reward, next_state: int, terminated: bool) -> None:
        pql_update(self.store, state, action, reward, next_state, terminated, self.gamma)

    def front(self, state: int) -> ParetoArchive:
        """Non-dominated union of the state's Q-sets: the agent's current
        Pareto front approximation when called on the start state."""
        union: list[Point] = []
        for a in range(self.action_count):
            union.extend(q_set(self.store, state, a, self.gamma))
        return nondominated_filter(union)


def train(env, config: PqlConfig, seed: int, eval_interval: int | None = 1000):
    """Train Pareto Q-Learning on ``env`` for the configured step budget.

    Returns ``(agent, timeline)`` with one ``(timestep, front)`` snapshot
    per evaluation interval, taken at the environment's start state.
    """
    (rng,) = derive_streams(seed, 1)
    agent = PqlAgent(env.spec, config, rng)
    timeline: list[tuple[int, ParetoArchive]] = []
    total = config.total_timesteps
    schedule = config.schedule
    state = env.reset()
    for t in range(1, total + 1):
        eps = epsilon_at(schedule, t - 1, total)
        action = agent.act(state, eps)
        outcome = env.step(action)
        agent.update(state, action, outcome.reward, outcome.next_state, outcome.terminated)
        if outcome.terminated or outcome.truncated:
            state = env.reset()
        else:
            state = outcome.next_state
        if eval_interval and (t % eval_interval == 0 or t == total):
            timeline.append((t, agent.front(env.start_state)))
    return agent, timeline

"""Independent oracles and hand-built MDPs used across the test suite.

Everything here deliberately avoids the library's algorithms: dominance by
quadratic pairwise scan, hypervolume by Monte-Carlo box sampling, fronts by
exhaustive path enumeration, and plain scalar Q-learning as the
single-objective reference.
"""

from __future__ import annotations

import random

from morlbench.envs.base import EnvSpec, StepOutcome


def brute_force_nondominated(points):
    """O(n^2) pairwise filter: keep p unless some q beats it everywhere
    and strictly somewhere."""
    pts = sorted(set(tuple(p) for p in points))

    def dom(q, p):
        return all(x >= y for x, y in zip(q, p)) and q != p

    return [p for p in pts if not any(dom(q, p) for q in pts)]


def monte_carlo_hypervolume(points, ref, samples, rng):
    """Box-sampling estimate of the dominated volume and its standard error."""
    pts = [tuple(p) for p in points]
    upper = tuple(max(p[i] for p in pts) for i in range(len(ref)))
    box = 1.0
    for u, r in zip(upper, ref):
        box *= max(u - r, 0.0)
    if box == 0.0:
        return 0.0, 0.0
    hits = 0
    for _ in range(samples):
        x = tuple(r + rng.random() * (u - r) for u, r in zip(upper, ref))
        if any(all(px >= xi for px, xi in zip(p, x)) for p in pts):
            hits += 1
    p_hat = hits / samples
    stderr = box * (p_hat * (1.0 - p_hat) / samples) ** 0.5
    return box * p_hat, stderr


class TabularMdp:
    """Deterministic episodic MDP from an explicit transition table.

    ``transitions[(state, action)] = (next_state or None, reward, terminated)``
    with ``None`` marking the terminal sink. Implements the same duck-typed
    environment contract the gridworlds use.
    """

    def __init__(self, transitions, start, num_objectives, action_count,
                 name="mdp", max_episode_steps=1000):
        self.transitions = transitions
        self.start = start
        self.num_objectives = num_objectives
        self.action_count = action_count
        self.name = name
        self.max_episode_steps = max_episode_steps
        states = {start}
        for (s, _), (s2, _, _) in transitions.items():
            states.add(s)
            if s2 is not None:
                states.add(s2)
        self.state_count = max(states) + 1
        self.start_state = start
        self._state = start
        self._steps = 0

    @property
    def spec(self):
        return EnvSpec(self.name, self.num_objectives, self.action_count,
                       self.state_count, self.max_episode_steps)

    def fork(self):
        return TabularMdp(self.transitions, self.start, self.num_objectives,
                          self.action_count, self.name, self.max_episode_steps)

    def reset(self):
        self._state = self.start
        self._steps = 0
        return self.start

    def step(self, action):
        next_state, reward, terminated = self.transitions[(self._state, action)]
        self._steps += 1
        if not terminated:
            self._state = next_state
        truncated = not terminated and self._steps >= self.max_episode_steps
        return StepOutcome(self._state if terminated else next_state,
                           tuple(reward), terminated, truncated)


def enumerate_returns(mdp: TabularMdp, gamma, state=None):
    """All achievable discounted episode returns by exhaustive DFS.

    Composes returns recursively as ``r + gamma * suffix`` so the floats
    match any learner that builds returns the same way. Only safe on
    acyclic transition tables.
    """
    state = mdp.start if state is None else state
    out = []
    for action in range(mdp.action_count):
        key = (state, action)
        if key not in mdp.transitions:
            continue
        next_state, reward, terminated = mdp.transitions[key]
        if terminated:
            out.append(tuple(float(r) for r in reward))
        else:
            for suffix in enumerate_returns(mdp, gamma, next_state):
                out.append(tuple(r + gamma * v for r, v in zip(reward, suffix)))
    return out


def fork_mdp():
    """Single decision, four terminal arms; one arm dominated."""
    table = {
        (0, 0): (None, (3.0, 0.0), True),
        (0, 1): (None, (0.0, 3.0), True),
        (0, 2): (None, (2.0, 2.0), True),
        (0, 3): (None, (1.0, 1.0), True),
    }
    return TabularMdp(table, start=0, num_objectives=2, action_count=4, name="fork")


def diamond_mdp():
    """Two-step diamond: both first moves reach the same middle state."""
    table = {
        (0, 0): (1, (1.0, 0.0), False),
        (0, 1): (1, (0.0, 1.0), False),
        (1, 0): (None, (2.0, 0.0), True),
        (1, 1): (None, (0.0, 2.0), True),
    }
    return TabularMdp(table, start=0, num_objectives=2, action_count=2, name="diamond")


def lattice_mdp():
    """Three objectives, three layers, shared interior states, some
    dominated leaves."""
    table = {
        (0, 0): (1, (1.0, 0.0, 0.0), False),
        (0, 1): (2, (0.0, 1.0, 0.0), False),
        (1, 0): (3, (0.0, 0.0, 1.0), False),
        (1, 1): (None, (0.0, 2.0, 0.0), True),
        (2, 0): (3, (1.0, 0.0, 0.0), False),
        (2, 1): (None, (0.0, 0.0, 0.5), True),
        (3, 0): (None, (1.0, 0.0, 0.0), True),
        (3, 1): (None, (0.0, 1.0, 1.0), True),
    }
    return TabularMdp(table, start=0, num_objectives=3, action_count=2, name="lattice")


def scalar_q_learning(env, alpha, gamma, total_timesteps, schedule, seed):
    """Plain single-objective Q-learning, mirroring the agent's decision
    structure (one epsilon draw per step, tie draws only on exact ties) so
    tables can be compared bit for bit when the reward has one objective.
    """
    import numpy as np

    states = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    rng = random.Random(int(states[0]))
    q = {}

    def row(state):
        r = q.get(state)
        if r is None:
            r = [0.0] * env.action_count
            q[state] = r
        return r

    def eps_at(t):
        if t == 0:
            return schedule.eps_initial
        span = schedule.decay_fraction * total_timesteps
        if t >= span:
            return schedule.eps_final
        return schedule.eps_initial + (schedule.eps_final - schedule.eps_initial) * t / span

    state = env.reset()
    for t in range(1, total_timesteps + 1):
        eps = eps_at(t - 1)
        values = row(state)
        if eps > 0.0 and rng.random() < eps:
            action = rng.randrange(env.action_count)
        else:
            best = max(values)
            ties = [i for i, v in enumerate(values) if v == best]
            action = ties[0] if len(ties) == 1 else ties[rng.randrange(len(ties))]
        outcome = env.step(action)
        reward = outcome.reward[0]
        if outcome.terminated:
            target = reward
        else:
            target = reward + gamma * max(row(outcome.next_state))
        values[action] += alpha * (target - values[action])
        state = env.reset() if outcome.terminated or outcome.truncated else outcome.next_state
    return q

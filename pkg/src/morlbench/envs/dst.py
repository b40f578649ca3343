"""Deep Sea Treasure (concave variant): a deterministic 2-objective gridworld.

A submarine starts at the surface and dives for treasure. Objective 0 is
the treasure value collected (episode ends on any treasure cell), objective
1 is a -1 penalty per step. Deeper treasures are worth more, so the two
objectives conflict and every treasure's shortest path is a Pareto-optimal
trade-off.

State ids are dense integers ``row * cols + col``. Actions: 0 up, 1 down,
2 left, 3 right; blocked moves (seabed or map edge) leave the position
unchanged and still cost a step.
"""

from __future__ import annotations

from collections import deque

from ..pareto import ParetoArchive
from .base import EnvSpec, StepOutcome
from .grid import MOVES, GridMap, load_bundled_map

STEP_PENALTY = -1.0


class DeepSeaTreasure:
    name = "dst-concave"
    num_objectives = 2
    action_count = 4

    def __init__(self, grid: GridMap | None = None, max_episode_steps: int = 1000):
        self.grid = grid if grid is not None else load_bundled_map("dst_concave")
        self.max_episode_steps = max_episode_steps
        self.state_count = self.grid.rows * self.grid.cols
        self._treasures = {
            (r, c): self.grid.legend[sym] for r, c, sym in self.grid.symbol_cells
        }
        if not self._treasures:
            raise ValueError("DST map has no treasure cells")
        self._check_depth_monotonicity()
        self.start_state = self._encode(*self.grid.start)
        self._pos = self.grid.start
        self._steps = 0

    def _encode(self, r: int, c: int) -> int:
        return r * self.grid.cols + c

    def _check_depth_monotonicity(self) -> None:
        # Treasure values must strictly increase with distance from start.
        by_distance = sorted(
            (t, self._treasures[cell]) for cell, t in self._min_steps().items()
        )
        values = [v for _, v in by_distance]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("treasure values must strictly increase with distance")

    def _min_steps(self) -> dict[tuple[int, int], int]:
        # BFS over water cells; treasure cells are absorbing, so shortest
        # paths never pass through another treasure.
        grid = self.grid
        dist = {grid.start: 0}
        reached: dict[tuple[int, int], int] = {}
        queue = deque([grid.start])
        while queue:
            r, c = queue.popleft()
            for dr, dc in MOVES:
                nr, nc = r + dr, c + dc
                if not grid.in_bounds(nr, nc) or grid.is_wall(nr, nc):
                    continue
                if (nr, nc) in dist:
                    continue
                dist[(nr, nc)] = dist[(r, c)] + 1
                if (nr, nc) in self._treasures:
                    reached[(nr, nc)] = dist[(nr, nc)]
                else:
                    queue.append((nr, nc))
        missing = set(self._treasures) - set(reached)
        if missing:
            raise ValueError(f"unreachable treasure cells: {sorted(missing)}")
        return reached

    @property
    def spec(self) -> EnvSpec:
        return EnvSpec(
            self.name, self.num_objectives, self.action_count,
            self.state_count, self.max_episode_steps,
        )

    def fork(self) -> "DeepSeaTreasure":
        return DeepSeaTreasure(self.grid, self.max_episode_steps)

    def reset(self) -> int:
        self._pos = self.grid.start
        self._steps = 0
        return self.start_state

    def step(self, action: int) -> StepOutcome:
        if not 0 <= action < self.action_count:
            raise ValueError(f"invalid action {action!r}")
        dr, dc = MOVES[action]
        r, c = self._pos
        nr, nc = r + dr, c + dc
        if self.grid.in_bounds(nr, nc) and not self.grid.is_wall(nr, nc):
            self._pos = (nr, nc)
        self._steps += 1
        treasure = self._treasures.get(self._pos, 0.0)
        terminated = treasure > 0.0
        truncated = not terminated and self._steps >= self.max_episode_steps
        return StepOutcome(
            self._encode(*self._pos), (treasure, STEP_PENALTY), terminated, truncated
        )

    def true_front(self, gamma: float) -> ParetoArchive:
        """Discounted return of each treasure's shortest path.

        One point per treasure: reaching value ``v`` in ``t`` steps yields
        ``(v * gamma^(t-1), -sum_{k<t} gamma^k)``. The archive keeps all
        points verbatim (the published reference front convention), so at
        discounts < 1 it may contain a point that is dominated after
        discounting even though every treasure is optimal undiscounted.
        """
        if not 0.0 < gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {gamma}")
        points = []
        for cell, t in self._min_steps().items():
            value = self._treasures[cell]
            discount = 1.0
            treasure_part = 0.0
            penalty_part = 0.0
            for k in range(t):
                penalty_part += discount * STEP_PENALTY
                if k == t - 1:
                    treasure_part += discount * value
                discount *= gamma
            points.append((treasure_part, penalty_part))
        return ParetoArchive(points)

"""Grid map file parsing shared by the gridworld environments.

Format: a header line ``rows cols``, then one grid row per line using
``.`` free cell, ``#`` wall/seabed, ``S`` start, ``G`` goal, and
digit/letter symbols whose meaning (treasure value or item shape) is given
in a trailing ``[legend]`` section of ``symbol = value`` lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

RESERVED = {".", "#", "S", "G"}

# Action ids shared by all gridworlds: up, down, left, right.
MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class GridMap:
    rows: int
    cols: int
    grid: tuple[str, ...]
    legend: dict[str, float]
    start: tuple[int, int]
    goal: tuple[int, int] | None
    symbol_cells: tuple[tuple[int, int, str], ...]

    def is_wall(self, r: int, c: int) -> bool:
        return self.grid[r][c] == "#"

    def in_bounds(self, r: int, c: int) -> bool:
        return 0 <= r < self.rows and 0 <= c < self.cols


def parse_map(text: str) -> GridMap:
    lines = text.splitlines()
    body = [ln for ln in lines if ln.strip() and not ln.strip().startswith("//")]
    if not body:
        raise ValueError("empty map file")
    header = body[0].split()
    if len(header) != 2:
        raise ValueError(f"map header must be 'rows cols', got {body[0]!r}")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"map header must be 'rows cols', got {body[0]!r}") from None
    if rows <= 0 or cols <= 0 or len(body) < 1 + rows:
        raise ValueError("map body shorter than declared size")

    grid = tuple(body[1 : 1 + rows])
    for i, row in enumerate(grid):
        if len(row) != cols:
            raise ValueError(f"grid row {i} has length {len(row)}, expected {cols}")

    legend: dict[str, float] = {}
    rest = body[1 + rows :]
    if rest:
        if rest[0].strip() != "[legend]":
            raise ValueError(f"expected '[legend]' section, got {rest[0]!r}")
        for ln in rest[1:]:
            if "=" not in ln:
                raise ValueError(f"bad legend line {ln!r}")
            sym, _, value = ln.partition("=")
            sym = sym.strip()
            if len(sym) != 1 or sym in RESERVED:
                raise ValueError(f"bad legend symbol {sym!r}")
            legend[sym] = float(value.strip())

    start = goal = None
    symbol_cells = []
    for r, row in enumerate(grid):
        for c, ch in enumerate(row):
            if ch == "S":
                if start is not None:
                    raise ValueError("multiple start cells")
                start = (r, c)
            elif ch == "G":
                if goal is not None:
                    raise ValueError("multiple goal cells")
                goal = (r, c)
            elif ch not in RESERVED:
                if ch not in legend:
                    raise ValueError(f"symbol {ch!r} at ({r},{c}) missing from legend")
                symbol_cells.append((r, c, ch))
    if start is None:
        raise ValueError("map has no start cell 'S'")

    return GridMap(rows, cols, grid, legend, start, goal, tuple(symbol_cells))


def load_bundled_map(name: str) -> GridMap:
    text = resources.files("morlbench.envs").joinpath(f"data/{name}.map").read_text("utf-8")
    return parse_map(text)

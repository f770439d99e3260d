"""Deterministic 4-action gridworlds loaded from ASCII maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..graph import StateGraph, build_graph

# (dx, dy) for left, right, up, down; y grows downward (row index)
ACTIONS = ((-1, 0), (1, 0), (0, -1), (0, 1))
ACTION_NAMES = ("left", "right", "up", "down")
SHIPPED_GRID_MAPS = ("gridroom", "gridmaze")


class MapError(ValueError):
    pass


@dataclass
class TransitionDataset:
    """Sampled ``(s, s')`` pairs plus a state pool estimating the marginal ``rho``.

    States are integer indices for grid environments and ``(x, y)`` rows for
    point environments.
    """

    states: np.ndarray
    next_states: np.ndarray
    state_pool: np.ndarray
    episode_len: int
    discount: float

    def __len__(self) -> int:
        return len(self.states)

    def visitation(self, n_states: int) -> np.ndarray:
        counts = np.bincount(self.state_pool, minlength=n_states).astype(float)
        return counts / counts.sum()


@dataclass(frozen=True, eq=False)
class GridEnv:
    walls: np.ndarray  # (height, width) bool
    goal_cells: tuple = ()
    name: str = "grid"
    free_cells: np.ndarray = field(init=False, repr=False)  # (n, 2) as (x, y), row-major
    _index: np.ndarray = field(init=False, repr=False)
    _next: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        walls = np.asarray(self.walls, dtype=bool)
        object.__setattr__(self, "walls", walls)
        ys, xs = np.nonzero(~walls)
        cells = np.stack([xs, ys], axis=1)
        index = -np.ones(walls.shape, dtype=np.int64)
        index[ys, xs] = np.arange(len(cells))
        nxt = np.empty((len(cells), len(ACTIONS)), dtype=np.int64)
        h, w = walls.shape
        for a, (dx, dy) in enumerate(ACTIONS):
            tx, ty = xs + dx, ys + dy
            inside = (tx >= 0) & (tx < w) & (ty >= 0) & (ty < h)
            target = np.full(len(cells), -1, dtype=np.int64)
            target[inside] = index[ty[inside], tx[inside]]
            nxt[:, a] = np.where(target >= 0, target, np.arange(len(cells)))
        object.__setattr__(self, "free_cells", cells)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_next", nxt)

    @property
    def height(self) -> int:
        return self.walls.shape[0]

    @property
    def width(self) -> int:
        return self.walls.shape[1]

    @property
    def n_states(self) -> int:
        return len(self.free_cells)

    @property
    def n_actions(self) -> int:
        return len(ACTIONS)

    @property
    def transition_table(self) -> np.ndarray:
        """``(n_states, 4)`` array of successor indices."""
        return self._next

    def state_index(self, x: int, y: int) -> int:
        if not (0 <= x < self.width and 0 <= y < self.height) or self._index[y, x] < 0:
            raise MapError(f"cell ({x}, {y}) is not a free cell")
        return int(self._index[y, x])

    def cell(self, s: int) -> tuple[int, int]:
        x, y = self.free_cells[s]
        return int(x), int(y)

    def goal_states(self) -> list[int]:
        return [self.state_index(x, y) for x, y in self.goal_cells]

    def step(self, s, a):
        """Successor state(s); the agent stays put when it bumps into a wall."""
        return self._next[s, a]

    def observe(self, s) -> np.ndarray:
        """``(x, y)`` scaled to ``[-1, 1]``; vectorized over index arrays."""
        xy = self.free_cells[np.asarray(s)].astype(float)
        scale = np.array([self.width - 1, self.height - 1], dtype=float)
        return 2.0 * xy / scale - 1.0

    def transitions(self) -> list[tuple[int, int]]:
        return [(s, int(self._next[s, a])) for s in range(self.n_states) for a in range(len(ACTIONS))]

    def graph(self) -> StateGraph:
        """Graph from exhaustive ``(s, a)`` enumeration."""
        labels = [tuple(c) for c in self.free_cells.tolist()]
        return build_graph(self.transitions(), n_states=self.n_states, state_labels=labels)

    def collect(
        self,
        n_transitions: int,
        episode_len: int = 50,
        discount: float = 0.0,
        seed: int | np.random.Generator | None = None,
    ) -> TransitionDataset:
        """Uniform-random-policy rollouts with uniform random starts.

        For each time step ``t`` of an episode the pair ``(s_t, s_{t+k})`` is
        recorded with ``k ~ Geometric(1 - discount)`` truncated at the end of
        the episode; ``discount=0`` gives one-step transitions.
        """
        if n_transitions <= 0:
            raise ValueError("n_transitions must be positive")
        if not 0.0 <= discount < 1.0:
            raise ValueError("discount must lie in [0, 1)")
        rng = np.random.default_rng(seed)
        n_episodes = -(-n_transitions // episode_len)
        traj = np.empty((n_episodes, episode_len + 1), dtype=np.int64)
        traj[:, 0] = rng.integers(0, self.n_states, size=n_episodes)
        actions = rng.integers(0, len(ACTIONS), size=(n_episodes, episode_len))
        for t in range(episode_len):
            traj[:, t + 1] = self._next[traj[:, t], actions[:, t]]
        return _discounted_pairs(traj, n_transitions, discount, rng)


def _discounted_pairs(traj: np.ndarray, n_transitions: int, discount: float, rng: np.random.Generator) -> TransitionDataset:
    n_episodes, T1 = traj.shape[:2]
    episode_len = T1 - 1
    t = np.broadcast_to(np.arange(episode_len), (n_episodes, episode_len))
    if discount > 0.0:
        k = rng.geometric(1.0 - discount, size=(n_episodes, episode_len))
    else:
        k = np.ones((n_episodes, episode_len), dtype=np.int64)
    k = np.minimum(k, episode_len - t)
    rows = np.arange(n_episodes)[:, None]
    s = traj[rows, t].reshape(n_episodes * episode_len, *traj.shape[2:])[:n_transitions]
    s_next = traj[rows, t + k].reshape(n_episodes * episode_len, *traj.shape[2:])[:n_transitions]
    pool = traj.reshape(n_episodes * T1, *traj.shape[2:])
    return TransitionDataset(
        states=s, next_states=s_next, state_pool=pool, episode_len=episode_len, discount=discount
    )


def load_map(text: str, name: str = "grid") -> GridEnv:
    """Parse an ASCII map: ``#`` wall, ``.`` free, ``G`` free goal cell."""
    rows = [line.rstrip("\r") for line in text.strip("\n").splitlines()]
    rows = [r for r in rows if r.strip()]
    if not rows:
        raise MapError("empty map")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise MapError("ragged rows in map")
    walls = np.zeros((len(rows), width), dtype=bool)
    goals = []
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch == "#":
                walls[y, x] = True
            elif ch == "G":
                goals.append((x, y))
            elif ch != ".":
                raise MapError(f"unknown character {ch!r} at ({x}, {y})")
    if walls.all():
        raise MapError("zero free cells")
    return GridEnv(walls=walls, goal_cells=tuple(goals), name=name)


def map_text(name: str) -> str:
    return resources.files("laprep.envs").joinpath("maps", f"{name}.txt").read_text()


def load_map_file(path: str | Path) -> GridEnv:
    path = Path(path)
    return load_map(path.read_text(), name=path.stem)


def make_grid_env(name: str) -> GridEnv:
    if name not in SHIPPED_GRID_MAPS:
        raise MapError(f"unknown grid environment {name!r}; choose from {SHIPPED_GRID_MAPS}")
    return load_map(map_text(name), name=name)


def room_labels(env: GridEnv) -> np.ndarray:
    """Room index (1-based) per state, 0 for doorway cells.

    Rooms are the blocks between the interior wall lines of a rooms map
    (rows/columns that are mostly wall). Indices follow a boustrophedon
    order over the block grid so neighboring rooms get consecutive indices.
    """
    h, w = env.walls.shape
    inner = env.walls[1:-1, 1:-1]
    wall_cols = [x + 1 for x in range(inner.shape[1]) if inner[:, x].mean() > 0.5]
    wall_rows = [y + 1 for y in range(inner.shape[0]) if inner[y, :].mean() > 0.5]
    xb = np.searchsorted(np.array(wall_cols), np.arange(w), side="right")
    yb = np.searchsorted(np.array(wall_rows), np.arange(h), side="right")
    nbx = len(wall_cols) + 1
    labels = np.zeros(env.n_states, dtype=np.int64)
    for s, (x, y) in enumerate(env.free_cells.tolist()):
        if x in wall_cols or y in wall_rows:
            continue
        bx, by = int(xb[x]), int(yb[y])
        col = bx if by % 2 == 0 else nbx - 1 - bx
        labels[s] = by * nbx + col + 1
    return labels

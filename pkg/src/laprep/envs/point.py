"""Continuous 2D navigation for a disk-shaped agent, plus finite-difference
ground-truth eigenfunctions on a discretization of its free space."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..eigen import eig_sym
from ..graph import build_graph, laplacian
from .grid import MapError, TransitionDataset, _discounted_pairs, map_text

SHIPPED_POINT_MAPS = ("pointroom", "pointmaze")


@dataclass(frozen=True, eq=False)
class PointEnv:
    """Disk of radius ``agent_radius`` moving among unit wall cells.

    World coordinates: ``x`` along columns, ``y`` along rows, one unit per
    map cell; the arena is ``[0, width] x [0, height]``.
    """

    walls: np.ndarray
    agent_radius: float = 0.5
    step_size: float = 0.2
    name: str = "point"

    def __post_init__(self):
        object.__setattr__(self, "walls", np.asarray(self.walls, dtype=bool))

    @property
    def width(self) -> int:
        return self.walls.shape[1]

    @property
    def height(self) -> int:
        return self.walls.shape[0]

    def collides(self, pos) -> np.ndarray | bool:
        """True where the disk centred at ``pos`` overlaps a wall or leaves the arena."""
        p = np.atleast_2d(np.asarray(pos, dtype=float))
        r = self.agent_radius
        out = (p[:, 0] < r) | (p[:, 0] > self.width - r) | (p[:, 1] < r) | (p[:, 1] > self.height - r)
        # nearby wall cells only: those whose box lies within one radius
        hit = np.zeros(len(p), dtype=bool)
        cx = np.floor(p[:, 0]).astype(int)
        cy = np.floor(p[:, 1]).astype(int)
        reach = int(np.ceil(r))
        for dy in range(-reach, reach + 1):
            for dx in range(-reach, reach + 1):
                bx, by = cx + dx, cy + dy
                inside = (bx >= 0) & (bx < self.width) & (by >= 0) & (by < self.height)
                is_wall = np.zeros(len(p), dtype=bool)
                is_wall[inside] = self.walls[by[inside], bx[inside]]
                nx = np.clip(p[:, 0], bx, bx + 1)
                ny = np.clip(p[:, 1], by, by + 1)
                dist2 = (p[:, 0] - nx) ** 2 + (p[:, 1] - ny) ** 2
                hit |= is_wall & (dist2 < r * r)
        res = out | hit
        return bool(res[0]) if np.ndim(pos) == 1 else res

    def step(self, pos, theta):
        """Move ``step_size`` along ``theta``; stay put if the target collides."""
        pos = np.asarray(pos, dtype=float)
        theta = np.asarray(theta, dtype=float)
        target = pos + self.step_size * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        blocked = self.collides(target)
        if pos.ndim == 1:
            return pos.copy() if blocked else target
        return np.where(np.asarray(blocked)[:, None], pos, target)

    def sample_free(self, n: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
        rng = np.random.default_rng(seed)
        out = np.empty((0, 2))
        while len(out) < n:
            cand = rng.uniform([0, 0], [self.width, self.height], size=(2 * (n - len(out)) + 16, 2))
            out = np.concatenate([out, cand[~self.collides(cand)]])
        return out[:n]

    def observe(self, pos) -> np.ndarray:
        pos = np.asarray(pos, dtype=float)
        return 2.0 * pos / np.array([self.width, self.height], dtype=float) - 1.0

    def collect(
        self,
        n_transitions: int,
        episode_len: int = 500,
        discount: float = 0.0,
        seed: int | np.random.Generator | None = None,
    ) -> TransitionDataset:
        if n_transitions <= 0:
            raise ValueError("n_transitions must be positive")
        rng = np.random.default_rng(seed)
        n_episodes = -(-n_transitions // episode_len)
        traj = np.empty((n_episodes, episode_len + 1, 2))
        traj[:, 0] = self.sample_free(n_episodes, rng)
        thetas = rng.uniform(0.0, 2.0 * np.pi, size=(n_episodes, episode_len))
        for t in range(episode_len):
            traj[:, t + 1] = self.step(traj[:, t], thetas[:, t])
        return _discounted_pairs(traj, n_transitions, discount, rng)


def load_point_map(text: str, name: str = "point", **kwargs) -> PointEnv:
    rows = [r for r in text.strip("\n").splitlines() if r.strip()]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise MapError("ragged or empty map")
    if set("".join(rows)) - set("#.G"):
        raise MapError("unknown character in map")
    walls = np.array([[c == "#" for c in r] for r in rows])
    return PointEnv(walls=walls, name=name, **kwargs)


def make_point_env(name: str, **kwargs) -> PointEnv:
    if name not in SHIPPED_POINT_MAPS:
        raise MapError(f"unknown point environment {name!r}; choose from {SHIPPED_POINT_MAPS}")
    return load_point_map(map_text(name), name=name, **kwargs)


@dataclass(frozen=True)
class EigenfunctionGrid:
    """Eigenvectors of the 5-point-stencil Laplacian over free cells of size ``h``.

    ``cells`` holds integer ``(i, j)`` cell coordinates (column, row);
    ``eigenvalues`` are those of the graph Laplacian (divide by ``h**2`` for
    the continuum scaling).
    """

    h: float
    shape: tuple[int, int]  # (n_rows, n_cols)
    cells: np.ndarray
    values: np.ndarray
    eigenvalues: np.ndarray
    _lookup: np.ndarray = field(repr=False, compare=False)

    def centers(self) -> np.ndarray:
        return (self.cells + 0.5) * self.h


def _check_divides(length: float, h: float) -> int:
    k = length / h
    if abs(k - round(k)) > 1e-9:
        raise ValueError(f"cell size {h} does not divide arena length {length}")
    return int(round(k))


def ground_truth_eigenfunctions(env: PointEnv, h: float = 0.5, d: int = 10, method: str = "auto") -> EigenfunctionGrid:
    """Smallest ``d`` eigenpairs of the grid Laplacian over collision-free cells.

    A cell is free when its centre is a collision-free agent position; free
    cells are joined to their 4 axis neighbours.
    """
    nx = _check_divides(env.width, h)
    ny = _check_divides(env.height, h)
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny))
    cells = np.stack([ii.ravel(), jj.ravel()], axis=1)
    free = ~env.collides((cells + 0.5) * h)
    cells = cells[free]
    lookup = -np.ones((ny, nx), dtype=np.int64)
    lookup[cells[:, 1], cells[:, 0]] = np.arange(len(cells))

    pairs = []
    for k, (i, j) in enumerate(cells.tolist()):
        if i + 1 < nx and lookup[j, i + 1] >= 0:
            pairs.append((k, int(lookup[j, i + 1])))
        if j + 1 < ny and lookup[j + 1, i] >= 0:
            pairs.append((k, int(lookup[j + 1, i])))
    g = build_graph(pairs, n_states=len(cells))
    if not g.is_connected():
        raise ValueError("disconnected discretization")
    pairs_ = eig_sym(laplacian(g), d, method=method)
    return EigenfunctionGrid(
        h=h, shape=(ny, nx), cells=cells, values=pairs_.eigenvectors,
        eigenvalues=pairs_.eigenvalues, _lookup=lookup,
    )


def query_gt(grid: EigenfunctionGrid, pos, env: PointEnv | None = None) -> np.ndarray:
    """Value of the cell containing ``pos`` (nearest free cell near boundaries).

    Vectorized over ``(m, 2)`` inputs. When ``env`` is given, positions in
    collision raise ``ValueError``.
    """
    p = np.atleast_2d(np.asarray(pos, dtype=float))
    if env is not None and np.any(env.collides(p)):
        raise ValueError("position lies in a wall")
    ny, nx = grid.shape
    i = np.clip(np.floor(p[:, 0] / grid.h).astype(int), 0, nx - 1)
    j = np.clip(np.floor(p[:, 1] / grid.h).astype(int), 0, ny - 1)
    idx = grid._lookup[j, i]
    missing = idx < 0
    if missing.any():
        centers = grid.centers()
        d2 = ((p[missing, None, :] - centers[None, :, :]) ** 2).sum(-1)
        idx[missing] = np.argmin(d2, axis=1)
    out = grid.values[idx]
    return out[0] if np.ndim(pos) == 1 else out


def write_eigenfunction_csv(grid: EigenfunctionGrid, path: str | Path) -> None:
    d = grid.values.shape[1]
    lines = ["cell_x,cell_y," + ",".join(f"f{k + 1}" for k in range(d))]
    for (i, j), row in zip(grid.cells.tolist(), grid.values):
        lines.append(f"{i},{j}," + ",".join("%.17g" % v for v in row))
    Path(path).write_text("\n".join(lines) + "\n")

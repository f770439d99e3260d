"""State-transition graphs and their combinatorial Laplacian."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class StateGraph:
    """Undirected, unweighted graph over ``n_states`` indexed states.

    ``edges`` holds each unordered pair once as ``(i, j)`` with ``i < j``,
    sorted lexicographically. Self-transitions never appear.
    """

    n_states: int
    edges: np.ndarray
    state_labels: tuple | None = field(default=None, compare=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n_states, self.n_states))
        i, j = self.edges[:, 0], self.edges[:, 1]
        A[i, j] = 1.0
        A[j, i] = 1.0
        return A

    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n_states)
        np.add.at(deg, self.edges[:, 0], 1.0)
        np.add.at(deg, self.edges[:, 1], 1.0)
        return deg

    def neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.n_states)]
        for i, j in self.edges.tolist():
            nbrs[i].append(j)
            nbrs[j].append(i)
        return nbrs

    def is_connected(self) -> bool:
        if self.n_states == 0:
            return False
        nbrs = self.neighbors()
        seen = np.zeros(self.n_states, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return bool(seen.all())


def build_graph(
    transitions: Iterable[Sequence[int]],
    n_states: int | None = None,
    state_labels: Sequence | None = None,
) -> StateGraph:
    """Build a graph from ``(s, s')`` index pairs.

    Pairs are symmetrized and deduplicated; self-transitions are dropped.
    ``n_states`` defaults to one more than the largest index seen.
    """
    pairs = np.asarray(list(transitions) if not isinstance(transitions, np.ndarray) else transitions)
    if pairs.size == 0:
        raise GraphError("empty graph")
    pairs = pairs.reshape(-1, 2).astype(np.int64)
    if (pairs < 0).any():
        raise GraphError("state indices must be non-negative")
    if n_states is None:
        n_states = int(pairs.max()) + 1
    elif pairs.max() >= n_states:
        raise GraphError(f"state index {int(pairs.max())} out of range for n_states={n_states}")

    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    if len(pairs) == 0:
        raise GraphError("empty graph")
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    edges = np.unique(np.stack([lo, hi], axis=1), axis=0)
    labels = tuple(state_labels) if state_labels is not None else None
    if labels is not None and len(labels) != n_states:
        raise GraphError("state_labels length does not match n_states")
    return StateGraph(n_states=int(n_states), edges=edges, state_labels=labels)


def laplacian(g: StateGraph) -> np.ndarray:
    """Dense ``L = D - A``."""
    A = g.adjacency()
    return np.diag(A.sum(axis=1)) - A


def quadratic_form(L: np.ndarray, u: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.shape[0] != L.shape[0]:
        raise GraphError(f"vector of length {u.shape} does not match Laplacian of size {L.shape[0]}")
    return float(u @ L @ u)


def edge_quadratic_form(g: StateGraph, u: np.ndarray) -> float:
    """``sum over edges (u[s] - u[s'])^2``; equals ``u^T L u``."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.shape[0] != g.n_states:
        raise GraphError(f"vector of length {u.shape} does not match graph with {g.n_states} states")
    diff = u[g.edges[:, 0]] - u[g.edges[:, 1]]
    return float(diff @ diff)


def path_graph(n: int) -> StateGraph:
    return build_graph([(i, i + 1) for i in range(n - 1)], n_states=n)


def cycle_graph(n: int) -> StateGraph:
    return build_graph([(i, (i + 1) % n) for i in range(n)], n_states=n)


def write_edge_list(g: StateGraph, path: str | Path) -> None:
    lines = [f"n_states={g.n_states}"]
    lines += [f"{i} {j}" for i, j in g.edges.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path: str | Path) -> StateGraph:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("n_states="):
        raise GraphError(f"{path}: missing 'n_states=<n>' header")
    n = int(text[0].split("=", 1)[1])
    pairs = [tuple(int(t) for t in line.split()) for line in text[1:] if line.strip()]
    return build_graph(pairs, n_states=n)

"""Similarity metrics between representation tables, span checks and heatmaps."""

from __future__ import annotations

import warnings
from itertools import combinations
from pathlib import Path

import numpy as np

from ._validation import check_table_pair


def abs_cosines(F, G) -> np.ndarray:
    """Per-dimension ``|cos|`` between matching columns of ``F`` and ``G``.

    Columns with zero norm contribute 0 and trigger a warning.
    """
    F, G = check_table_pair(F, G)
    nf = np.linalg.norm(F, axis=0)
    ng = np.linalg.norm(G, axis=0)
    dead = (nf == 0) | (ng == 0)
    if dead.any():
        warnings.warn(f"zero-norm column(s) {np.flatnonzero(dead).tolist()} contribute 0 similarity")
    denom = np.where(dead, 1.0, nf * ng)
    cos = np.abs(np.sum(F * G, axis=0)) / denom
    cos[dead] = 0.0
    return np.minimum(cos, 1.0)


def sim_gt(F, GT) -> tuple[float, np.ndarray]:
    """Mean absolute dimension-wise cosine similarity to the ground truth."""
    per_dim = abs_cosines(F, GT)
    return float(per_dim.mean()), per_dim


def sim_run(F_l, F_m) -> float:
    """Mean absolute dimension-wise cosine similarity between two runs."""
    return float(abs_cosines(F_l, F_m).mean())


def sim_run_matrix(tables) -> np.ndarray:
    k = len(tables)
    out = np.eye(k)
    for i, j in combinations(range(k), 2):
        out[i, j] = out[j, i] = sim_run(tables[i], tables[j])
    return out


def span_projection_error(F, basis) -> np.ndarray:
    """Per-dimension cosine distance ``1 - |cos(u_i, P u_i)|`` to the span of ``basis``.

    ``basis`` must have orthonormal columns (e.g. the first ``d`` eigenvectors).
    """
    F = np.asarray(F, dtype=float)
    E = np.asarray(basis, dtype=float)
    proj = E @ (E.T @ F)
    return 1.0 - abs_cosines(F, proj)


def span_projection_trace(estimator, X_eval, basis) -> tuple[np.ndarray, np.ndarray]:
    """``span_projection_error`` at each stored checkpoint of a fitted estimator."""
    iters = np.array([it for it, _ in estimator.checkpoints_])
    errs = np.array([
        span_projection_error(estimator.transform_at(k, X_eval), basis)
        for k in range(len(estimator.checkpoints_))
    ])
    return iters, errs


def grid_image(env, values) -> np.ndarray:
    """Scatter per-state values onto the map, NaN on walls."""
    img = np.full(env.walls.shape, np.nan)
    x, y = env.free_cells[:, 0], env.free_cells[:, 1]
    img[y, x] = values
    return img


def cell_image(grid, values) -> np.ndarray:
    """Scatter per-cell values of an ``EigenfunctionGrid`` discretization, NaN elsewhere."""
    img = np.full(grid.shape, np.nan)
    img[grid.cells[:, 1], grid.cells[:, 0]] = values
    return img


def _to_gray(img: np.ndarray) -> np.ndarray:
    free = ~np.isnan(img)
    out = np.zeros(img.shape, dtype=np.uint8)
    if not free.any():
        return out
    lo, hi = np.nanmin(img), np.nanmax(img)
    if hi - lo <= 1e-12 * max(1.0, abs(hi)):
        out[free] = 128
    else:
        out[free] = np.round(255.0 * (img[free] - lo) / (hi - lo)).astype(np.uint8)
    return out


def export_heatmap(img: np.ndarray, path_prefix: str | Path) -> tuple[Path, Path]:
    """Write ``<prefix>.csv`` (NaN for walls) and ``<prefix>.pgm`` (plain 8-bit PGM).

    Free cells are min-max normalized to 0..255, a constant image becomes
    mid-gray, walls are black.
    """
    prefix = Path(path_prefix)
    csv_path = prefix.with_suffix(".csv")
    pgm_path = prefix.with_suffix(".pgm")
    rows = [",".join("nan" if np.isnan(v) else "%.17g" % v for v in row) for row in img]
    csv_path.write_text("\n".join(rows) + "\n")
    gray = _to_gray(img)
    h, w = gray.shape
    body = "\n".join(" ".join(str(int(v)) for v in row) for row in gray)
    pgm_path.write_text(f"P2\n{w} {h}\n255\n{body}\n")
    return csv_path, pgm_path


def read_pgm(path: str | Path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h = int(tokens[1]), int(tokens[2])
    return np.array([int(t) for t in tokens[4 : 4 + w * h]], dtype=np.uint8).reshape(h, w)

import numpy as np
import pytest

from laprep.metrics import (
    abs_cosines,
    export_heatmap,
    grid_image,
    read_pgm,
    sim_gt,
    sim_run,
    sim_run_matrix,
    span_projection_error,
)
from laprep.eigen import eig_sym
from laprep.graph import laplacian


def test_sim_gt_identity_and_sign(maze_gt):
    assert sim_gt(maze_gt, maze_gt)[0] == pytest.approx(1.0)
    assert sim_gt(-maze_gt, maze_gt)[0] == pytest.approx(1.0)
    assert sim_gt(3.0 * maze_gt, maze_gt)[0] == pytest.approx(1.0)


def test_sim_run_permuted_dims(maze_gt):
    assert sim_run(maze_gt, maze_gt) == pytest.approx(1.0)
    perm = maze_gt[:, [0, 2, 1, 3, 4, 5, 6, 7, 8, 9]]
    assert sim_run(maze_gt, perm) < 0.9


def test_zero_column_warns(maze_gt):
    F = maze_gt.copy()
    F[:, 3] = 0.0
    with pytest.warns(UserWarning, match="zero-norm"):
        mean, per = sim_gt(F, maze_gt)
    assert per[3] == 0.0


def test_shape_mismatch(maze_gt):
    with pytest.raises(ValueError):
        abs_cosines(maze_gt[:, :3], maze_gt)


def test_sim_run_matrix_symmetric(maze_gt, rng):
    tables = [maze_gt + 0.01 * rng.normal(size=maze_gt.shape) for _ in range(3)]
    M = sim_run_matrix(tables)
    np.testing.assert_array_equal(M, M.T)
    np.testing.assert_array_equal(np.diag(M), 1.0)


def test_span_projection(gridmaze, rng):
    pairs = eig_sym(laplacian(gridmaze.graph()), 11)
    E, extra = pairs.eigenvectors[:, :10], pairs.eigenvectors[:, 10]
    inside = E @ rng.normal(size=(10, 10))
    assert span_projection_error(inside, E).max() < 1e-10
    F = inside.copy()
    F[:, 4] = extra
    err = span_projection_error(F, E)
    assert err[4] == pytest.approx(1.0)


def test_heatmaps(tmp_path, gridmaze, maze_gt):
    const = grid_image(gridmaze, maze_gt[:, 0])
    _, pgm = export_heatmap(const, tmp_path / "c")
    img = read_pgm(pgm)
    assert set(np.unique(img[~gridmaze.walls])) == {128}
    assert not img[gridmaze.walls].any()
    csv, pgm = export_heatmap(grid_image(gridmaze, maze_gt[:, 1]), tmp_path / "d2")
    img = read_pgm(pgm)
    assert img[~gridmaze.walls].min() == 0 and img[~gridmaze.walls].max() == 255
    assert csv.read_text().splitlines()[0].split(",")[0] == "nan"


def test_gridroom_dim2_is_two_lobed(gridroom, room_gt):
    # the Fiedler vector takes both signs and its level sets split the arena
    f = room_gt[:, 1]
    assert f.min() < 0 < f.max()
    pos = gridroom.free_cells[f > 0].mean(0)
    neg = gridroom.free_cells[f < 0].mean(0)
    assert np.linalg.norm(pos - neg) > 5

import numpy as np
import pytest

from laprep.envs import ground_truth_eigenfunctions, load_point_map, make_point_env, query_gt
from laprep.envs.point import write_eigenfunction_csv


@pytest.fixture(scope="module")
def pointroom():
    return make_point_env("pointroom")


def test_open_space_step():
    env = load_point_map("\n".join("." * 10 for _ in range(10)))
    p = env.step(np.array([5.0, 5.0]), 0.0)
    np.testing.assert_allclose(p, [5.0 + env.step_size, 5.0])


def test_blocked_step_stays():
    env = load_point_map("..#\n..#\n..#")
    # agent disk touches the wall column after a step to the right
    p0 = np.array([1.5 - 0.05, 1.5])
    np.testing.assert_array_equal(env.step(p0, 0.0), p0)


def test_collect_stays_free(pointroom):
    ds = pointroom.collect(2000, 100, discount=0.5, seed=0)
    assert not pointroom.collides(ds.states).any()
    assert not pointroom.collides(ds.next_states).any()


def test_sample_free_is_seeded(pointroom):
    np.testing.assert_array_equal(pointroom.sample_free(50, 7), pointroom.sample_free(50, 7))


def test_gt_first_function_constant(pointroom):
    grid = ground_truth_eigenfunctions(pointroom, h=0.5, d=1)
    assert abs(grid.eigenvalues[0]) < 1e-10
    assert np.ptp(grid.values[:, 0]) < 1e-10


def test_query_gt(pointroom):
    grid = ground_truth_eigenfunctions(pointroom, h=1.0, d=4)
    centers = grid.centers()
    np.testing.assert_array_equal(query_gt(grid, centers), grid.values)
    a = query_gt(grid, centers[3] + 0.2)
    b = query_gt(grid, centers[3] - 0.2)
    np.testing.assert_array_equal(a, b)


def test_query_gt_rejects_walls(pointroom):
    grid = ground_truth_eigenfunctions(pointroom, h=1.0, d=2)
    with pytest.raises(ValueError):
        query_gt(grid, np.array([0.1, 0.1]), env=pointroom)


def test_cell_size_must_divide(pointroom):
    with pytest.raises(ValueError):
        ground_truth_eigenfunctions(pointroom, h=0.3, d=2)


def test_disconnected_discretization():
    env = load_point_map("..#..\n..#..\n..#..")
    with pytest.raises(ValueError, match="disconnected"):
        ground_truth_eigenfunctions(env, h=0.5, d=2)


def test_eigenfunction_csv(tmp_path, pointroom):
    grid = ground_truth_eigenfunctions(pointroom, h=1.0, d=3)
    write_eigenfunction_csv(grid, tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "cell_x,cell_y,f1,f2,f3"
    assert len(lines) == len(grid.cells) + 1


from hypothesis import given, settings
from hypothesis import strategies as st


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 2 * np.pi))
def test_step_never_teleports_or_enters_walls(u, v, theta):
    env = make_point_env("pointmaze")
    start = env.sample_free(1, int(1e6 * u + 1e3 * v))[0]
    p = env.step(start, theta)
    assert np.linalg.norm(p - start) <= env.step_size + 1e-12
    assert not env.collides(p)

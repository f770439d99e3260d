import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laprep.graph import (
    GraphError,
    build_graph,
    cycle_graph,
    edge_quadratic_form,
    laplacian,
    path_graph,
    quadratic_form,
    read_edge_list,
    write_edge_list,
)


def test_build_graph_symmetrizes_and_dedups():
    g = build_graph([(0, 1), (1, 0), (1, 2)])
    assert g.edges.tolist() == [[0, 1], [1, 2]]
    assert g.n_states == 3


def test_self_loop_only_is_empty():
    with pytest.raises(GraphError, match="empty graph"):
        build_graph([(0, 0)])
    with pytest.raises(GraphError, match="empty graph"):
        build_graph([])


def test_out_of_range_index():
    with pytest.raises(GraphError):
        build_graph([(0, 5)], n_states=3)


def test_path_laplacian():
    L = laplacian(path_graph(3))
    np.testing.assert_array_equal(L, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])


def test_quadratic_form_examples():
    L = laplacian(path_graph(3))
    assert quadratic_form(L, np.ones(3)) == 0.0
    assert quadratic_form(L, np.array([1.0, 0.0, -1.0])) == 2.0
    with pytest.raises(GraphError):
        quadratic_form(L, np.ones(4))


def test_gridroom_graph(gridroom):
    g = gridroom.graph()
    assert g.n_states == 271
    assert g.is_connected()
    # exhaustive enumeration agrees with what a long random walk discovers
    ds = gridroom.collect(100000, 50, 0.0, seed=0)
    g2 = build_graph(np.stack([ds.states, ds.next_states], 1), n_states=271)
    assert np.array_equal(g.edges, g2.edges)


def test_gridmaze_laplacian(gridmaze):
    L = laplacian(gridmaze.graph())
    assert L.shape == (161, 161)
    assert np.linalg.eigvalsh(L)[0] == pytest.approx(0.0, abs=1e-10)


def test_matrix_and_edge_forms_agree(gridroom, rng):
    g = gridroom.graph()
    L = laplacian(g)
    for _ in range(5):
        u = rng.standard_normal(g.n_states)
        a, b = quadratic_form(L, u), edge_quadratic_form(g, u)
        assert abs(a - b) / abs(b) < 1e-10


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=40))
def test_laplacian_invariants(pairs):
    if all(a == b for a, b in pairs):
        return
    L = laplacian(build_graph(pairs, n_states=10))
    np.testing.assert_allclose(L.sum(axis=1), 0.0)
    np.testing.assert_array_equal(L, L.T)
    assert np.linalg.eigvalsh(L).min() > -1e-10


def test_cycle_graph_degree():
    assert np.all(cycle_graph(6).degree() == 2)


def test_edge_list_roundtrip(tmp_path, gridmaze):
    g = gridmaze.graph()
    write_edge_list(g, tmp_path / "e.txt")
    g2 = read_edge_list(tmp_path / "e.txt")
    assert g2.n_states == g.n_states
    assert np.array_equal(g2.edges, g.edges)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laprep.eigen import eig_sym
from laprep.graph import laplacian, path_graph
from laprep.models import MLPRepresentation, TableRepresentation
from laprep.objective import (
    cross_penalty_terms,
    exact_objective,
    make_coefficients,
    penalty_terms,
    penalty_weights,
    stochastic_attraction,
    stochastic_penalty,
    total_loss,
)
from laprep.verify import random_orthogonal


def test_presets():
    np.testing.assert_array_equal(make_coefficients("default", 4), [4, 3, 2, 1])
    np.testing.assert_array_equal(make_coefficients("baseline", 3), [1, 1, 1])
    np.testing.assert_array_equal(make_coefficients("group1", 3), [9, 4, 1])
    np.testing.assert_allclose(make_coefficients("group2", 3), np.sqrt([3, 2, 1]))
    with pytest.raises(ValueError):
        make_coefficients("bogus", 3)
    with pytest.raises(ValueError):
        make_coefficients([1.0, 2.0], 2)
    with pytest.raises(ValueError):
        make_coefficients([2.0, 1.0], 3)


def test_penalty_weights():
    np.testing.assert_array_equal(penalty_weights(np.array([3.0, 2.0, 1.0])), [[3, 2, 1], [2, 2, 1], [1, 1, 1]])


def test_exact_objective_at_eigenvectors():
    L = laplacian(path_graph(8))
    pairs = eig_sym(L, 4)
    c = make_coefficients("default", 4)
    assert exact_objective(pairs.eigenvectors, L, c) == pytest.approx(np.sum(c * pairs.eigenvalues), rel=1e-12)
    with pytest.raises(ValueError):
        exact_objective(2 * pairs.eigenvectors, L, c)


def test_rotation_invariance_and_uniqueness():
    L = laplacian(path_graph(8))
    E = eig_sym(L, 4).eigenvectors
    rng = np.random.default_rng(0)
    ones = np.ones(4)
    c = make_coefficients("default", 4)
    base = exact_objective(E, L, ones)
    best = exact_objective(E, L, c)
    for _ in range(100):
        Q = random_orthogonal(4, rng)
        assert abs(exact_objective(E @ Q, L, ones) - base) < 1e-9
        assert exact_objective(E @ Q, L, c) - best > 1e-6


def test_attraction_constant_rep_is_zero():
    rep = TableRepresentation(5, 3)
    rep.table[:] = 1.7
    val, grad = stochastic_attraction(rep, np.arange(4), np.arange(1, 5), np.ones(3))
    assert val == 0.0 and not grad.any()


def test_attraction_over_edges_matches_matrix_form(gridmaze):
    g = gridmaze.graph()
    L = laplacian(g)
    rep = TableRepresentation(g.n_states, 3, random_state=0)
    U = rep.table
    val, _ = stochastic_attraction(rep, g.edges[:, 0], g.edges[:, 1], np.ones(3))
    matrix = sum(U[:, i] @ L @ U[:, i] for i in range(3))
    assert val == pytest.approx(matrix / g.n_edges, rel=1e-12)


def test_penalty_zero_rep_hand_value():
    rep = TableRepresentation(4, 2)
    rep.params[:] = 0.0
    for est in ("paired", "cross"):
        val, _ = stochastic_penalty(rep, np.array([0]), np.array([1]), estimator=est)
        assert val == pytest.approx(3.0)


def test_penalty_orthonormal_rep_is_zero():
    L = laplacian(path_graph(10))
    E = eig_sym(L, 3).eigenvectors
    rep = TableRepresentation(10, 3)
    rep.table[:] = np.sqrt(10) * E
    # every state once in each batch: the empirical rho is uniform
    val, _ = stochastic_penalty(rep, np.arange(10), np.arange(10), estimator="cross")
    assert abs(val) < 1e-12


def test_cross_estimator_is_mean_over_all_pairs(rng):
    Fa, Fb = rng.normal(size=(5, 3)), rng.normal(size=(4, 3))
    W = penalty_weights(np.array([3.0, 2.0, 1.0]))
    val, _, _ = cross_penalty_terms(Fa, Fb, W)
    ref = np.mean([penalty_terms(Fa[[i]], Fb[[j]], W)[0] for i in range(5) for j in range(4)])
    assert val == pytest.approx(ref, rel=1e-12)


def test_beta_zero_total_is_attraction(rng):
    rep = TableRepresentation(6, 3, random_state=0)
    S, Sn, A, B = (rng.integers(0, 6, 8) for _ in range(4))
    report, _ = total_loss(rep, S, Sn, A, B, make_coefficients("default", 3), beta=0.0)
    assert report.total == report.attraction


def _fd_check(rep, args, kw, rng, h=1e-6):
    _, grad = total_loss(rep, *args, **kw)
    fd = np.empty_like(grad)
    for k in range(rep.params.size):
        old = rep.params[k]
        rep.params[k] = old + h
        up = total_loss(rep, *args, **kw)[0].total
        rep.params[k] = old - h
        down = total_loss(rep, *args, **kw)[0].total
        rep.params[k] = old
        fd[k] = (up - down) / (2 * h)
    return np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1e-12)


@pytest.mark.parametrize("penalty", ["cross", "paired"])
def test_total_loss_gradient_table(penalty):
    rng = np.random.default_rng(0)
    rep = TableRepresentation(8, 3)
    c = make_coefficients("default", 3)
    for _ in range(20):
        rep.params[:] = rng.normal(size=rep.params.size)
        args = [rng.integers(0, 8, 6) for _ in range(4)] + [c]
        assert _fd_check(rep, args, dict(beta=1.3, penalty=penalty), rng) < 1e-4


@pytest.mark.parametrize("penalty", ["cross", "paired"])
def test_total_loss_gradient_mlp(penalty):
    rng = np.random.default_rng(1)
    rep = MLPRepresentation(2, 3, hidden=(5, 4), random_state=0)
    c = make_coefficients("group1", 3)
    for _ in range(10):
        rep.params[:] = rng.normal(0, 0.7, size=rep.params.size)
        args = [rng.uniform(-1, 1, (5, 2)) for _ in range(4)] + [c]
        assert _fd_check(rep, args, dict(beta=0.7, penalty=penalty), rng) < 1e-4


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_penalty_nonnegative_when_batches_match(d, seed):
    # with A = B the cross estimate is a weighted sum of squares
    F = np.random.default_rng(seed).normal(size=(7, d))
    W = penalty_weights(make_coefficients("default", d))
    assert cross_penalty_terms(F, F, W)[0] >= -1e-12

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from laprep.eigen import (
    EigenError,
    EigenPairs,
    check_distinct_eigvals,
    eig_sym,
    ground_truth_representation,
    jacobi_eigh,
    read_eigenpairs_csv,
    write_eigenpairs_csv,
)
from laprep.graph import cycle_graph, laplacian, path_graph


def path_spectrum(n):
    k = np.arange(1, n + 1)
    return 2.0 * (1.0 - np.cos(np.pi * (k - 1) / n))


@pytest.mark.parametrize("n", [4, 8, 16])
@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_path_closed_form(n, method):
    pairs = eig_sym(laplacian(path_graph(n)), method=method)
    np.testing.assert_allclose(pairs.eigenvalues, path_spectrum(n), atol=1e-8)


def test_diagonal_example():
    pairs = eig_sym(np.diag([3.0, 1.0, 2.0]), 3)
    np.testing.assert_allclose(pairs.eigenvalues, [1, 2, 3])
    np.testing.assert_allclose(pairs.eigenvectors, [[0, 0, 1], [1, 0, 0], [0, 1, 0]], atol=1e-14)


def test_three_by_three_characteristic_polynomial():
    M = np.array([[2.0, -1.0, 0.5], [-1.0, 3.0, 1.0], [0.5, 1.0, 1.0]])
    lam = eig_sym(M).eigenvalues
    # roots of det(M - x I) via its coefficients, computed independently
    coeffs = [-1.0, np.trace(M), -0.5 * (np.trace(M) ** 2 - np.trace(M @ M)), np.linalg.det(M)]
    np.testing.assert_allclose(lam, np.sort(np.roots(coeffs).real), atol=1e-10)


def test_gridroom_first_eigenvector(gridroom):
    pairs = eig_sym(laplacian(gridroom.graph()), 10, method="jacobi")
    assert abs(pairs.eigenvalues[0]) < 1e-10
    np.testing.assert_allclose(pairs.eigenvectors[:, 0], 1.0 / np.sqrt(271), atol=1e-10)


@pytest.mark.parametrize("name", ["gridroom", "gridmaze"])
def test_residuals_on_grid_envs(name, request):
    env = request.getfixturevalue(name)
    L = laplacian(env.graph())
    pairs = eig_sym(L, 10, method="jacobi")
    R = L @ pairs.eigenvectors - pairs.eigenvectors * pairs.eigenvalues
    assert np.abs(R).max() < 1e-8


def test_jacobi_matches_lapack(gridmaze):
    L = laplacian(gridmaze.graph())
    a = eig_sym(L, 10, method="jacobi")
    b = eig_sym(L, 10, method="lapack")
    np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)
    np.testing.assert_allclose(np.abs(np.sum(a.eigenvectors * b.eigenvectors, 0)), 1.0, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10)))
def test_jacobi_decomposes_random_symmetric(A):
    M = A + A.T
    w, V = jacobi_eigh(M)
    scale = max(1.0, np.abs(M).max())
    np.testing.assert_allclose(V.T @ V, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, M, atol=1e-9 * scale)


def test_sign_convention():
    V = eig_sym(laplacian(path_graph(8))).eigenvectors
    for k in range(V.shape[1]):
        first = V[np.flatnonzero(np.abs(V[:, k]) > 1e-12)[0], k]
        assert first > 0


def test_errors():
    with pytest.raises(EigenError):
        eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(EigenError):
        eig_sym(np.eye(3), 4)
    with pytest.raises(EigenError):
        eig_sym(np.eye(3), method="qr")


def test_ground_truth_first_column_constant(gridmaze):
    phi = ground_truth_representation(gridmaze.graph(), 4)
    assert np.ptp(phi[:, 0]) < 1e-10


def test_distinct_eigvals():
    ok, gap = check_distinct_eigvals(EigenPairs(np.array([0.0, 0.1, 0.2]), np.eye(3)))
    assert ok and gap == pytest.approx(0.1)
    ok, _ = check_distinct_eigvals(eig_sym(laplacian(cycle_graph(8)), 4))
    assert not ok


@pytest.mark.parametrize("name", ["gridroom", "gridmaze"])
def test_grid_envs_have_distinct_eigvals(name, request):
    env = request.getfixturevalue(name)
    ok, gap = check_distinct_eigvals(eig_sym(laplacian(env.graph()), 10, method="auto"))
    assert ok and gap > 1e-6


def test_csv_roundtrip(tmp_path):
    pairs = eig_sym(laplacian(path_graph(5)), 3)
    write_eigenpairs_csv(pairs, tmp_path / "p.csv")
    back = read_eigenpairs_csv(tmp_path / "p.csv")
    np.testing.assert_array_equal(back.eigenvalues, pairs.eigenvalues)
    np.testing.assert_array_equal(back.eigenvectors, pairs.eigenvectors)

"""Generalized graph drawing objective and its sampled training loss.

The exact objective is ``sum_i c_i u_i^T L u_i`` over orthonormal columns
``u_i``. The sampled form replaces ``u_i^T L u_i`` with a batch mean of
squared differences over transitions and turns orthonormality into a
quadratic penalty on ``E_rho[f_j f_k] - delta_jk``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PRESETS = ("baseline", "default", "group1", "group2")


def make_coefficients(preset: str | np.ndarray, d: int) -> np.ndarray:
    """Coefficient vector ``c_1..c_d`` for a named preset or explicit values.

    * ``baseline``: all ones (the rotation-invariant graph drawing objective)
    * ``default``:  ``d - i + 1``
    * ``group1``:   ``(d - i + 1)**2``, gaps shrink with ``i``
    * ``group2``:   ``sqrt(d - i + 1)``, gaps grow with ``i``

    Every preset except ``baseline``, and any explicit vector, must be
    strictly decreasing and positive.
    """
    if not isinstance(preset, str):
        c = np.asarray(preset, dtype=float).ravel()
        if len(c) != d:
            raise ValueError(f"expected {d} coefficients, got {len(c)}")
        if not (np.all(c > 0) and np.all(np.diff(c) < 0)):
            raise ValueError("custom coefficients must satisfy c_1 > ... > c_d > 0")
        return c
    k = np.arange(d, 0, -1, dtype=float)  # d - i + 1 for i = 1..d
    if preset == "baseline":
        return np.ones(d)
    if preset == "default":
        return k
    if preset == "group1":
        return k**2
    if preset == "group2":
        return np.sqrt(k)
    raise ValueError(f"unknown coefficient preset {preset!r}; choose from {PRESETS}")


def penalty_weights(c: np.ndarray) -> np.ndarray:
    """Pair weights ``W[j, k] = c[max(j, k)]``.

    Writing ``c`` as a sum of nested graph drawing objectives over the first
    ``l`` dimensions, each with its own orthonormality penalty, gives the pair
    ``(j, k)`` exactly this total weight; for ``c_i = d - i + 1`` it is
    ``d - max(j, k) + 1`` and for all-ones coefficients it is uniform.
    """
    c = np.asarray(c, dtype=float)
    idx = np.arange(len(c))
    return c[np.maximum.outer(idx, idx)]


def exact_objective(U: np.ndarray, L: np.ndarray, c: np.ndarray, orth_tol: float | None = 1e-6) -> float:
    U = np.asarray(U, dtype=float)
    c = np.asarray(c, dtype=float)
    if U.ndim != 2 or U.shape[0] != L.shape[0] or U.shape[1] != len(c):
        raise ValueError(f"U of shape {U.shape} incompatible with L {L.shape} and {len(c)} coefficients")
    if orth_tol is not None and np.max(np.abs(U.T @ U - np.eye(U.shape[1]))) > orth_tol:
        raise ValueError("columns of U are not orthonormal")
    return float(np.sum(c * np.einsum("ni,nm,mi->i", U, L, U)))


def attraction_terms(F_s: np.ndarray, F_next: np.ndarray, c: np.ndarray):
    """Batch mean of ``sum_i c_i (f_i(s) - f_i(s'))^2`` and its output gradients."""
    diff = F_s - F_next
    B = len(diff)
    value = float(np.sum(c * diff * diff) / B)
    g = 2.0 * c * diff / B
    return value, g, -g


def penalty_terms(F_a: np.ndarray, F_b: np.ndarray, W: np.ndarray):
    """Batch mean of ``sum_jk W_jk h_jk(s, s')`` and its output gradients,
    with ``h_jk = (f_j(s) f_k(s) - delta_jk)(f_j(s') f_k(s') - delta_jk)``."""
    B, d = F_a.shape
    eye = np.eye(d)
    Ma = F_a[:, :, None] * F_a[:, None, :] - eye
    Mb = F_b[:, :, None] * F_b[:, None, :] - eye
    value = float(np.sum(W * Ma * Mb) / B)
    g_a = 2.0 * np.einsum("njk,nk->nj", W * Mb, F_a) / B
    g_b = 2.0 * np.einsum("njk,nk->nj", W * Ma, F_b) / B
    return value, g_a, g_b


def cross_penalty_terms(F_a: np.ndarray, F_b: np.ndarray, W: np.ndarray):
    """Same expectation as ``penalty_terms`` averaged over all ``B_a * B_b``
    cross pairs of the two independent batches.

    The mean of ``h_jk`` over every pair factorizes into a product of the two
    batch second-moment errors, so this costs no more than the paired form
    while having far lower variance.
    """
    d = F_a.shape[1]
    eye = np.eye(d)
    Ca = F_a.T @ F_a / len(F_a) - eye
    Cb = F_b.T @ F_b / len(F_b) - eye
    value = float(np.sum(W * Ca * Cb))
    g_a = 2.0 * F_a @ (W * Cb) / len(F_a)
    g_b = 2.0 * F_b @ (W * Ca) / len(F_b)
    return value, g_a, g_b


PENALTY_ESTIMATORS = {"paired": penalty_terms, "cross": cross_penalty_terms}


def _penalty_fn(name: str):
    try:
        return PENALTY_ESTIMATORS[name]
    except KeyError:
        raise ValueError(f"unknown penalty estimator {name!r}; choose from {tuple(PENALTY_ESTIMATORS)}") from None


def stochastic_attraction(rep, S, S_next, c):
    """Value and parameter gradient of the sampled attraction term."""
    c = np.asarray(c, dtype=float)
    value, g_s, g_n = attraction_terms(rep.forward(S), rep.forward(S_next), c)
    return value, rep.backward(S, g_s) + rep.backward(S_next, g_n)


def stochastic_penalty(rep, A, B, c=None, estimator: str = "paired"):
    """Value and parameter gradient of the sampled orthonormality penalty.

    ``A`` and ``B`` are independent draws from the state distribution.
    ``c`` defaults to the ``d - i + 1`` coefficients.
    """
    if c is None:
        c = make_coefficients("default", rep.d)
    value, g_a, g_b = _penalty_fn(estimator)(rep.forward(A), rep.forward(B), penalty_weights(c))
    return value, rep.backward(A, g_a) + rep.backward(B, g_b)


@dataclass(frozen=True)
class LossReport:
    attraction: float
    penalty: float
    beta: float
    total: float


def total_loss(rep, S, S_next, A, B, c, beta: float = 1.0, penalty: str = "cross") -> tuple[LossReport, np.ndarray]:
    """Attraction plus ``beta`` times penalty, with one forward/backward pass.

    ``penalty`` selects the estimator of the orthonormality term: ``"cross"``
    (all pairs between ``A`` and ``B``) or ``"paired"`` (``A[n]`` with ``B[n]``).
    """
    pen_fn = _penalty_fn(penalty)
    c = np.asarray(c, dtype=float)
    S, S_next, A, B = (np.asarray(x) for x in (S, S_next, A, B))
    n = len(S)
    X = np.concatenate([S, S_next, A, B])
    F = rep.forward(X)
    att, g_s, g_n = attraction_terms(F[:n], F[n : 2 * n], c)
    pen, g_a, g_b = pen_fn(F[2 * n : 2 * n + len(A)], F[2 * n + len(A) :], penalty_weights(c))
    G = np.concatenate([g_s, g_n, beta * g_a, beta * g_b])
    report = LossReport(attraction=att, penalty=pen, beta=beta, total=att + beta * pen)
    return report, rep.backward(X, G)

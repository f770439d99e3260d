"""Dense symmetric eigendecomposition.

The default solver is a cyclic Jacobi method. Sweeps use a round-robin
ordering so each round applies ``n/2`` disjoint plane rotations at once,
which keeps the inner loop in numpy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import StateGraph, laplacian


# pure-numpy Jacobi costs O(n^3) per sweep; beyond this size defer to LAPACK
JACOBI_MAX_N = 512


class EigenError(ValueError):
    pass


@dataclass(frozen=True)
class EigenPairs:
    eigenvalues: np.ndarray  # (d,) ascending
    eigenvectors: np.ndarray  # (n, d), unit columns

    def __len__(self) -> int:
        return len(self.eigenvalues)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=np.intp), np.array(q, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(A: np.ndarray) -> float:
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigh(M: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a symmetric matrix by Jacobi rotations.

    Stops once the off-diagonal Frobenius norm is below ``tol`` times the
    Frobenius norm of ``M``. Returns unsorted ``(w, V)`` with ``M V = V diag(w)``.
    """
    A = np.array(M, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), V
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), V
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = _off_norm(A)
        if off <= tol * scale:
            break
        for p, q in rounds:
            apq = A[p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            with np.errstate(over="ignore"):
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            cp, cq = A[:, p], A[:, q]
            A[:, p] = cp * c - cq * s
            A[:, q] = cp * s + cq * c
            rp, rq = A[p, :], A[q, :]
            A[p, :] = c[:, None] * rp - s[:, None] * rq
            A[q, :] = s[:, None] * rp + c[:, None] * rq
            A[p, q] = 0.0
            A[q, p] = 0.0

            vp, vq = V[:, p], V[:, q]
            V[:, p] = vp * c - vq * s
            V[:, q] = vp * s + vq * c
    else:
        off = _off_norm(A)
        if off > tol * scale:
            warnings.warn(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})")
    return A.diagonal().copy(), V


def _fix_signs(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for k in range(V.shape[1]):
        col = V[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-9 * np.abs(col).max())
        if nz.size and col[nz[0]] < 0:
            V[:, k] = -col
    return V


def eig_sym(M: np.ndarray, d: int | None = None, method: str = "jacobi") -> EigenPairs:
    """The ``d`` smallest eigenpairs of symmetric ``M`` in ascending order.

    Each eigenvector is signed so its first nonzero entry is positive.
    ``method`` is ``"jacobi"``, ``"lapack"`` (numpy's ``eigh``) or ``"auto"``,
    which uses Jacobi up to ``JACOBI_MAX_N`` states and LAPACK beyond.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise EigenError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(M), initial=0.0)):
        raise EigenError("matrix is not symmetric")
    if d is None:
        d = n
    if d < 1 or d > n:
        raise EigenError(f"requested d={d} eigenpairs from a {n}x{n} matrix")

    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        w, V = jacobi_eigh(M)
    elif method == "lapack":
        w, V = np.linalg.eigh(M)
    else:
        raise EigenError(f"unknown method {method!r}")
    order = np.argsort(w, kind="stable")[:d]
    return EigenPairs(eigenvalues=w[order], eigenvectors=_fix_signs(V[:, order]))


def ground_truth_representation(g: StateGraph, d: int, method: str = "auto") -> np.ndarray:
    """Per-state table whose column ``i`` is the ``i``-th smallest Laplacian eigenvector."""
    if not g.is_connected():
        raise EigenError("graph is not connected")
    return eig_sym(laplacian(g), d, method=method).eigenvectors


def check_distinct_eigvals(pairs: EigenPairs, d: int | None = None, tol: float = 1e-6) -> tuple[bool, float]:
    lam = pairs.eigenvalues[: d if d is not None else len(pairs)]
    if len(lam) < 2:
        return True, float("inf")
    gap = float(np.min(np.diff(lam)))
    return gap > tol, gap


def write_eigenpairs_csv(pairs: EigenPairs, path: str | Path) -> None:
    n = pairs.eigenvectors.shape[0]
    header = "index,lambda," + ",".join(f"e{j}" for j in range(n))
    lines = [header]
    for k, lam in enumerate(pairs.eigenvalues):
        vals = ",".join("%.17g" % v for v in pairs.eigenvectors[:, k])
        lines.append(f"{k + 1},{lam:.17g},{vals}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_eigenpairs_csv(path: str | Path) -> EigenPairs:
    rows = Path(path).read_text().splitlines()[1:]
    data = np.array([[float(t) for t in r.split(",")] for r in rows if r])
    return EigenPairs(eigenvalues=data[:, 1], eigenvectors=data[:, 2:].T.copy())

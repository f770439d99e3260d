"""Representation backends with hand-written gradients, and Adam.

Both backends keep every parameter in one flat float64 vector so the
optimizer and serialization need no knowledge of the architecture.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


class TableRepresentation:
    """One learnable ``d``-vector per state index."""

    backend = "table"

    def __init__(self, n_states: int, d: int, random_state=None, init_scale: float = 0.1):
        rng = np.random.default_rng(random_state)
        self.n_states = int(n_states)
        self.d = int(d)
        self.params = rng.normal(0.0, init_scale, size=self.n_states * self.d)

    @property
    def arch(self) -> str:
        return f"{self.n_states}x{self.d}"

    @property
    def table(self) -> np.ndarray:
        return self.params.reshape(self.n_states, self.d)

    def _index(self, X) -> np.ndarray:
        idx = np.asarray(X)
        if idx.ndim == 2 and idx.shape[1] == 1:
            idx = idx[:, 0]
        idx = idx.astype(np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_states):
            raise IndexError(f"state index out of range [0, {self.n_states})")
        return idx

    def forward(self, X) -> np.ndarray:
        return self.table[self._index(X)].copy()

    def backward(self, X, grad_out: np.ndarray) -> np.ndarray:
        """Gradient of ``sum(grad_out * forward(X))`` w.r.t. ``params``."""
        idx = self._index(X)
        grad = np.zeros((self.n_states, self.d))
        np.add.at(grad, idx, grad_out)
        return grad.ravel()


class MLPRepresentation:
    """Fully connected ReLU network ``in_dim -> hidden... -> d`` with a linear head."""

    backend = "mlp"

    def __init__(self, in_dim: int, d: int, hidden=(256, 256, 256), random_state=None):
        rng = np.random.default_rng(random_state)
        self.in_dim = int(in_dim)
        self.d = int(d)
        self.hidden = tuple(int(h) for h in hidden)
        sizes = (self.in_dim,) + self.hidden + (self.d,)
        self._shapes = [(sizes[k], sizes[k + 1]) for k in range(len(sizes) - 1)]
        n = sum(a * b + b for a, b in self._shapes)
        self.params = np.zeros(n)
        for W, _ in self._layers(self.params):
            fan_in, fan_out = W.shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            W[...] = rng.uniform(-limit, limit, size=W.shape)

    @property
    def arch(self) -> str:
        return "-".join(str(s) for s in (self.in_dim,) + self.hidden + (self.d,))

    def _layers(self, flat: np.ndarray):
        out, k = [], 0
        for a, b in self._shapes:
            W = flat[k : k + a * b].reshape(a, b)
            k += a * b
            bias = flat[k : k + b]
            k += b
            out.append((W, bias))
        return out

    def _run(self, X):
        h = np.asarray(X, dtype=float).reshape(-1, self.in_dim)
        acts = [h]
        layers = self._layers(self.params)
        for W, b in layers[:-1]:
            h = np.maximum(h @ W + b, 0.0)
            acts.append(h)
        W, b = layers[-1]
        return h @ W + b, acts

    def forward(self, X) -> np.ndarray:
        return self._run(X)[0]

    def backward(self, X, grad_out: np.ndarray) -> np.ndarray:
        _, acts = self._run(X)
        grad = np.zeros_like(self.params)
        glayers = self._layers(grad)
        layers = self._layers(self.params)
        g = np.asarray(grad_out, dtype=float)
        for k in range(len(layers) - 1, -1, -1):
            W, _ = layers[k]
            gW, gb = glayers[k]
            a = acts[k]
            gW[...] = a.T @ g
            gb[...] = g.sum(axis=0)
            if k:
                g = (g @ W.T) * (a > 0)
        return grad


class Adam:
    """Bias-corrected adaptive moment estimation over a flat parameter vector."""

    def __init__(self, n_params: int, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """Update ``params`` in place and return it."""
        if grad.shape != params.shape or params.shape != self.m.shape:
            raise ValueError("parameter, gradient and moment shapes differ")
        self.t += 1
        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * grad
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        params -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return params


def save_params(rep, path: str | Path) -> None:
    """Flat CSV: a ``backend,d,arch`` header, its values, then one parameter per line."""
    lines = ["backend,d,arch", f"{rep.backend},{rep.d},{rep.arch}"]
    lines += ["%.17g" % p for p in rep.params]
    Path(path).write_text("\n".join(lines) + "\n")


def load_params(path: str | Path):
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "backend,d,arch":
        raise ValueError(f"{path}: missing 'backend,d,arch' header")
    backend, d, arch = lines[1].split(",")
    sizes = [int(t) for t in arch.replace("x", "-").split("-")]
    if backend == "table":
        rep = TableRepresentation(sizes[0], int(d))
    elif backend == "mlp":
        rep = MLPRepresentation(sizes[0], int(d), hidden=sizes[1:-1])
    else:
        raise ValueError(f"unknown backend {backend!r}")
    params = np.array([float(t) for t in lines[2:] if t])
    if params.shape != rep.params.shape:
        raise ValueError(f"{path}: expected {rep.params.size} parameters, found {params.size}")
    rep.params[...] = params
    return rep

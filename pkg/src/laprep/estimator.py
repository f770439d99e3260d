"""Scikit-learn style estimator that learns a Laplacian representation."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_pairs, check_states
from .models import Adam, MLPRepresentation, TableRepresentation
from .objective import PENALTY_ESTIMATORS, make_coefficients, total_loss

logger = logging.getLogger(__name__)

# step size for the table backend at desk scale (10x fewer iterations and
# 4x smaller batches than the full-scale setting); networks keep 1e-3
DESK_TABLE_LR = 4e-2


class NumericalError(FloatingPointError):
    """Raised when the training loss stops being finite."""


class LaplacianRepresentation(TransformerMixin, BaseEstimator):
    """Learn ``f: state -> R^d`` approximating the smallest Laplacian eigenvectors.

    ``fit`` takes sampled transitions as rows ``[s, s']`` (a state is a single
    index for the table backend or an observation vector for the MLP backend)
    and minimizes the coefficient-weighted attraction term plus ``beta`` times
    the orthonormality penalty with Adam. ``transform`` maps states to their
    ``d``-dimensional embedding.

    Parameters
    ----------
    d : int
        Output dimension.
    coefficients : str or array-like
        ``"default"``, ``"baseline"``, ``"group1"``, ``"group2"`` or an
        explicit strictly decreasing positive vector.
    backend : {"table", "mlp"}
    penalty : {"cross", "paired"}
        Estimator of the orthonormality penalty, see ``objective.total_loss``.
    n_states : int, optional
        Table size; inferred from the largest index seen when omitted.
    """

    def __init__(
        self,
        d: int = 10,
        coefficients="default",
        backend: str = "table",
        n_states: int | None = None,
        hidden_layer_sizes=(256, 256, 256),
        n_iter: int = 20000,
        batch_size: int = 256,
        learning_rate: float = 1e-3,
        beta: float = 1.0,
        penalty: str = "cross",
        checkpoint_every: int = 10000,
        log_every: int = 100,
        random_state=None,
    ):
        self.d = d
        self.coefficients = coefficients
        self.backend = backend
        self.n_states = n_states
        self.hidden_layer_sizes = hidden_layer_sizes
        self.n_iter = n_iter
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.beta = beta
        self.penalty = penalty
        self.checkpoint_every = checkpoint_every
        self.log_every = log_every
        self.random_state = random_state

    def _init_model(self, n_features: int, n_states: int, rng: np.random.Generator):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        seed = int(rng.integers(2**63 - 1))
        if self.backend == "table":
            return TableRepresentation(n_states, self.d, random_state=seed)
        if self.backend == "mlp":
            return MLPRepresentation(n_features, self.d, hidden=self.hidden_layer_sizes, random_state=seed)
        raise ValueError(f"unknown backend {self.backend!r}")

    def fit(self, X, y=None, state_pool=None):
        """Fit on transition rows ``[s, s']``.

        ``state_pool`` holds states drawn from the data distribution for the
        penalty term; by default both columns of ``X`` are pooled.
        """
        integer = self.backend == "table"
        S, S_next = check_pairs(X, integer=integer)
        if state_pool is None:
            pool = np.concatenate([S, S_next])
        else:
            pool = check_states(state_pool, n_features=S.shape[1], integer=integer)
        self.n_features_in_ = S.shape[1]
        n_states = self.n_states
        if integer:
            n_states = n_states or int(max(S.max(), S_next.max(), pool.max())) + 1
        self.coefficients_ = make_coefficients(self.coefficients, self.d)
        if self.penalty not in PENALTY_ESTIMATORS:
            raise ValueError(f"unknown penalty estimator {self.penalty!r}")

        rng = np.random.default_rng(self.random_state)
        self.model_ = self._init_model(S.shape[1], n_states, rng)
        opt = Adam(self.model_.params.size, lr=self.learning_rate)
        if integer:
            S, S_next, pool = S[:, 0], S_next[:, 0], pool[:, 0]

        self.checkpoints_ = [(0, self.model_.params.copy())]
        log = []
        last_finite = None
        B = self.batch_size
        for it in range(1, self.n_iter + 1):
            i = rng.integers(0, len(S), size=B)
            a = rng.integers(0, len(pool), size=B)
            b = rng.integers(0, len(pool), size=B)
            report, grad = total_loss(self.model_, S[i], S_next[i], pool[a], pool[b], self.coefficients_, self.beta, self.penalty)
            if not (math.isfinite(report.total) and np.all(np.isfinite(grad))):
                raise NumericalError(
                    f"non-finite loss at iteration {it}; last finite loss {last_finite}"
                )
            last_finite = report.total
            opt.step(self.model_.params, grad)
            if it % self.log_every == 0 or it == self.n_iter:
                log.append((it, report.attraction, report.penalty, report.total))
            if self.checkpoint_every and it % self.checkpoint_every == 0:
                self.checkpoints_.append((it, self.model_.params.copy()))
                logger.info("iter %d attraction %.5f penalty %.5f", it, report.attraction, report.penalty)
        if self.checkpoints_[-1][0] != self.n_iter:
            self.checkpoints_.append((self.n_iter, self.model_.params.copy()))
        self.log_ = np.array(log, dtype=float).reshape(-1, 4)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        integer = self.backend == "table"
        X = check_states(X, n_features=self.n_features_in_, integer=integer)
        return self.model_.forward(X[:, 0] if integer else X)

    def transform_at(self, checkpoint: int, X) -> np.ndarray:
        """Embedding of ``X`` using the parameters stored at checkpoint index ``checkpoint``."""
        check_is_fitted(self, "model_")
        saved = self.model_.params.copy()
        try:
            self.model_.params[...] = self.checkpoints_[checkpoint][1]
            return self.transform(X)
        finally:
            self.model_.params[...] = saved


@dataclass(frozen=True)
class TrainConfig:
    d: int = 10
    iterations: int = 20000
    batch_size: int = 256
    lr: float = 1e-3
    beta: float = 1.0
    discount: float = 0.9
    n_transitions: int = 100000
    episode_len: int = 50
    seed: int = 0
    coeffs: str = "default"
    backend: str = "table"
    penalty: str = "cross"
    hidden: tuple = (256, 256, 256)
    checkpoint_every: int = 10000

    def __post_init__(self):
        for name in ("d", "iterations", "batch_size", "n_transitions", "episode_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.lr <= 0 or self.beta < 0:
            raise ValueError("lr must be positive and beta non-negative")

    @classmethod
    def desk(cls, **kw) -> "TrainConfig":
        """Reduced-cost grid configuration: 20k iterations, batch 256, and a
        larger step size for the table backend."""
        if "lr" not in kw and kw.get("backend", "table") == "table":
            kw["lr"] = DESK_TABLE_LR
        return cls(**kw)

    @classmethod
    def full_scale(cls, env_kind: str = "grid", **kw) -> "TrainConfig":
        """Full-scale configuration; point environments use larger batches and datasets."""
        base = dict(iterations=200000, batch_size=1024, backend="mlp")
        if env_kind == "point":
            base.update(batch_size=8192, n_transitions=1000000, episode_len=500)
        base.update(kw)
        return cls(**base)

    def with_(self, **kw) -> "TrainConfig":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


def dataset_arrays(env, dataset, backend: str):
    """Feature matrices ``(X, state_pool)`` for ``LaplacianRepresentation.fit``."""
    S, S_next, pool = dataset.states, dataset.next_states, dataset.state_pool
    if backend == "table":
        if S.ndim != 1:
            raise ValueError("the table backend needs a discrete environment")
        return np.stack([S, S_next], axis=1), pool[:, None]
    return np.hstack([env.observe(S), env.observe(S_next)]), env.observe(pool)


def evaluation_states(env, backend: str, n_samples: int = 2000, seed: int = 0) -> np.ndarray:
    """All states of a grid env (as indices or observations), or sampled positions' observations."""
    if hasattr(env, "n_states"):
        idx = np.arange(env.n_states)
        return idx[:, None] if backend == "table" else env.observe(idx)
    return env.observe(env.sample_free(n_samples, seed))


def train(env, dataset, cfg: TrainConfig) -> LaplacianRepresentation:
    """Fit a representation on ``dataset`` following ``cfg``."""
    if len(dataset) == 0:
        raise ValueError("empty dataset")
    X, pool = dataset_arrays(env, dataset, cfg.backend)
    est = LaplacianRepresentation(
        d=cfg.d,
        coefficients=cfg.coeffs,
        backend=cfg.backend,
        n_states=getattr(env, "n_states", None) if cfg.backend == "table" else None,
        hidden_layer_sizes=cfg.hidden,
        n_iter=cfg.iterations,
        batch_size=cfg.batch_size,
        learning_rate=cfg.lr,
        beta=cfg.beta,
        penalty=cfg.penalty,
        checkpoint_every=cfg.checkpoint_every,
        random_state=cfg.seed,
    )
    return est.fit(X, state_pool=pool)

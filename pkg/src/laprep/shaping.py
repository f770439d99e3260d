"""Goal-reaching tabular Q-learning with representation-based reward shaping."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .envs.grid import GridEnv

MODES = ("sparse", "per_dim", "all_dims", "raw_l2")


@dataclass(frozen=True)
class ShapingParams:
    n_steps: int = 200000
    episode_len: int = 150
    gamma: float = 0.99
    lr: float = 0.1
    epsilon: float = 0.1
    eval_every: int = 2000

    def __post_init__(self):
        if self.n_steps <= 0 or self.episode_len <= 0 or self.eval_every <= 0:
            raise ValueError("n_steps, episode_len and eval_every must be positive")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if not 0.0 < self.lr <= 1.0 or not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("lr must lie in (0, 1] and epsilon in [0, 1]")


@dataclass(frozen=True, eq=False)
class ShapingTask:
    env: GridEnv
    goal: int
    mode: str = "sparse"
    dim: int | None = None  # 1-based, per_dim only

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown shaping mode {self.mode!r}; choose from {MODES}")
        if not 0 <= self.goal < self.env.n_states:
            raise ValueError(f"goal {self.goal} is not a free state")
        if self.mode == "per_dim":
            if self.dim is None:
                raise ValueError("per_dim shaping needs a dimension")
            if self.dim == 1:
                raise ValueError("dimension 1 is constant; its pseudo-reward is always 0")

    @property
    def label(self) -> str:
        return f"per_dim{self.dim}" if self.mode == "per_dim" else self.mode


@dataclass(frozen=True)
class SuccessCurve:
    steps: np.ndarray
    success: np.ndarray

    @property
    def auc(self) -> float:
        """Normalized area under the success-rate curve (mean over evaluation points)."""
        return float(np.mean(self.success))

    def steps_to(self, level: float) -> int | None:
        hit = np.flatnonzero(self.success >= level)
        return int(self.steps[hit[0]]) if hit.size else None


def scaled_ground_truth(eigenvectors: np.ndarray) -> np.ndarray:
    """Unit-norm eigenvectors rescaled by ``sqrt(n)`` to the unit-RMS scale of learned tables."""
    E = np.asarray(eigenvectors, dtype=float)
    return E * np.sqrt(E.shape[0])


def pseudo_reward_table(task: ShapingTask, F=None) -> np.ndarray:
    """Pseudo-reward of arriving in each state ``s'``; zero at the goal in every mode."""
    env, g = task.env, task.goal
    if task.mode == "sparse":
        return np.zeros(env.n_states)
    if task.mode == "raw_l2":
        obs = env.observe(np.arange(env.n_states))
        return -np.linalg.norm(obs - obs[g], axis=1)
    if F is None:
        raise ValueError(f"{task.mode} shaping needs a representation")
    F = np.asarray(F, dtype=float)
    if task.mode == "per_dim":
        if not 2 <= task.dim <= F.shape[1]:
            raise ValueError(f"dim must lie in [2, {F.shape[1]}]")
        f = F[:, task.dim - 1]
        return -((f - f[g]) ** 2)
    return -np.linalg.norm(F - F[g], axis=1)


def pseudo_reward(task: ShapingTask, F, s_next):
    return pseudo_reward_table(task, F)[s_next]


def task_reward(task: ShapingTask) -> np.ndarray:
    """Sparse task reward of arriving in each state: 0 at the goal, -1 elsewhere."""
    r = -np.ones(task.env.n_states)
    r[task.goal] = 0.0
    return r


def success_rate(env: GridEnv, q: np.ndarray, goal: int, episode_len: int) -> float:
    """Fraction of non-goal start states from which the greedy policy reaches ``goal``."""
    policy = np.argmax(q, axis=1)
    nxt = env.transition_table[np.arange(env.n_states), policy]
    # the goal is absorbing under evaluation: once reached, an episode ends
    reached = np.zeros(env.n_states - 1, dtype=bool)
    s = np.delete(np.arange(env.n_states), goal)
    for _ in range(episode_len):
        s = nxt[s]
        reached |= s == goal
        if reached.all():
            break
    return float(reached.mean())


def train_agent(task: ShapingTask, F=None, params: ShapingParams | None = None, seed=None) -> SuccessCurve:
    """epsilon-greedy tabular Q-learning on task reward plus pseudo-reward.

    Episodes start in a uniformly random non-goal state and end at the goal
    (terminal) or after ``episode_len`` steps (bootstrapped). The greedy
    policy's success rate over all start states is recorded every
    ``eval_every`` steps.
    """
    p = params or ShapingParams()
    env = task.env
    rng = np.random.default_rng(seed)
    reward = (task_reward(task) + pseudo_reward_table(task, F)).tolist()
    nxt = env.transition_table.tolist()
    n, A = env.n_states, env.n_actions
    # tiny random initial values break argmax ties without favoring an action
    q_arr = rng.uniform(0.0, 1e-6, size=(n, A))
    q_arr[task.goal] = 0.0
    q = q_arr.tolist()
    starts = np.delete(np.arange(n), task.goal)

    draws = rng.random(p.n_steps).tolist()
    rand_a = rng.integers(0, A, size=p.n_steps).tolist()
    start_draws = starts[rng.integers(0, len(starts), size=p.n_steps + 1)].tolist()
    goal, gamma, lr, eps, T = task.goal, p.gamma, p.lr, p.epsilon, p.episode_len
    steps_out, succ_out = [], []
    s = start_draws[0]
    n_starts = 1
    t_ep = 0
    for step in range(p.n_steps):
        qs = q[s]
        if draws[step] < eps:
            a = rand_a[step]
        else:
            a = max(range(A), key=qs.__getitem__)
        s2 = nxt[s][a]
        r = reward[s2]
        if s2 == goal:
            target = r
        else:
            target = r + gamma * max(q[s2])
        qs[a] += lr * (target - qs[a])
        t_ep += 1
        if s2 == goal or t_ep >= T:
            s = start_draws[n_starts]
            n_starts += 1
            t_ep = 0
        else:
            s = s2
        if (step + 1) % p.eval_every == 0:
            steps_out.append(step + 1)
            succ_out.append(success_rate(env, np.array(q), goal, T))
    return SuccessCurve(steps=np.array(steps_out), success=np.array(succ_out))


def default_goals(env: GridEnv) -> list[int]:
    """Goal cells marked in the map, else free cells nearest three corners and the center."""
    if env.goal_cells:
        return env.goal_states()
    h, w = env.walls.shape
    anchors = [(w - 1, 0), (0, h - 1), (w - 1, h - 1), ((w - 1) / 2, (h - 1) / 2)]
    cells = env.free_cells.astype(float)
    goals = []
    for ax, ay in anchors:
        d = np.hypot(cells[:, 0] - ax, cells[:, 1] - ay)
        goals.append(int(np.argmin(d)))
    return goals


@dataclass(frozen=True)
class ShapingSetting:
    """One compared configuration: a shaping mode applied to a named representation."""

    mode: str
    rep: str | None = None
    dim: int | None = None

    @property
    def label(self) -> str:
        base = f"per_dim{self.dim}" if self.mode == "per_dim" else self.mode
        return base if self.rep is None else f"{base}:{self.rep}"


def compare_modes(
    env: GridEnv,
    reps: dict,
    settings: list[ShapingSetting],
    goals=None,
    seeds=(0, 1),
    params: ShapingParams | None = None,
    curve_dir: str | Path | None = None,
) -> dict[str, float]:
    """Mean AUC per setting over ``goals x seeds``; optionally writes every curve.

    ``reps`` maps representation names to per-state tables.
    """
    goals = default_goals(env) if goals is None else list(goals)
    out = {}
    for st in settings:
        F = reps[st.rep] if st.rep is not None else None
        aucs = []
        for goal in goals:
            task = ShapingTask(env, goal, st.mode, st.dim)
            for seed in seeds:
                curve = train_agent(task, F, params, seed=seed)
                aucs.append(curve.auc)
                if curve_dir is not None:
                    name = st.label.replace(":", "_")
                    write_curve(curve, Path(curve_dir) / f"curve_{name}_{goal}_{seed}.csv")
        out[st.label] = float(np.mean(aucs))
    return out


def write_curve(curve: SuccessCurve, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "success_rate"])
        for s, v in zip(curve.steps.tolist(), curve.success.tolist()):
            w.writerow([s, "%.17g" % v])

"""Eigen-options: one option per representation dimension and direction.

Options are learned with tabular Q-learning at ``gamma = 0`` on the intrinsic
reward ``direction * (f_i(s') - f_i(s))`` and terminate where no neighbor
strictly improves the signed ``f_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .envs.grid import GridEnv, room_labels


@dataclass(frozen=True)
class OptionParams:
    n_steps: int = 100000
    episode_len: int = 50
    lr: float = 0.5

    def __post_init__(self):
        if self.n_steps < 0 or self.episode_len <= 0:
            raise ValueError("n_steps must be non-negative and episode_len positive")
        if not 0.0 < self.lr <= 1.0:
            raise ValueError("tabular learning rate must lie in (0, 1]")


@dataclass(frozen=True, eq=False)
class Option:
    dim: int  # 1-based
    direction: int
    q: np.ndarray  # (n_states, n_actions)
    termination: np.ndarray  # (n_states,) bool

    @property
    def policy(self) -> np.ndarray:
        """Greedy action per state (lowest index on ties)."""
        return np.argmax(self.q, axis=1)


def _column(F, dim: int) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    if F.ndim != 2:
        raise ValueError("representation must be a (n_states, d) table")
    if dim == 1:
        raise ValueError("dimension 1 is constant and cannot provide an informative intrinsic reward")
    if not 2 <= dim <= F.shape[1]:
        raise ValueError(f"dim must lie in [2, {F.shape[1]}]")
    return F[:, dim - 1]


def _check_direction(direction: int) -> int:
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    return int(direction)


def intrinsic_reward(F, dim: int, direction: int, s, s_next):
    """``direction * (f_dim(s') - f_dim(s))`` for a per-state table ``F``."""
    f = _column(F, dim)
    return _check_direction(direction) * (f[s_next] - f[s])


def reward_table(env: GridEnv, F, dim: int, direction: int) -> np.ndarray:
    """One-step intrinsic reward for every ``(s, a)``; the optimal ``Q`` at ``gamma = 0``."""
    f = _column(F, dim)
    return _check_direction(direction) * (f[env.transition_table] - f[:, None])


def termination_set(env: GridEnv, F, dim: int, direction: int) -> np.ndarray:
    """States where no neighbor strictly increases ``direction * f_dim``."""
    g = _check_direction(direction) * _column(F, dim)
    return np.all(g[env.transition_table] <= g[:, None], axis=1)


def learn_option(env: GridEnv, F, dim: int, direction: int, hp: OptionParams | None = None, seed=None) -> Option:
    """Tabular ``gamma = 0`` Q-learning under a uniformly random behavior policy.

    With deterministic dynamics and ``gamma = 0`` each ``(s, a)`` entry only
    ever sees the same target, so after ``k`` visits
    ``Q = r * (1 - (1 - lr)**k)`` from a zero start; the visit counts of the
    simulated behavior trajectories give the result of running the updates
    one by one.
    """
    hp = hp or OptionParams()
    r = reward_table(env, F, dim, direction)
    counts = visit_counts(env, hp, np.random.default_rng(seed))
    q = r * (1.0 - (1.0 - hp.lr) ** counts)
    return Option(dim=dim, direction=direction, q=q, termination=termination_set(env, F, dim, direction))


def visit_counts(env: GridEnv, hp: OptionParams, rng: np.random.Generator) -> np.ndarray:
    """``(n_states, n_actions)`` visit counts of ``hp.n_steps`` random-policy steps
    split into episodes of ``hp.episode_len`` with uniform random starts."""
    n_full, rest = divmod(hp.n_steps, hp.episode_len)
    n_ep = n_full + (rest > 0)
    s = rng.integers(0, env.n_states, size=n_ep)
    actions = rng.integers(0, env.n_actions, size=(n_ep, hp.episode_len))
    size = env.n_states * env.n_actions
    counts = np.zeros(size, dtype=np.int64)
    for t in range(hp.episode_len):
        a = actions[:, t]
        keys = s * env.n_actions + a
        if rest and t >= rest:
            keys = keys[:n_full]
        counts += np.bincount(keys, minlength=size)
        s = env.transition_table[s, a]
    return counts.reshape(env.n_states, env.n_actions)


def q_learning_reference(env: GridEnv, F, dim: int, direction: int, hp: OptionParams, seed=None) -> np.ndarray:
    """Plain sequential ``gamma = 0`` updates over the same behavior data as ``learn_option``."""
    rng = np.random.default_rng(seed)
    r = reward_table(env, F, dim, direction)
    n_full, rest = divmod(hp.n_steps, hp.episode_len)
    n_ep = n_full + (rest > 0)
    s = rng.integers(0, env.n_states, size=n_ep)
    actions = rng.integers(0, env.n_actions, size=(n_ep, hp.episode_len))
    traj = np.empty((n_ep, hp.episode_len), dtype=np.int64)
    for t in range(hp.episode_len):
        traj[:, t] = s
        s = env.transition_table[s, actions[:, t]]
    q = np.zeros_like(r)
    for e in range(n_ep):
        for t in range(hp.episode_len if e < n_full else rest):
            si, a = traj[e, t], actions[e, t]
            q[si, a] += hp.lr * (r[si, a] - q[si, a])
    return q


def option_paths(env: GridEnv, opt: Option, cap: int | None = None) -> tuple[np.ndarray, np.ndarray, bool]:
    """Run the greedy option from every state.

    Returns ``(path, length, capped)`` where ``path[s, t]`` is the state after
    ``t`` primitive steps (padded with the final state) and ``length[s]`` the
    number of steps to termination, or ``cap`` for states that never terminate.
    """
    cap = 4 * env.n_states if cap is None else cap
    nxt = env.transition_table[np.arange(env.n_states), opt.policy]
    path = np.empty((env.n_states, cap + 1), dtype=np.int64)
    path[:, 0] = np.arange(env.n_states)
    length = np.full(env.n_states, cap, dtype=np.int64)
    done = opt.termination.copy()
    length[done] = 0
    cur = path[:, 0].copy()
    for t in range(1, cap + 1):
        cur = np.where(done, cur, nxt[cur])
        path[:, t] = cur
        arrived = ~done & opt.termination[cur]
        length[arrived] = t
        done |= arrived
        if done.all():
            path[:, t + 1 :] = cur[:, None]
            break
    return path, length, not done.all()


def trajectory_lengths(env: GridEnv, opt: Option, cap: int | None = None) -> np.ndarray:
    return option_paths(env, opt, cap)[1]


def avg_trajectory_length(env: GridEnv, opt: Option, cap: int | None = None) -> float:
    """Mean steps to termination over all start states (non-terminating runs count as ``cap``)."""
    return float(trajectory_lengths(env, opt, cap).mean())


def learn_options(env: GridEnv, F, dims=None, hp: OptionParams | None = None, seed=None) -> list[Option]:
    """Both directions for each dimension in ``dims`` (default ``2..d``)."""
    F = np.asarray(F, dtype=float)
    dims = range(2, F.shape[1] + 1) if dims is None else dims
    rng = np.random.default_rng(seed)
    out = []
    for dim in dims:
        for direction in (1, -1):
            out.append(learn_option(env, F, dim, direction, hp, seed=rng.integers(2**63 - 1)))
    return out


def per_dimension_lengths(env: GridEnv, options: list[Option], cap: int | None = None) -> dict[int, float]:
    """Average trajectory length per dimension, averaged over its two directions."""
    out: dict[int, list[float]] = {}
    for opt in options:
        out.setdefault(opt.dim, []).append(avg_trajectory_length(env, opt, cap))
    return {dim: float(np.mean(v)) for dim, v in sorted(out.items())}


def room_navigation_steps(
    env: GridEnv,
    options: list[Option],
    n_trajectories: int = 50,
    max_steps: int = 20000,
    labels: np.ndarray | None = None,
    seed=None,
) -> np.ndarray:
    """Symmetrized matrix of average primitive steps between rooms.

    Agents start from every state of room ``i`` (``n_trajectories`` each) and
    pick uniformly among the 4 primitive actions and the options that can
    start in the current state (any non-terminal state). An option runs to
    termination and every primitive step counts; arrival in room ``j`` is
    detected at the first primitive step inside it, including mid-option.
    Runs that have not arrived after ``max_steps`` count as ``max_steps``.
    Returns ``N[i-1, j-1] = (N_{i->j} + N_{j->i}) / 2``.
    """
    labels = room_labels(env) if labels is None else np.asarray(labels)
    n_rooms = int(labels.max())
    rng = np.random.default_rng(seed)
    n, A = env.n_states, env.n_actions
    K = len(options)

    # per option: end state, length and the first step at which each room is entered
    ends = np.empty((K, n), dtype=np.int64)
    lens = np.empty((K, n), dtype=np.int64)
    first = np.full((K, n, n_rooms + 1), -1, dtype=np.int64)
    avail = np.empty((K, n), dtype=bool)
    for k, opt in enumerate(options):
        path, length, _ = option_paths(env, opt)
        ends[k] = path[np.arange(n), length]
        lens[k] = length
        avail[k] = ~opt.termination
        steps = np.arange(path.shape[1])
        room_path = labels[path]
        for room in range(1, n_rooms + 1):
            hit = (room_path == room) & (steps[None, :] >= 1) & (steps[None, :] <= length[:, None])
            has = hit.any(axis=1)
            first[k, has, room] = hit[has].argmax(axis=1)

    starts = np.flatnonzero(labels > 0)
    walker_start = np.repeat(starts, n_trajectories)
    W = len(walker_start)
    cur = walker_start.copy()
    t = np.zeros(W, dtype=np.int64)
    hit_time = np.full((W, n_rooms + 1), -1, dtype=np.int64)
    hit_time[np.arange(W), labels[cur]] = 0
    hit_time[:, 0] = 0
    live = np.arange(W)
    n_choices = A + avail.sum(axis=0)  # per state
    avail_idx = [np.flatnonzero(avail[:, s]) for s in range(n)]
    opt_table = np.full((n, K), -1, dtype=np.int64)
    for s in range(n):
        opt_table[s, : len(avail_idx[s])] = avail_idx[s]

    while live.size:
        s = cur[live]
        choice = (rng.random(live.size) * n_choices[s]).astype(np.int64)
        prim = choice < A
        new = np.empty(live.size, dtype=np.int64)
        dt = np.ones(live.size, dtype=np.int64)
        new[prim] = env.transition_table[s[prim], choice[prim]]
        # arrivals after a primitive step
        p_live = live[prim]
        room = labels[new[prim]]
        fresh = hit_time[p_live, room] < 0
        hit_time[p_live[fresh], room[fresh]] = t[p_live[fresh]] + 1
        # options
        o_mask = ~prim
        if o_mask.any():
            so = s[o_mask]
            k = opt_table[so, choice[o_mask] - A]
            o_live = live[o_mask]
            offs = first[k, so]  # (m, n_rooms + 1)
            base = t[o_live][:, None]
            unseen = (hit_time[o_live] < 0) & (offs >= 0)
            r_idx, c_idx = np.nonzero(unseen)
            hit_time[o_live[r_idx], c_idx] = base[r_idx, 0] + offs[r_idx, c_idx]
            new[o_mask] = ends[k, so]
            dt[o_mask] = lens[k, so]
        cur[live] = new
        t[live] += dt
        finished = (hit_time[live, 1:] >= 0).all(axis=1) | (t[live] >= max_steps)
        live = live[~finished]

    hit = np.where(hit_time[:, 1:] < 0, max_steps, np.minimum(hit_time[:, 1:], max_steps)).astype(float)
    start_room = labels[walker_start]
    directed = np.zeros((n_rooms, n_rooms))
    for i in range(1, n_rooms + 1):
        directed[i - 1] = hit[start_room == i].mean(axis=0)
    return 0.5 * (directed + directed.T)


def far_pair_mean(N: np.ndarray, min_gap: int = 8) -> float:
    """Mean of ``N[i, j]`` over room pairs with ``|i - j| >= min_gap``."""
    i, j = np.indices(N.shape)
    return float(N[np.abs(i - j) >= min_gap].mean())

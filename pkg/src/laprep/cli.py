"""Command-line entry point: ``laprep <subcommand> [flags]``.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
Outputs go to ``--out-dir``, defaulting to ``$LAPREP_OUT/<subcommand>``
(``./laprep_out/<subcommand>`` when the variable is unset).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .eigen import EigenError, EigenPairs, check_distinct_eigvals, eig_sym, write_eigenpairs_csv
from .envs import GridEnv, MapError, load_map_file, make_env
from .envs.point import ground_truth_eigenfunctions, query_gt, write_eigenfunction_csv
from .estimator import NumericalError, TrainConfig, evaluation_states, train
from .graph import GraphError, laplacian, write_edge_list
from .io import ConfigError, ExperimentConfig, read_dataset, read_table, write_dataset, write_run_config, write_table
from .metrics import cell_image, export_heatmap, grid_image, sim_gt, sim_run_matrix, span_projection_error
from .models import load_params, save_params
from .options import OptionParams, learn_options, option_paths, room_navigation_steps
from .shaping import ShapingParams, ShapingSetting, compare_modes, default_goals, scaled_ground_truth
from .verify import verify_theorem

logger = logging.getLogger("laprep")

N_EVAL_POINTS = 2000


def _out_dir(args, name: str) -> Path:
    if args.out_dir:
        out = Path(args.out_dir)
    else:
        out = Path(os.environ.get("LAPREP_OUT", "laprep_out")) / name
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config(args) -> ExperimentConfig:
    return ExperimentConfig.load(args.config) if getattr(args, "config", None) else ExperimentConfig()


def _pick(flag, section: dict, key: str, default):
    """Explicit flag, then config file value, then default."""
    if flag is not None:
        return flag
    return section.get(key, default)


def _load_env(name: str | None, cfg: ExperimentConfig):
    env_cfg = cfg.section("env")
    if env_cfg.get("map"):
        return load_map_file(env_cfg["map"])
    name = name or env_cfg.get("name")
    if not name:
        raise ConfigError("no environment given (use --env or env.name)")
    return make_env(name)


def _env_kind(env) -> str:
    return "grid" if isinstance(env, GridEnv) else "point"


def _ground_truth(env, d: int, h: float = 0.5):
    """Per-state unit-norm eigenvectors (grid) or the eigenfunction grid (point)."""
    if isinstance(env, GridEnv):
        return eig_sym(laplacian(env.graph()), d, method="auto")
    return ground_truth_eigenfunctions(env, h=h, d=d)


# ---------------------------------------------------------------- subcommands


def cmd_collect(args) -> int:
    cfg = _config(args)
    env = _load_env(args.env, cfg)
    tc = cfg.section("train")
    kind = _env_kind(env)
    n = _pick(args.n_transitions, tc, "n_transitions", 100000)
    ep = _pick(args.episode_len, tc, "episode_len", 50 if kind == "grid" else 500)
    disc = _pick(args.discount, tc, "discount", 0.9)
    ds = env.collect(n, ep, disc, seed=args.seed)
    out = _out_dir(args, "collect")
    write_dataset(ds, out)
    print(f"wrote {len(ds)} transitions to {out}")
    return 0


def cmd_eigen(args) -> int:
    cfg = _config(args)
    env = _load_env(args.env, cfg)
    out = _out_dir(args, "eigen")
    if isinstance(env, GridEnv):
        g = env.graph()
        pairs = eig_sym(laplacian(g), args.d, method=args.method)
        write_eigenpairs_csv(pairs, out / "eigenpairs.csv")
        write_edge_list(g, out / "edges.txt")
        lam = pairs.eigenvalues
    else:
        h = _pick(args.h, cfg.section("env"), "h", 0.5)
        grid = ground_truth_eigenfunctions(env, h=h, d=args.d, method=args.method)
        write_eigenfunction_csv(grid, out / "eigenfunctions.csv")
        write_table(out / "eigenvalues.csv", ["index", "lambda"], ((k + 1, float(v)) for k, v in enumerate(grid.eigenvalues)))
        pairs = EigenPairs(grid.eigenvalues, grid.values)
        lam = grid.eigenvalues
    distinct, gap = check_distinct_eigvals(pairs)
    print("lambda:", " ".join("%.6g" % v for v in lam))
    print(f"distinct={str(distinct).lower()} min_gap={gap:.6g}")
    return 0


def _train_config(args, cfg: ExperimentConfig, kind: str) -> TrainConfig:
    tc = cfg.section("train")
    kw = {}
    for flag, key in (
        ("d", "d"), ("iters", "iterations"), ("batch", "batch_size"), ("lr", "lr"), ("beta", "beta"),
        ("coeffs", "coeffs"), ("backend", "backend"), ("penalty", "penalty"), ("hidden", "hidden"),
        ("checkpoint_every", "checkpoint_every"), ("n_transitions", "n_transitions"),
        ("episode_len", "episode_len"), ("discount", "discount"),
    ):
        v = getattr(args, flag, None)
        if v is not None:
            kw[key] = tuple(v) if key == "hidden" else v
        elif key in tc:
            kw[key] = tc[key]
    kw["seed"] = args.seed
    if kind == "point":
        kw.setdefault("backend", "mlp")
        kw.setdefault("episode_len", 500)
    return TrainConfig.desk(**kw)


def cmd_train(args) -> int:
    cfg = _config(args)
    env = _load_env(args.env, cfg)
    kind = _env_kind(env)
    tc = _train_config(args, cfg, kind)
    if args.data:
        ds = read_dataset(args.data, tc.episode_len, tc.discount)
    else:
        ds = env.collect(tc.n_transitions, tc.episode_len, tc.discount, seed=tc.seed)
    est = train(env, ds, tc)
    out = _out_dir(args, "train")
    write_run_config(tc, env.name, out / "run.cfg")
    save_params(est.model_, out / "params.csv")
    write_table(out / "log.csv", ["iter", "attraction", "penalty", "total"],
                ([int(r[0]), float(r[1]), float(r[2]), float(r[3])] for r in est.log_))
    ckdir = out / "checkpoints"
    ckdir.mkdir(exist_ok=True)
    final = est.model_.params.copy()
    for it, params in est.checkpoints_:
        est.model_.params[...] = params
        save_params(est.model_, ckdir / f"params_{it:08d}.csv")
    est.model_.params[...] = final
    X = evaluation_states(env, tc.backend, N_EVAL_POINTS, seed=0)
    F = est.transform(X)
    _write_repr_table(env, F, out / "repr_table.csv")
    last = est.log_[-1]
    print(f"trained {tc.backend} {tc.coeffs} seed={tc.seed}: attraction={last[1]:.6g} penalty={last[2]:.6g}")
    return 0


def _positions(env, n: int = N_EVAL_POINTS) -> np.ndarray:
    """States at which representations are tabulated: cell coordinates or sampled positions."""
    if isinstance(env, GridEnv):
        return env.free_cells.astype(float)
    return env.sample_free(n, 0)


def _write_repr_table(env, F: np.ndarray, path: Path) -> None:
    pos = _positions(env, len(F))
    d = F.shape[1]
    if isinstance(env, GridEnv):
        header = ["state", "x", "y"] + [f"f{k + 1}" for k in range(d)]
        rows = ([s, int(pos[s, 0]), int(pos[s, 1])] + F[s].tolist() for s in range(len(F)))
    else:
        header = ["x", "y"] + [f"f{k + 1}" for k in range(d)]
        rows = (pos[i].tolist() + F[i].tolist() for i in range(len(F)))
    write_table(path, header, rows)


def _read_run(run: Path) -> tuple[ExperimentConfig, np.ndarray]:
    cfg_path = run / "run.cfg"
    if not cfg_path.is_file():
        raise ConfigError(f"{run} is not a training run directory (missing run.cfg)")
    rc = ExperimentConfig.load(cfg_path)
    header, table = read_table(run / "repr_table.csv")
    cols = [i for i, h in enumerate(header) if h.startswith("f")]
    return rc, table[:, cols]


def _gt_table(env, d: int, h: float) -> np.ndarray:
    if isinstance(env, GridEnv):
        return _ground_truth(env, d).eigenvectors
    return query_gt(_ground_truth(env, d, h), _positions(env))


def cmd_eval(args) -> int:
    runs = [Path(r) for r in args.runs]
    loaded = [_read_run(r) for r in runs]
    env_names = {rc.section("env").get("name") for rc, _ in loaded}
    if len(env_names) != 1:
        raise ConfigError(f"runs come from different environments: {sorted(map(str, env_names))}")
    env = make_env(env_names.pop())
    tables = [F for _, F in loaded]
    d = tables[0].shape[1]
    GT = _gt_table(env, d, args.h)
    out = _out_dir(args, "eval")
    rows, means = [], []
    for run, F in zip(runs, tables):
        mean, per_dim = sim_gt(F, GT)
        means.append(mean)
        rows.append([run.name] + per_dim.tolist() + [mean])
    rows.append(["average"] + np.mean([r[1:-1] for r in rows], axis=0).tolist() + [float(np.mean(means))])
    write_table(out / "simgt.csv", ["run"] + [f"dim{k + 1}" for k in range(d)] + ["mean"], rows)
    print("simgt " + " ".join(f"{r.name}={m:.4f}" for r, m in zip(runs, means)) + f" average={np.mean(means):.4f}")
    if args.simrun:
        M = sim_run_matrix(tables)
        write_table(out / "simrun.csv", ["run"] + [r.name for r in runs],
                    ([r.name] + M[i].tolist() for i, r in enumerate(runs)))
        if len(runs) > 1:
            print("simrun min off-diagonal %.4f" % M[~np.eye(len(runs), dtype=bool)].min())
    if args.span and isinstance(env, GridEnv):
        _span_trace(env, runs[0], GT, out / "span.csv")
    if args.heatmaps:
        F, grid = _heatmap_tables(env, runs[0], d, args.h)
        _write_heatmaps(env, F, grid, range(1, d + 1), out)
    return 0


def _span_trace(env, run: Path, GT: np.ndarray, path: Path) -> None:
    X = np.arange(env.n_states)
    rows = []
    for ck in sorted((run / "checkpoints").glob("params_*.csv")):
        rep = load_params(ck)
        F = rep.forward(X if rep.backend == "table" else env.observe(X))
        rows.append([int(ck.stem.split("_")[1])] + span_projection_error(F, GT).tolist())
    write_table(path, ["iter"] + [f"dim{k + 1}" for k in range(GT.shape[1])], rows)


def _heatmap_tables(env, run: Path | None, d: int, h: float):
    """Values to draw: ``(F, grid)`` with one row per free state (grid envs) or
    per discretization cell (point envs, where ``grid`` is the cell layout)."""
    grid = None if isinstance(env, GridEnv) else _ground_truth(env, d, h)
    if run is None:
        return (_ground_truth(env, d).eigenvectors if grid is None else grid.values), grid
    rep = load_params(run / "params.csv")
    if grid is None:
        X = np.arange(env.n_states)
        return rep.forward(X if rep.backend == "table" else env.observe(X)), None
    return rep.forward(env.observe(grid.centers())), grid


def _write_heatmaps(env, F: np.ndarray, grid, dims, out: Path) -> None:
    d = F.shape[1]
    for dim in dims:
        if not 1 <= dim <= d:
            raise ConfigError(f"dimension {dim} out of range 1..{d}")
        img = grid_image(env, F[:, dim - 1]) if grid is None else cell_image(grid, F[:, dim - 1])
        export_heatmap(img, out / f"dim_{dim}")


def cmd_export(args) -> int:
    cfg = _config(args)
    out = _out_dir(args, "export")
    if args.run:
        run = Path(args.run)
        rc, F = _read_run(run)
        env = make_env(rc.section("env")["name"])
        d = F.shape[1]
    else:
        env, run, d = _load_env(args.env, cfg), None, args.d
    F, grid = _heatmap_tables(env, run, d, args.h)
    dims = args.dims or list(range(1, F.shape[1] + 1))
    _write_heatmaps(env, F, grid, dims, out)
    print(f"wrote {len(dims)} heatmaps to {out}")
    return 0


def _representation(src: str, env, d: int) -> np.ndarray:
    """``gt`` (eigenvectors scaled to unit RMS) or a training run directory."""
    if src == "gt":
        return scaled_ground_truth(_ground_truth(env, d).eigenvectors)
    rc, F = _read_run(Path(src))
    if rc.section("env").get("name") != env.name:
        raise ConfigError(f"run {src} was trained on {rc.section('env').get('name')}, not {env.name}")
    return F


def cmd_options(args) -> int:
    cfg = _config(args)
    env = _load_env(args.env, cfg)
    if not isinstance(env, GridEnv):
        raise ConfigError("options need a grid environment")
    oc = cfg.section("options")
    hp = OptionParams(
        n_steps=_pick(args.n_steps, oc, "n_steps", 100000),
        episode_len=_pick(args.episode_len, oc, "episode_len", 50),
        lr=_pick(args.lr, oc, "lr", 0.5),
    )
    F = _representation(args.rep, env, args.d)
    opts = learn_options(env, F, hp=hp, seed=args.seed)
    out = _out_dir(args, "options")
    rows = []
    by_dim: dict[int, dict[int, float]] = {}
    for o in opts:
        by_dim.setdefault(o.dim, {})[o.direction] = float(option_paths(env, o)[1].mean())
    for dim, v in sorted(by_dim.items()):
        rows.append([dim, v[1], v[-1], 0.5 * (v[1] + v[-1])])
    write_table(out / "traj_len.csv", ["dim", "avg_len_pos", "avg_len_neg", "avg_len"], rows)
    names = [f"opt{o.dim}{'+' if o.direction > 0 else '-'}" for o in opts]
    write_table(out / "policies.csv", ["state", "x", "y"] + names,
                ([s, *env.cell(s)] + [int(o.policy[s]) if not o.termination[s] else -1 for o in opts]
                 for s in range(env.n_states)))
    print("avg trajectory length: " + " ".join(f"d{r[0]}={r[3]:.2f}" for r in rows))
    want_rooms = args.room_nav if args.room_nav is not None else env.name == "gridroom"
    if want_rooms:
        N = room_navigation_steps(
            env, opts,
            n_trajectories=_pick(args.n_trajectories, oc, "n_trajectories", 50),
            max_steps=oc.get("max_steps", 20000),
            seed=args.seed,
        )
        k = N.shape[0]
        write_table(out / "room_nav.csv", ["room"] + [str(j + 1) for j in range(k)],
                    ([i + 1] + N[i].tolist() for i in range(k)))
        i, j = np.indices(N.shape)
        print("room navigation mean over |i-j|>=8: %.2f" % N[np.abs(i - j) >= 8].mean())
    return 0


def _parse_setting(text: str) -> ShapingSetting:
    parts = text.split(":")
    mode = parts[0]
    if mode.startswith("per_dim"):
        if len(parts) != 3:
            raise ConfigError(f"per_dim settings look like per_dim:<rep>:<dim>, got {text!r}")
        return ShapingSetting("per_dim", parts[1], int(parts[2]))
    if mode in ("all_dims",):
        if len(parts) != 2:
            raise ConfigError(f"all_dims settings look like all_dims:<rep>, got {text!r}")
        return ShapingSetting("all_dims", parts[1])
    if mode in ("sparse", "raw_l2") and len(parts) == 1:
        return ShapingSetting(mode)
    raise ConfigError(f"cannot parse shaping setting {text!r}")


def cmd_shape(args) -> int:
    cfg = _config(args)
    env = _load_env(args.env, cfg)
    if not isinstance(env, GridEnv):
        raise ConfigError("shaping needs a grid environment")
    sc = cfg.section("shape")
    params = ShapingParams(**{k: sc[k] for k in ("n_steps", "episode_len", "gamma", "lr", "epsilon", "eval_every") if k in sc})
    if args.n_steps is not None:
        params = ShapingParams(**{**params.__dict__, "n_steps": args.n_steps})
    reps = {}
    for item in args.rep or []:
        name, sep, src = item.partition("=")
        if not sep:
            raise ConfigError(f"--rep expects NAME=SOURCE, got {item!r}")
        reps[name] = _representation(src, env, args.d)
    settings = [_parse_setting(s) for s in (args.setting or ["sparse"])]
    for st in settings:
        if st.rep is not None and st.rep not in reps:
            raise ConfigError(f"setting {st.label} refers to unknown representation {st.rep!r}")
    goals = args.goals
    if goals is None and "goals" in sc:
        goals = [int(g) for g in sc["goals"].replace(",", " ").split()]
    goals = default_goals(env) if goals is None else goals
    seeds = args.seeds
    if seeds is None:
        seeds = [int(s) for s in sc.get("seeds", str(args.seed)).replace(",", " ").split()]
    out = _out_dir(args, "shape")
    summary = compare_modes(env, reps, settings, goals=goals, seeds=seeds, params=params, curve_dir=out)
    write_table(out / "summary.csv", ["setting", "auc"], ([k, v] for k, v in summary.items()))
    for k, v in summary.items():
        print(f"{k}: auc={v:.4f}")
    return 0


def cmd_verify(args) -> int:
    rep = verify_theorem(args.graph, args.d, args.coeffs, n_rotations=args.rotations, seed=args.seed)
    out = _out_dir(args, "verify-theorem")
    write_table(out / "theorem.csv", ["key", "value"], rep.rows())
    for k, v in rep.rows():
        print(f"{k}: {v}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="laprep", description="Laplacian representation learning toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, env=True):
        if env:
            sp.add_argument("--env", help="gridroom, gridmaze, pointroom or pointmaze")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out-dir")
        sp.add_argument("--config", help="key=value experiment config file")

    sp = sub.add_parser("collect", help="sample a random-walk transition dataset")
    common(sp)
    sp.add_argument("--n-transitions", type=int)
    sp.add_argument("--episode-len", type=int)
    sp.add_argument("--discount", type=float)
    sp.set_defaults(func=cmd_collect)

    sp = sub.add_parser("eigen", help="exact Laplacian eigenpairs")
    common(sp)
    sp.add_argument("--d", type=int, default=10)
    sp.add_argument("--h", type=float, help="cell size for point environments")
    sp.add_argument("--method", default="auto", choices=["auto", "jacobi", "lapack"])
    sp.set_defaults(func=cmd_eigen)

    sp = sub.add_parser("train", help="learn a representation")
    common(sp)
    sp.add_argument("--backend", choices=["table", "mlp"])
    sp.add_argument("--coeffs")
    sp.add_argument("--d", type=int)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--batch", type=int)
    sp.add_argument("--lr", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--penalty", choices=["cross", "paired"])
    sp.add_argument("--hidden", type=int, nargs="+")
    sp.add_argument("--checkpoint-every", type=int)
    sp.add_argument("--n-transitions", type=int)
    sp.add_argument("--episode-len", type=int)
    sp.add_argument("--discount", type=float)
    sp.add_argument("--data", help="dataset directory written by collect")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("eval", help="similarity to ground truth and across runs")
    common(sp, env=False)
    sp.add_argument("--runs", nargs="+", required=True)
    sp.add_argument("--simrun", action="store_true")
    sp.add_argument("--span", action="store_true", help="span projection error over checkpoints of the first run")
    sp.add_argument("--heatmaps", action="store_true")
    sp.add_argument("--h", type=float, default=0.5)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("options", help="learn eigen-options and evaluate them")
    common(sp)
    sp.add_argument("--rep", default="gt", help="'gt' or a training run directory")
    sp.add_argument("--d", type=int, default=10)
    sp.add_argument("--n-steps", type=int)
    sp.add_argument("--episode-len", type=int)
    sp.add_argument("--lr", type=float)
    sp.add_argument("--n-trajectories", type=int)
    sp.add_argument("--room-nav", action=argparse.BooleanOptionalAction, default=None)
    sp.set_defaults(func=cmd_options)

    sp = sub.add_parser("shape", help="reward-shaped goal reaching")
    common(sp)
    sp.add_argument("--rep", action="append", help="NAME=gt or NAME=<run dir>; repeatable")
    sp.add_argument("--setting", action="append",
                    help="sparse | raw_l2 | all_dims:<rep> | per_dim:<rep>:<dim>; repeatable")
    sp.add_argument("--goals", type=int, nargs="+")
    sp.add_argument("--seeds", type=int, nargs="+")
    sp.add_argument("--d", type=int, default=10)
    sp.add_argument("--n-steps", type=int)
    sp.set_defaults(func=cmd_shape)

    sp = sub.add_parser("export", help="heatmaps of a run or of the ground truth")
    common(sp)
    sp.add_argument("--run")
    sp.add_argument("--dims", type=int, nargs="+")
    sp.add_argument("--d", type=int, default=10)
    sp.add_argument("--h", type=float, default=0.5)
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("verify-theorem", help="dense check of the unique-minimizer property")
    common(sp, env=False)
    sp.add_argument("--graph", default="path8")
    sp.add_argument("--d", type=int, default=4)
    sp.add_argument("--coeffs", default="default")
    sp.add_argument("--rotations", type=int, default=100)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (NumericalError, FloatingPointError) as exc:
        print(f"laprep: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, MapError, GraphError, EigenError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"laprep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Experiment configuration files and CSV formats shared by the CLI."""

from __future__ import annotations

import csv
from dataclasses import fields
from pathlib import Path

import numpy as np

from .envs.grid import TransitionDataset
from .estimator import TrainConfig
from .options import OptionParams
from .shaping import ShapingParams


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; the CLI maps it to exit code 2."""


ENV_KEYS = {"name": str, "map": str, "h": float}
OPTION_KEYS = {"n_trajectories": int, "max_steps": int}
SHAPE_KEYS = {"goals": str, "seeds": str}


def _field_types(cls) -> dict:
    return {f.name: f.type for f in fields(cls)}


def _coerce(raw: str, typ, key: str):
    typ = {"int": int, "float": float, "str": str, "tuple": tuple}.get(typ, typ)
    try:
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        if typ is tuple:
            return tuple(int(t) for t in raw.replace(",", " ").split())
        return raw
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {getattr(typ, '__name__', typ)}") from None


class ExperimentConfig:
    """``section.key=value`` settings for the ``env``, ``train``, ``options`` and ``shape`` sections.

    Blank lines and ``#`` comments are ignored; unknown keys, duplicate keys
    and references to missing files are rejected.
    """

    SECTIONS = {
        "env": ENV_KEYS,
        "train": _field_types(TrainConfig),
        "options": {**_field_types(OptionParams), **OPTION_KEYS},
        "shape": {**_field_types(ShapingParams), **SHAPE_KEYS},
    }

    def __init__(self, values: dict[str, dict] | None = None):
        self.values = {s: {} for s in self.SECTIONS}
        for section, kv in (values or {}).items():
            for k, v in kv.items():
                self.set(f"{section}.{k}", str(v))

    def set(self, key: str, raw: str) -> None:
        section, _, name = key.partition(".")
        if section not in self.SECTIONS or not name:
            raise ConfigError(f"unknown config key {key!r}; keys look like env.name or train.lr")
        types = self.SECTIONS[section]
        if name not in types:
            raise ConfigError(f"unknown config key {key!r}")
        value = _coerce(raw.strip(), types[name], key)
        if section == "env" and name == "map" and not Path(value).is_file():
            raise ConfigError(f"{key}: file {value!r} does not exist")
        self.values[section][name] = value

    @classmethod
    def parse(cls, text: str) -> "ExperimentConfig":
        cfg = cls()
        seen = set()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, raw = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
            key = key.strip()
            if key in seen:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            seen.add(key)
            cfg.set(key, raw)
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {str(path)!r} does not exist")
        return cls.parse(path.read_text())

    def section(self, name: str) -> dict:
        return dict(self.values[name])

    def dump(self) -> str:
        lines = []
        for section in self.SECTIONS:
            for k, v in sorted(self.values[section].items()):
                if isinstance(v, tuple):
                    v = ",".join(str(x) for x in v)
                lines.append(f"{section}.{k}={v}")
        return "\n".join(lines) + "\n"


def write_run_config(cfg: TrainConfig, env_name: str, path: str | Path) -> None:
    train = {k: ",".join(map(str, v)) if isinstance(v, tuple) else v for k, v in cfg.as_dict().items()}
    ec = ExperimentConfig({"env": {"name": env_name}, "train": train})
    Path(path).write_text(ec.dump())


def fmt(v) -> str:
    return "%.17g" % v


def write_table(path: str | Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def read_table(path: str | Path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path} does not exist")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(len(rows) - 1, len(rows[0]))
    return rows[0], data


def write_dataset(ds: TransitionDataset, out_dir: str | Path) -> None:
    """``transitions.csv`` (``s_idx,s_next_idx`` or ``x,y,x',y'``) plus ``state_pool.csv``."""
    out = Path(out_dir)
    if ds.states.ndim == 1:
        write_table(out / "transitions.csv", ["s_idx", "s_next_idx"], zip(ds.states.tolist(), ds.next_states.tolist()))
        write_table(out / "state_pool.csv", ["s_idx"], ([s] for s in ds.state_pool.tolist()))
    else:
        write_table(out / "transitions.csv", ["x", "y", "x'", "y'"], np.hstack([ds.states, ds.next_states]).tolist())
        write_table(out / "state_pool.csv", ["x", "y"], ds.state_pool.tolist())


def read_dataset(data_dir: str | Path, episode_len: int = 0, discount: float = 0.0) -> TransitionDataset:
    data_dir = Path(data_dir)
    header, T = read_table(data_dir / "transitions.csv")
    _, pool = read_table(data_dir / "state_pool.csv")
    if header == ["s_idx", "s_next_idx"]:
        T = T.astype(np.int64)
        return TransitionDataset(T[:, 0], T[:, 1], pool[:, 0].astype(np.int64), episode_len, discount)
    if len(header) != 4:
        raise ValueError(f"unrecognized transitions header {header}")
    return TransitionDataset(T[:, :2], T[:, 2:], pool, episode_len, discount)

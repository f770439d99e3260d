from .grid import (
    SHIPPED_GRID_MAPS,
    ACTIONS,
    GridEnv,
    MapError,
    TransitionDataset,
    load_map,
    load_map_file,
    make_grid_env,
    room_labels,
)
from .point import (
    SHIPPED_POINT_MAPS,
    EigenfunctionGrid,
    PointEnv,
    ground_truth_eigenfunctions,
    load_point_map,
    make_point_env,
    query_gt,
)


ENV_NAMES = SHIPPED_GRID_MAPS + SHIPPED_POINT_MAPS


def make_env(name: str):
    """One of the shipped environments by name."""
    if name in SHIPPED_GRID_MAPS:
        return make_grid_env(name)
    if name in SHIPPED_POINT_MAPS:
        return make_point_env(name)
    raise MapError(f"unknown environment {name!r}; choose from {ENV_NAMES}")


__all__ = [
    "ACTIONS",
    "ENV_NAMES",
    "EigenfunctionGrid",
    "GridEnv",
    "MapError",
    "PointEnv",
    "TransitionDataset",
    "ground_truth_eigenfunctions",
    "load_map",
    "load_map_file",
    "load_point_map",
    "make_env",
    "make_grid_env",
    "make_point_env",
    "query_gt",
    "room_labels",
]

"""Laplacian representations learned with a generalized graph drawing objective.

The main entry points are :class:`LaplacianRepresentation` (an sklearn-style
transformer), the grid and point environments in :mod:`laprep.envs`, and the
``laprep`` command-line tool.
"""

from .eigen import EigenPairs, check_distinct_eigvals, eig_sym, ground_truth_representation
from .envs import GridEnv, PointEnv, ground_truth_eigenfunctions, make_env, query_gt, room_labels
from .estimator import LaplacianRepresentation, NumericalError, TrainConfig, train
from .graph import StateGraph, build_graph, laplacian
from .metrics import sim_gt, sim_run, span_projection_error
from .objective import exact_objective, make_coefficients, total_loss
from .options import OptionParams, avg_trajectory_length, learn_options, room_navigation_steps
from .shaping import ShapingParams, ShapingTask, train_agent
from .verify import verify_theorem

__version__ = "0.1.0"

__all__ = [
    "EigenPairs",
    "GridEnv",
    "LaplacianRepresentation",
    "NumericalError",
    "OptionParams",
    "PointEnv",
    "ShapingParams",
    "ShapingTask",
    "StateGraph",
    "TrainConfig",
    "avg_trajectory_length",
    "build_graph",
    "check_distinct_eigvals",
    "eig_sym",
    "exact_objective",
    "ground_truth_eigenfunctions",
    "ground_truth_representation",
    "laplacian",
    "learn_options",
    "make_coefficients",
    "make_env",
    "query_gt",
    "room_labels",
    "room_navigation_steps",
    "sim_gt",
    "sim_run",
    "span_projection_error",
    "total_loss",
    "train",
    "train_agent",
    "verify_theorem",
]

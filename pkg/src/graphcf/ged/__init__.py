"""Graph edit distance: exact search, bipartite approximation, edit paths."""

from .bipartite import GedResult, GraphView, bipartite_ged, build_cost_matrix
from .exact import ExactSizeError, GedLimits, GedTimeoutError, exact_ged
from .matrix import GedMatrix, ged_matrix, load_matrix, matrix_to_csv, save_matrix
from .paths import (
    EditOp,
    EditPath,
    PathInconsistencyError,
    apply_path,
    invert_path,
    path_from_json,
    path_to_dot,
    path_to_json,
)

__all__ = [
    "GedResult", "GraphView", "bipartite_ged", "build_cost_matrix",
    "ExactSizeError", "GedLimits", "GedTimeoutError", "exact_ged",
    "GedMatrix", "ged_matrix", "load_matrix", "matrix_to_csv", "save_matrix",
    "EditOp", "EditPath", "PathInconsistencyError", "apply_path",
    "invert_path", "path_from_json", "path_to_dot", "path_to_json",
]

"""Linear sum assignment front end.

Selects the compiled kernel at import when it is built, otherwise the pure
Python solver; GRAPHCF_PURE_LSAP=1 forces the fallback (used by the benchmark
and the implementation-equivalence tests).
"""

import os

import numpy as np

from . import _lsap_py

# Finite stand-in for forbidden assignments; must exceed any feasible edit
# path cost while leaving enough float precision for real cost differences.
BIG = 1e12

if os.environ.get("GRAPHCF_PURE_LSAP"):
    _impl = _lsap_py
    IMPLEMENTATION = "python"
else:
    try:
        from . import _lsap_c as _impl

        IMPLEMENTATION = "cython"
    except ImportError:
        _impl = _lsap_py
        IMPLEMENTATION = "python"


def solve(cost):
    """Solve the square assignment problem.

    Returns (col_for_row, total): the column index assigned to each row and
    the summed cost. Deterministic: rows augmented in index order, distance
    ties resolved toward free columns, then the lowest column index.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError("cost matrix must be square")
    n = cost.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64), 0.0
    assignment = _impl.solve(cost)
    total = float(cost[np.arange(n), assignment].sum())
    return assignment, total

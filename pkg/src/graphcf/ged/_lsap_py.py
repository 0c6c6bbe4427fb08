"""Pure-Python linear sum assignment (shortest augmenting path with potentials).

Reference implementation for the compiled kernel in _lsap_c.pyx; both must
produce identical assignments, including tie handling: rows are augmented in
index order, and when reduced distances tie, a free column wins over an
occupied one, then the lowest column index wins.
"""

import numpy as np

_INF = float("inf")


def solve(cost):
    """Return the column assigned to each row as an int64 array.

    ``cost`` is a square, C-contiguous float64 matrix. Infeasible entries
    should be encoded as large finite sentinels by the caller.
    """
    n = cost.shape[0]
    rows = cost.tolist()
    u = [0.0] * n
    v = [0.0] * n
    col4row = [-1] * n
    row4col = [-1] * n

    for cur_row in range(n):
        d = [_INF] * n
        pred = [-1] * n
        scanned_col = [False] * n
        scanned_row = [False] * n
        i = cur_row
        min_val = 0.0
        sink = -1
        while sink == -1:
            scanned_row[i] = True
            row = rows[i]
            shift = min_val - u[i]
            best_j = -1
            best_d = _INF
            best_occupied = True
            for j in range(n):
                if scanned_col[j]:
                    continue
                r = shift + row[j] - v[j]
                if r < d[j]:
                    d[j] = r
                    pred[j] = i
                dj = d[j]
                free = row4col[j] < 0
                if dj < best_d or (dj == best_d and free and best_occupied):
                    best_d = dj
                    best_j = j
                    best_occupied = not free
            if best_j < 0 or best_d == _INF:
                raise ValueError("assignment problem is infeasible")
            min_val = best_d
            scanned_col[best_j] = True
            if row4col[best_j] < 0:
                sink = best_j
            else:
                i = row4col[best_j]

        u[cur_row] += min_val
        for r in range(n):
            if scanned_row[r] and r != cur_row:
                u[r] += min_val - d[col4row[r]]
        for j in range(n):
            if scanned_col[j]:
                v[j] -= min_val - d[j]

        j = sink
        while True:
            i = pred[j]
            row4col[j] = i
            col4row[i], j = j, col4row[i]
            if i == cur_row:
                break

    return np.asarray(col4row, dtype=np.int64)

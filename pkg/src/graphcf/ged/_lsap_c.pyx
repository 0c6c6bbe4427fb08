# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled linear sum assignment kernel.

Mirrors _lsap_py.solve exactly, including tie handling (free column preferred
on equal reduced distance, then lowest column index). The two implementations
are benchmarked against each other in benchmarks/bench_lsap.py.
"""

import numpy as np


def solve(double[:, ::1] cost):
    """Return the column assigned to each row as an int64 array."""
    cdef Py_ssize_t n = cost.shape[0]
    cdef double INF = float("inf")

    u_arr = np.zeros(n, dtype=np.float64)
    v_arr = np.zeros(n, dtype=np.float64)
    d_arr = np.empty(n, dtype=np.float64)
    col4row_arr = np.full(n, -1, dtype=np.int64)
    row4col_arr = np.full(n, -1, dtype=np.int64)
    pred_arr = np.empty(n, dtype=np.int64)
    scanned_col_arr = np.empty(n, dtype=np.int8)
    scanned_row_arr = np.empty(n, dtype=np.int8)

    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] d = d_arr
    cdef long long[::1] col4row = col4row_arr
    cdef long long[::1] row4col = row4col_arr
    cdef long long[::1] pred = pred_arr
    cdef signed char[::1] scanned_col = scanned_col_arr
    cdef signed char[::1] scanned_row = scanned_row_arr

    cdef Py_ssize_t cur_row, i, j, r, best_j, tmp
    cdef double min_val, shift, rcost, dj, best_d
    cdef bint best_occupied, free
    cdef Py_ssize_t sink

    for cur_row in range(n):
        for j in range(n):
            d[j] = INF
            pred[j] = -1
            scanned_col[j] = 0
            scanned_row[j] = 0
        i = cur_row
        min_val = 0.0
        sink = -1
        while sink == -1:
            scanned_row[i] = 1
            shift = min_val - u[i]
            best_j = -1
            best_d = INF
            best_occupied = True
            for j in range(n):
                if scanned_col[j]:
                    continue
                rcost = shift + cost[i, j] - v[j]
                if rcost < d[j]:
                    d[j] = rcost
                    pred[j] = i
                dj = d[j]
                free = row4col[j] < 0
                if dj < best_d or (dj == best_d and free and best_occupied):
                    best_d = dj
                    best_j = j
                    best_occupied = not free
            if best_j < 0 or best_d == INF:
                raise ValueError("assignment problem is infeasible")
            min_val = best_d
            scanned_col[best_j] = 1
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
            tmp = col4row[i]
            col4row[i] = j
            j = tmp
            if i == cur_row:
                break

    return col4row_arr

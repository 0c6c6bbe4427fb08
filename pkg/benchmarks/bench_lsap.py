"""Benchmark the compiled assignment kernel against the pure-Python fallback.

The solver dominates GED-matrix runtime (one outer solve per graph pair plus
inner solves for every incident-edge term), so this is the hot path the
extension exists for.

Run:  python benchmarks/bench_lsap.py
"""

import time

import numpy as np

from graphcf.ged import _lsap_py

try:
    from graphcf.ged import _lsap_c
except ImportError:
    _lsap_c = None


def time_solver(solver, matrices, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        for matrix in matrices:
            solver(matrix)
        best = min(best, time.perf_counter() - started)
    return best


def bench_lsap():
    rng = np.random.default_rng(0)
    print(f"{'size':>6} {'count':>6} {'python':>12} {'cython':>12} {'speedup':>9}")
    for size, count in [(4, 2000), (8, 1000), (16, 400), (32, 100), (64, 25), (128, 5)]:
        matrices = [np.ascontiguousarray(rng.random((size, size))) for _ in range(count)]
        py_time = time_solver(_lsap_py.solve, matrices)
        row = f"{size:>6} {count:>6} {py_time:>11.4f}s"
        if _lsap_c is not None:
            cy_time = time_solver(_lsap_c.solve, matrices)
            row += f" {cy_time:>11.4f}s {py_time / cy_time:>8.1f}x"
            for matrix in matrices[:10]:
                assert (_lsap_c.solve(matrix) == _lsap_py.solve(matrix)).all()
        else:
            row += f" {'not built':>12} {'-':>9}"
        print(row)


def bench_ged_matrix():
    """End-to-end effect on the bundled corpus GED matrix."""
    import os
    import subprocess
    import sys

    code = (
        "import time\n"
        "from graphcf.synthetic import make_corpus, NODE_TAXONOMY\n"
        "from graphcf.taxonomy import load_taxonomy, CostModel\n"
        "from graphcf.ged.matrix import ged_matrix\n"
        "from graphcf.ged import lsap\n"
        "ds = make_corpus(seed=7)\n"
        "cm = CostModel.from_taxonomy(load_taxonomy(NODE_TAXONOMY))\n"
        "t0 = time.perf_counter()\n"
        "ged_matrix(ds, cm)\n"
        "print(f'{lsap.IMPLEMENTATION}: {time.perf_counter() - t0:.2f}s')\n"
    )
    print("\n60-graph corpus, full 1770-pair GED matrix:", flush=True)
    for force_pure in (False, True):
        env = dict(os.environ)
        env.pop("GRAPHCF_PURE_LSAP", None)
        if force_pure:
            env["GRAPHCF_PURE_LSAP"] = "1"
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


if __name__ == "__main__":
    bench_lsap()
    bench_ged_matrix()

"""Pairwise GED matrices with CSV export and a content-hash-keyed binary cache."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..graphs import GraphDataset, dataset_content_hash
from .bipartite import bipartite_ged


@dataclass(frozen=True)
class GedMatrix:
    """Symmetric matrix of bipartite GED values.

    Cells never computed hold NaN and are False in ``computed``; the diagonal
    is always zero.
    """

    instance_ids: tuple
    values: np.ndarray
    computed: np.ndarray

    def value(self, i, j):
        if not self.computed[i, j]:
            return None
        return float(self.values[i, j])

    def computed_pairs(self):
        """All (i, j) with i < j whose value is present, in index order."""
        n = len(self.instance_ids)
        return [(i, j) for i in range(n) for j in range(i + 1, n) if self.computed[i, j]]


def _normalize_pairs(n, pairs):
    if pairs is None:
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = set()
    out = []
    for i, j in pairs:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"pair ({i}, {j}) out of range for {n} graphs")
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        out.append(key)
    return sorted(out)


def ged_matrix(ds: GraphDataset, cm, pairs=None, threads: int = 1) -> GedMatrix:
    """Bipartite GED for the requested unordered pairs (all pairs by default).

    Cells are independent, so the thread pool changes nothing about the
    output; duplicate pair requests are deduplicated silently.
    """
    n = len(ds)
    values = np.full((n, n), np.nan, dtype=np.float64)
    computed = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(values, 0.0)
    np.fill_diagonal(computed, True)

    todo = _normalize_pairs(n, pairs)

    def compute(pair):
        i, j = pair
        return i, j, bipartite_ged(ds[i], ds[j], cm).value

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(compute, todo))
    else:
        results = [compute(pair) for pair in todo]

    for i, j, value in results:
        values[i, j] = values[j, i] = value
        computed[i, j] = computed[j, i] = True

    return GedMatrix(instance_ids=ds.instance_ids(), values=values, computed=computed)


def matrix_to_csv(matrix: GedMatrix) -> bytes:
    """CSV export: header row of instance ids, absent cells left empty."""
    lines = [",".join(matrix.instance_ids)]
    n = len(matrix.instance_ids)
    for i in range(n):
        cells = []
        for j in range(n):
            cells.append(repr(float(matrix.values[i, j])) if matrix.computed[i, j] else "")
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode("utf-8")


def save_matrix(matrix: GedMatrix, path, ds: GraphDataset | None = None,
                cost_hash: str = "") -> None:
    np.savez_compressed(
        path,
        instance_ids=np.asarray(matrix.instance_ids, dtype=object),
        values=matrix.values,
        computed=matrix.computed,
        dataset_hash=np.asarray(dataset_content_hash(ds) if ds else ""),
        cost_hash=np.asarray(cost_hash),
    )


def load_matrix(path):
    """Returns (GedMatrix, dataset_hash, cost_hash)."""
    with np.load(path, allow_pickle=True) as data:
        matrix = GedMatrix(
            instance_ids=tuple(str(x) for x in data["instance_ids"]),
            values=np.asarray(data["values"], dtype=np.float64),
            computed=np.asarray(data["computed"], dtype=bool),
        )
        return matrix, str(data["dataset_hash"]), str(data["cost_hash"])

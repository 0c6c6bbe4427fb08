"""Pyramid-match graph kernel baseline.

Each graph's nodes are embedded into the unit hypercube via absolute
eigenvector entries of the symmetrized adjacency, then compared through
multi-resolution histogram intersection. Matching is label-aware by default.
Eigenvector entries of unit-norm vectors stay within [-1, 1], so no rescaling
is applied before binning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .graphs import GraphDataset, SemanticGraph
from .retrieval import order_candidates


@dataclass(frozen=True)
class PyramidConfig:
    d: int = 6
    levels: int = 4
    use_labels: bool = True

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("embedding dimension d must be >= 1")
        if self.levels < 0:
            raise ValidationError("histogram levels must be >= 0")


def jacobi_eigh(matrix, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a small symmetric matrix.

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns, in the
    internal order produced by the sweeps (callers sort as needed).
    """
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    vectors = np.eye(n)
    if n == 1:
        return np.array([a[0, 0]]), vectors
    off_mask = ~np.eye(n, dtype=bool)
    for _sweep in range(max_sweeps):
        # Summing the off-diagonal entries directly avoids the cancellation
        # that a "total minus diagonal" formulation hits near convergence.
        off = math.sqrt(float((a[off_mask] ** 2).sum()))
        if off <= tol * max(1.0, float(np.abs(a).max())):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * vectors[:, p] - s * vectors[:, q]
                rot_q = s * vectors[:, p] + c * vectors[:, q]
                vectors[:, p], vectors[:, q] = rot_p, rot_q
    else:
        raise NumericalError("Jacobi eigendecomposition did not converge")
    return np.diag(a).copy(), vectors


def _symmetric_adjacency(g: SemanticGraph) -> np.ndarray:
    index_of = {nid: k for k, (nid, _) in enumerate(g.nodes)}
    n = g.n_nodes
    adj = np.zeros((n, n))
    for src, dst, _ in g.edges:
        i, j = index_of[src], index_of[dst]
        adj[i, j] = adj[j, i] = 1.0
    return adj


def spectral_node_points(g: SemanticGraph, d: int) -> np.ndarray:
    """Node points in [0, 1]^d from absolute entries of the top-|eigenvalue|
    eigenvectors; zero eigenvalues contribute zero columns, as do columns
    beyond the node count."""
    n = g.n_nodes
    adj = _symmetric_adjacency(g)
    points = np.zeros((n, d))
    if not adj.any():
        return points
    values, vectors = jacobi_eigh(adj)
    order = sorted(range(n), key=lambda k: (-abs(values[k]), k))
    for col, k in enumerate(order[:d]):
        if abs(values[k]) <= 1e-12:
            continue
        points[:, col] = np.abs(vectors[:, k])
    return np.clip(points, 0.0, 1.0)


def _histogram(points, labels, cells):
    """Sparse histogram over (label, cell index) buckets.

    Points exactly on a boundary fall into the lower-index cell: the index is
    ceil(value * cells) - 1, clamped into range.
    """
    idx = np.clip(np.ceil(points * cells).astype(int) - 1, 0, cells - 1)
    hist = {}
    for row, label in zip(idx, labels):
        key = (label, tuple(row))
        hist[key] = hist.get(key, 0) + 1
    return hist


def _node_labels(g, cfg):
    if cfg.use_labels:
        return [label for _, label in g.nodes]
    return [""] * g.n_nodes


def profile_from_points(px, labels_x, py, labels_y, levels: int):
    """Histogram intersection counts I_l for levels 0..L (finest to coarsest)."""
    profile = []
    for level in range(levels + 1):
        cells = 2 ** (levels - level)
        hx = _histogram(np.asarray(px, dtype=np.float64), labels_x, cells)
        hy = _histogram(np.asarray(py, dtype=np.float64), labels_y, cells)
        profile.append(
            float(sum(min(count, hy.get(key, 0)) for key, count in hx.items()))
        )
    return profile


def value_from_profile(profile, levels: int) -> float:
    """Weighted multi-resolution intersection:
    I_L + sum_{l<L} (I_l - I_{l+1}) / 2^(L-l)."""
    value = profile[levels]
    for level in range(levels):
        value += (profile[level] - profile[level + 1]) / (2 ** (levels - level))
    return float(value)


def intersection_profile(x: SemanticGraph, y: SemanticGraph, cfg: PyramidConfig):
    return profile_from_points(
        spectral_node_points(x, cfg.d), _node_labels(x, cfg),
        spectral_node_points(y, cfg.d), _node_labels(y, cfg),
        cfg.levels,
    )


def pyramid_match(x: SemanticGraph, y: SemanticGraph, cfg: PyramidConfig = PyramidConfig()) -> float:
    """Label-aware pyramid-match kernel value for a graph pair."""
    return value_from_profile(intersection_profile(x, y, cfg), cfg.levels)


def kernel_gram(ds: GraphDataset, cfg: PyramidConfig = PyramidConfig()) -> np.ndarray:
    n = len(ds)
    gram = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = pyramid_match(ds[i], ds[j], cfg)
    return gram


def kernel_rank(ds: GraphDataset, cfg: PyramidConfig = PyramidConfig()):
    """Per-query ranked candidate lists over the kernel Gram matrix, with the
    same ordering conventions as embedding retrieval."""
    gram = kernel_gram(ds, cfg)
    ids = ds.instance_ids()
    return [order_candidates(gram[q], q, ids) for q in range(len(ds))]

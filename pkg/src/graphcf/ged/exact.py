"""Exact graph edit distance by best-first search over partial node mappings.

Nodes of the smaller graph are assigned in index order to nodes of the other
graph or to epsilon (deletion). The admissible lower bound for a partial
mapping is an assignment over the remaining node substitution costs with edge
terms omitted. Intended for small graphs; guarded by a node limit and a
wall-clock timeout.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

import numpy as np

from ..errors import GraphCFError, ValidationError
from ..graphs import SemanticGraph
from . import lsap
from .bipartite import GedResult, GraphView, induced_path, match_label_multisets
from .paths import invert_path


class ExactSizeError(ValidationError):
    """Input exceeds the exact-solver node limit."""


class GedTimeoutError(GraphCFError):
    """Exact search ran out of time; carries the best lower bound found."""

    def __init__(self, lower_bound):
        super().__init__(f"exact GED search timed out (best lower bound {lower_bound})")
        self.lower_bound = lower_bound


@dataclass(frozen=True)
class GedLimits:
    max_nodes: int = 8
    timeout: float = 5.0


def _node_lsap_bound(va, vb, next_i, free_targets, cm):
    """Assignment over remaining node substitution costs only."""
    rem_a = range(next_i, va.n)
    ra = va.n - next_i
    rb = len(free_targets)
    if ra == 0 and rb == 0:
        return 0.0
    size = ra + rb
    matrix = np.full((size, size), lsap.BIG, dtype=np.float64)
    for x, i in enumerate(rem_a):
        for y, t in enumerate(free_targets):
            matrix[x, y] = cm.node_substitution_cost(va.labels[i], vb.labels[t])
        matrix[x, rb + x] = cm.node_indel_cost
    for y in range(rb):
        matrix[ra + y, y] = cm.node_indel_cost
    matrix[ra:, rb:] = 0.0
    _, total = lsap.solve(matrix)
    return total


def _group_cost(cm, labels_a, labels_b):
    if not labels_a and not labels_b:
        return 0.0
    cost, _ = match_label_multisets(
        cm, tuple(sorted(labels_a)), tuple(sorted(labels_b))
    )
    return cost


def _assign_delta(va, vb, mapping, i, t, cm):
    """Cost increase when source node i is assigned to target t (or deleted)."""
    if t is None:
        delta = cm.node_indel_cost
    else:
        delta = cm.node_substitution_cost(va.labels[i], vb.labels[t])

    groups_a = va.edge_groups
    groups_b = vb.edge_groups
    empty = ()
    for j in range(i + 1):
        s = mapping[j] if j < i else t
        fwd_a = groups_a.get((i, j), empty)
        if j == i:
            if t is None:
                delta += cm.edge_indel_cost * len(fwd_a)
            else:
                delta += _group_cost(cm, fwd_a, groups_b.get((t, t), empty))
            continue
        back_a = groups_a.get((j, i), empty)
        if t is None or s is None:
            delta += cm.edge_indel_cost * (len(fwd_a) + len(back_a))
        else:
            delta += _group_cost(cm, fwd_a, groups_b.get((t, s), empty))
            delta += _group_cost(cm, back_a, groups_b.get((s, t), empty))
    return delta


def _completion_delta(va, vb, mapping, cm):
    """Cost of inserting unmatched target nodes and their incident edges."""
    used = {t for t in mapping if t is not None}
    delta = cm.node_indel_cost * (vb.n - len(used))
    for (k, l), labels in vb.edge_groups.items():
        if k in used and l in used:
            continue
        delta += cm.edge_indel_cost * len(labels)
    return delta


def _search(va, vb, cm, deadline):
    counter = 0
    root_h = _node_lsap_bound(va, vb, 0, list(range(vb.n)), cm)
    frontier = [(root_h, 0, 0.0, ())]
    while frontier:
        f, _, g, mapping = heapq.heappop(frontier)
        if time.monotonic() > deadline:
            raise GedTimeoutError(lower_bound=f)
        depth = len(mapping)
        if depth == va.n:
            return g, mapping
        used = {t for t in mapping if t is not None}
        candidates = [t for t in range(vb.n) if t not in used]
        for t in candidates + [None]:
            delta = _assign_delta(va, vb, mapping, depth, t, cm)
            child = mapping + (t,)
            child_g = g + delta
            if depth + 1 == va.n:
                child_g += _completion_delta(va, vb, child, cm)
                child_h = 0.0
            else:
                free = [x for x in range(vb.n) if x not in used and x != t]
                child_h = _node_lsap_bound(va, vb, depth + 1, free, cm)
            counter += 1
            heapq.heappush(frontier, (child_g + child_h, counter, child_g, child))
    raise GraphCFError("exact GED search exhausted without a solution")


def exact_ged(a: SemanticGraph, b: SemanticGraph, cm,
              limits: GedLimits | None = None) -> GedResult:
    """Minimum-cost edit path between two small graphs.

    Raises ExactSizeError above limits.max_nodes and GedTimeoutError past
    limits.timeout seconds.
    """
    limits = limits or GedLimits()
    if max(a.n_nodes, b.n_nodes) > limits.max_nodes:
        raise ExactSizeError(
            f"graph pair exceeds exact-solver limit of {limits.max_nodes} nodes"
        )
    swapped = b.n_nodes < a.n_nodes
    src, dst = (b, a) if swapped else (a, b)
    va, vb = GraphView(src), GraphView(dst)
    deadline = time.monotonic() + limits.timeout
    _, mapping = _search(va, vb, cm, deadline)
    path = induced_path(va, vb, list(mapping), cm)
    if swapped:
        path = invert_path(path)
    return GedResult(value=path.total_cost, path=path, exact=True)

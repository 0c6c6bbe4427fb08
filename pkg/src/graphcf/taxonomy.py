"""Concept hierarchies and the edit-operation cost model derived from them.

Substitution costs come from shortest-path distance in the hierarchy, walked
undirected with unit weights. Insertion/deletion costs are label-independent
constants, and substitutions are clamped so they never exceed delete-then-insert.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass

from .errors import ValidationError
from .graphs import normalize_label


class Taxonomy:
    """A rooted concept hierarchy (tree or DAG) with shortest-path distances.

    Immutable after construction. Distance maps are memoized per source
    concept; the memo only grows, so concurrent readers are safe.
    """

    def __init__(self, concepts, parent_links, root):
        root = normalize_label(root)
        if not root:
            raise ValidationError("taxonomy root must be non-empty")
        links = []
        concept_set = {root}
        for child, parent in parent_links:
            child = normalize_label(child)
            parent = normalize_label(parent)
            if not child or not parent:
                raise ValidationError("taxonomy link with empty concept name")
            links.append((child, parent))
            concept_set.add(child)
            concept_set.add(parent)
        for c in concepts:
            concept_set.add(normalize_label(c))

        self.root = root
        self.parent_links = tuple(links)
        self.concepts = frozenset(concept_set)

        self._parents = {c: [] for c in concept_set}
        self._adj = {c: set() for c in concept_set}
        for child, parent in links:
            self._parents[child].append(parent)
            self._adj[child].add(parent)
            self._adj[parent].add(child)

        self._check_acyclic()
        self._check_reachability()
        self._dist_cache = {}
        self._diameter = None

    def _check_acyclic(self):
        # DFS coloring over the directed child->parent links.
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {c: WHITE for c in self.concepts}
        for start in sorted(self.concepts):
            if color[start] != WHITE:
                continue
            stack = [(start, iter(self._parents[start]))]
            color[start] = GRAY
            trail = [start]
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if color[nxt] == GRAY:
                        cycle = trail[trail.index(nxt):] + [nxt]
                        raise ValidationError(
                            "taxonomy contains a cycle: " + " -> ".join(cycle)
                        )
                    if color[nxt] == WHITE:
                        color[nxt] = GRAY
                        stack.append((nxt, iter(self._parents[nxt])))
                        trail.append(nxt)
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()
                    trail.pop()

    def _check_reachability(self):
        # Every concept must reach the root by following parent links; that is
        # equivalent to the root reaching every concept over reversed links.
        children = {c: [] for c in self.concepts}
        for child, parent in self.parent_links:
            children[parent].append(child)
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            cur = queue.popleft()
            for nxt in children[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        missing = self.concepts - seen
        if missing:
            name = sorted(missing)[0]
            raise ValidationError(f"concept {name!r} cannot reach the root")

    def __contains__(self, concept):
        return normalize_label(concept) in self.concepts

    def _distances_from(self, source):
        cached = self._dist_cache.get(source)
        if cached is not None:
            return cached
        dist = {source: 0}
        queue = deque([source])
        while queue:
            cur = queue.popleft()
            for nxt in self._adj[cur]:
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    queue.append(nxt)
        self._dist_cache[source] = dist
        return dist

    def distance(self, a, b):
        """Shortest undirected path length between two concepts.

        Returns 0 when the normalized labels coincide and None when either
        concept is absent from the hierarchy (the unknown-concept result).
        """
        a = normalize_label(a)
        b = normalize_label(b)
        if a == b:
            return 0
        if a not in self.concepts or b not in self.concepts:
            return None
        return self._distances_from(a).get(b)

    def diameter(self) -> int:
        """Longest shortest path over the hierarchy, computed once on demand."""
        if self._diameter is None:
            best = 0
            for c in self.concepts:
                ecc = max(self._distances_from(c).values())
                best = max(best, ecc)
            self._diameter = best
        return self._diameter

    def content_hash(self) -> str:
        payload = self.root + "\n" + "\n".join(
            f"{c}\t{p}" for c, p in sorted(self.parent_links)
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_taxonomy(data) -> Taxonomy:
    """Load a taxonomy from edge-list text.

    Format: UTF-8, '#' starts a comment, the first content line is
    '!root <name>', every other line is 'child<TAB>parent'.
    """
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    root = None
    links = []
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if root is None:
            if not line.startswith("!root"):
                raise ValidationError(
                    f"line {lineno}: expected '!root <name>' before any links"
                )
            root = line[len("!root"):].strip()
            if not root:
                raise ValidationError(f"line {lineno}: '!root' without a name")
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(f"line {lineno}: expected 'child<TAB>parent'")
        links.append((parts[0], parts[1]))
    if root is None:
        raise ValidationError("taxonomy file declares no root")
    return Taxonomy(concepts=(), parent_links=links, root=root)


@dataclass(frozen=True)
class CostModel:
    """Edit-operation costs for GED, derived from taxonomy distances.

    Substitution cost is min(concept distance, insert + delete); unknown
    concepts substitute at min(unknown_concept_cost, insert + delete).
    Without a relation taxonomy, edge substitution between distinct labels
    is the uniform edge_indel_cost.
    """

    node_taxonomy: Taxonomy
    node_indel_cost: float
    edge_indel_cost: float = 1.0
    unknown_concept_cost: float = None
    relation_taxonomy: Taxonomy | None = None

    def __post_init__(self):
        if self.unknown_concept_cost is None:
            object.__setattr__(self, "unknown_concept_cost", 2.0 * self.node_indel_cost)
        for name in ("node_indel_cost", "edge_indel_cost", "unknown_concept_cost"):
            value = float(getattr(self, name))
            if value < 0:
                raise ValidationError(f"{name} must be nonnegative")
            object.__setattr__(self, name, value)

    @classmethod
    def from_taxonomy(cls, taxonomy, node_indel_cost=None, edge_indel_cost=1.0,
                      unknown_concept_cost=None, relation_taxonomy=None):
        """Build a cost model with the default node_indel = half the taxonomy
        diameter (floored at 1.0 so a degenerate hierarchy keeps costs positive)."""
        if node_indel_cost is None:
            node_indel_cost = max(1.0, taxonomy.diameter() / 2.0)
        return cls(
            node_taxonomy=taxonomy,
            node_indel_cost=float(node_indel_cost),
            edge_indel_cost=float(edge_indel_cost),
            unknown_concept_cost=unknown_concept_cost,
            relation_taxonomy=relation_taxonomy,
        )

    def node_substitution_cost(self, a, b) -> float:
        cap = 2.0 * self.node_indel_cost
        if normalize_label(a) == normalize_label(b):
            return 0.0
        dist = self.node_taxonomy.distance(a, b)
        if dist is None:
            return min(self.unknown_concept_cost, cap)
        return min(float(dist), cap)

    def edge_substitution_cost(self, a, b) -> float:
        if normalize_label(a) == normalize_label(b):
            return 0.0
        cap = 2.0 * self.edge_indel_cost
        if self.relation_taxonomy is None:
            return min(self.edge_indel_cost, cap)
        dist = self.relation_taxonomy.distance(a, b)
        if dist is None:
            return min(self.unknown_concept_cost, cap)
        return min(float(dist), cap)

    def content_hash(self) -> str:
        payload = "|".join([
            f"{self.node_indel_cost!r}",
            f"{self.edge_indel_cost!r}",
            f"{self.unknown_concept_cost!r}",
            self.node_taxonomy.content_hash(),
            self.relation_taxonomy.content_hash() if self.relation_taxonomy else "-",
        ])
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

"""Edit operations and edit paths: the explanation artifact.

An edit path is an ordered list of node/edge insertions, deletions, and
substitutions with per-operation costs. Zero-cost substitutions (identical
labels) are retained so the path fully describes the node mapping, but they
are excluded from the node/edge edit counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import ValidationError
from ..graphs import SemanticGraph

NODE_INS = "node_ins"
NODE_DEL = "node_del"
NODE_SUB = "node_sub"
EDGE_INS = "edge_ins"
EDGE_DEL = "edge_del"
EDGE_SUB = "edge_sub"

NODE_KINDS = frozenset({NODE_INS, NODE_DEL, NODE_SUB})
EDGE_KINDS = frozenset({EDGE_INS, EDGE_DEL, EDGE_SUB})
ALL_KINDS = NODE_KINDS | EDGE_KINDS


class PathInconsistencyError(ValidationError):
    """An edit operation references a node or edge that does not exist."""


@dataclass(frozen=True)
class EditOp:
    """One edit operation.

    Node refs are (node_id, label); edge refs are (src, dst, label).
    Substitutions carry both refs, insertions only the target, deletions only
    the source.
    """

    kind: str
    source: tuple | None
    target: tuple | None
    cost: float

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValidationError(f"unknown edit kind {self.kind!r}")
        if self.kind in (NODE_SUB, EDGE_SUB):
            if self.source is None or self.target is None:
                raise ValidationError(f"{self.kind} requires both refs")
        elif self.kind in (NODE_INS, EDGE_INS):
            if self.source is not None or self.target is None:
                raise ValidationError(f"{self.kind} carries only a target ref")
        else:
            if self.source is None or self.target is not None:
                raise ValidationError(f"{self.kind} carries only a source ref")
        if self.cost < 0:
            raise ValidationError("edit cost must be nonnegative")
        object.__setattr__(self, "cost", float(self.cost))
        if self.source is not None:
            object.__setattr__(self, "source", tuple(self.source))
        if self.target is not None:
            object.__setattr__(self, "target", tuple(self.target))

    @property
    def is_node_op(self) -> bool:
        return self.kind in NODE_KINDS


@dataclass(frozen=True)
class EditPath:
    ops: tuple
    total_cost: float
    node_edits: int
    edge_edits: int

    @classmethod
    def from_ops(cls, ops) -> "EditPath":
        ops = tuple(ops)
        total = sum(op.cost for op in ops)
        node_edits = sum(1 for op in ops if op.is_node_op and op.cost > 0)
        edge_edits = sum(1 for op in ops if not op.is_node_op and op.cost > 0)
        return cls(ops=ops, total_cost=float(total), node_edits=node_edits,
                   edge_edits=edge_edits)

    @property
    def total_edits(self) -> int:
        return self.node_edits + self.edge_edits


def invert_path(path: EditPath) -> EditPath:
    """Reverse an edit path (valid because the cost model is symmetric)."""
    swap = {NODE_INS: NODE_DEL, NODE_DEL: NODE_INS, NODE_SUB: NODE_SUB,
            EDGE_INS: EDGE_DEL, EDGE_DEL: EDGE_INS, EDGE_SUB: EDGE_SUB}
    ops = [EditOp(kind=swap[op.kind], source=op.target, target=op.source,
                  cost=op.cost) for op in path.ops]
    return EditPath.from_ops(ops)


def apply_path(graph: SemanticGraph, path: EditPath) -> SemanticGraph:
    """Apply an edit path to its source graph.

    The result carries the target graph's node ids and is label-isomorphic to
    it. Raises PathInconsistencyError when an operation references a missing
    node or edge, or when edges around deleted nodes were not removed.
    """
    node_map = {}        # source id -> target id
    deleted_nodes = set()
    result_nodes = []    # (target_id, label)
    source_labels = graph.label_map()

    for op in path.ops:
        if op.kind == NODE_SUB:
            sid, _ = op.source
            tid, tlabel = op.target
            if sid not in source_labels:
                raise PathInconsistencyError(f"node_sub references missing node {sid}")
            node_map[sid] = tid
            result_nodes.append((tid, tlabel))
        elif op.kind == NODE_DEL:
            sid, _ = op.source
            if sid not in source_labels:
                raise PathInconsistencyError(f"node_del references missing node {sid}")
            deleted_nodes.add(sid)
        elif op.kind == NODE_INS:
            tid, tlabel = op.target
            result_nodes.append((tid, tlabel))

    uncovered = set(source_labels) - set(node_map) - deleted_nodes
    if uncovered:
        raise PathInconsistencyError(
            f"path leaves source nodes unaccounted for: {sorted(uncovered)}"
        )

    remaining = {}
    for src, dst, label in graph.edges:
        key = (src, dst, label)
        remaining[key] = remaining.get(key, 0) + 1

    def take(key, kind):
        if remaining.get(key, 0) <= 0:
            raise PathInconsistencyError(f"{kind} references missing edge {key}")
        remaining[key] -= 1

    result_edges = []
    for op in path.ops:
        if op.kind == EDGE_DEL:
            take(tuple(op.source), EDGE_DEL)
        elif op.kind == EDGE_SUB:
            take(tuple(op.source), EDGE_SUB)
            result_edges.append(tuple(op.target))
        elif op.kind == EDGE_INS:
            result_edges.append(tuple(op.target))

    for (src, dst, label), count in remaining.items():
        if count <= 0:
            continue
        if src in deleted_nodes or dst in deleted_nodes:
            raise PathInconsistencyError(
                f"edge ({src}, {dst}, {label!r}) touches a deleted node but was not deleted"
            )
        for _ in range(count):
            result_edges.append((node_map[src], node_map[dst], label))

    return SemanticGraph(
        instance_id=graph.instance_id + "+edits",
        class_pred=graph.class_pred,
        nodes=tuple(result_nodes),
        edges=tuple(result_edges),
    )


def path_to_json(path: EditPath) -> bytes:
    doc = {
        "total_cost": path.total_cost,
        "node_edits": path.node_edits,
        "edge_edits": path.edge_edits,
        "ops": [
            {
                "kind": op.kind,
                "source": list(op.source) if op.source is not None else None,
                "target": list(op.target) if op.target is not None else None,
                "cost": op.cost,
            }
            for op in path.ops
        ],
    }
    return json.dumps(doc, indent=2).encode("utf-8")


def path_from_json(data) -> EditPath:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    doc = json.loads(data)
    ops = [
        EditOp(
            kind=entry["kind"],
            source=tuple(entry["source"]) if entry["source"] is not None else None,
            target=tuple(entry["target"]) if entry["target"] is not None else None,
            cost=entry["cost"],
        )
        for entry in doc["ops"]
    ]
    return EditPath.from_ops(ops)


def path_to_dot(source: SemanticGraph, path: EditPath, name="edits") -> str:
    """Render the edit path over the source graph as DOT.

    Colors: inserted green, deleted red, substituted blue, unchanged black.
    """
    lines = [f'digraph "{name}" {{']
    target_to_dot = {}
    for op in path.ops:
        if op.kind == NODE_SUB:
            sid, slabel = op.source
            tid, tlabel = op.target
            target_to_dot[tid] = f"s{sid}"
            if op.cost > 0:
                lines.append(
                    f'  s{sid} [label="{slabel} -> {tlabel}", color=blue, fontcolor=blue];'
                )
            else:
                lines.append(f'  s{sid} [label="{slabel}"];')
        elif op.kind == NODE_DEL:
            sid, slabel = op.source
            lines.append(f'  s{sid} [label="{slabel}", color=red, fontcolor=red];')
        elif op.kind == NODE_INS:
            tid, tlabel = op.target
            target_to_dot[tid] = f"t{tid}"
            lines.append(f'  t{tid} [label="{tlabel}", color=green, fontcolor=green];')

    consumed = {}
    for op in path.ops:
        if op.kind == EDGE_DEL:
            src, dst, label = op.source
            consumed[(src, dst, label)] = consumed.get((src, dst, label), 0) + 1
            lines.append(f'  s{src} -> s{dst} [label="{label}", color=red, fontcolor=red];')
        elif op.kind == EDGE_SUB:
            ssrc, sdst, slabel = op.source
            consumed[(ssrc, sdst, slabel)] = consumed.get((ssrc, sdst, slabel), 0) + 1
            tlabel = op.target[2]
            lines.append(
                f'  s{ssrc} -> s{sdst} [label="{slabel} -> {tlabel}", color=blue, fontcolor=blue];'
            )
        elif op.kind == EDGE_INS:
            tsrc, tdst, tlabel = op.target
            a = target_to_dot.get(tsrc, f"t{tsrc}")
            b = target_to_dot.get(tdst, f"t{tdst}")
            lines.append(f'  {a} -> {b} [label="{tlabel}", color=green, fontcolor=green];')

    for src, dst, label in source.edges:
        used = consumed.get((src, dst, label), 0)
        if used > 0:
            consumed[(src, dst, label)] = used - 1
            continue
        lines.append(f'  s{src} -> s{dst} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

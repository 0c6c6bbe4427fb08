"""Evaluation: ranking agreement with ground-truth GED, edit-count statistics,
and normalized global edit aggregation per class transition."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ValidationError
from .ged.bipartite import bipartite_ged
from .ged.paths import EDGE_DEL, EDGE_INS, EDGE_SUB, NODE_DEL, NODE_INS, NODE_SUB
from .graphs import GraphDataset


def _check_k(k, gt_rank, pred_rank):
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(gt_rank) or k > len(pred_rank):
        raise ValueError(f"k={k} exceeds ranking length")


def avg_precision_at_k(gt_rank, pred_rank, k) -> float:
    """Overlap between the two top-k sets, divided by k."""
    _check_k(k, gt_rank, pred_rank)
    return len(set(gt_rank[:k]) & set(pred_rank[:k])) / k


def binary_precision_at_k(gt_rank, pred_rank, k) -> float:
    """1.0 when the ground-truth best candidate appears in the predicted top k."""
    _check_k(k, gt_rank, pred_rank)
    return 1.0 if gt_rank[0] in pred_rank[:k] else 0.0


def binary_ndcg_at_k(gt_rank, pred_rank, k) -> float:
    """1/log2(1+pos) for the predicted position of the ground-truth best
    candidate, 0 outside the cutoff; the ideal gain is 1."""
    _check_k(k, gt_rank, pred_rank)
    try:
        pos = pred_rank[:k].index(gt_rank[0]) + 1
    except ValueError:
        return 0.0
    return 1.0 / math.log2(1 + pos)


def eligible_indices(ds: GraphDataset, query_index, target=None):
    """Candidate indices allowed by the class rule, in dataset order."""
    query = ds[query_index]
    out = []
    for i, g in enumerate(ds.graphs):
        if i == query_index:
            continue
        if target is not None:
            if g.class_pred == target:
                out.append(i)
        elif g.class_pred != query.class_pred:
            out.append(i)
    return out


def gt_ranking(matrix, ds: GraphDataset, query_index, target=None):
    """Eligible candidates ordered by ascending GED, ties by instance_id."""
    eligible = eligible_indices(ds, query_index, target)
    if not eligible:
        raise ValidationError(f"no eligible candidates for query {query_index}")
    for j in eligible:
        if not matrix.computed[query_index, j]:
            raise ValidationError(
                f"GED matrix missing cell ({query_index}, {j}) needed for ground truth"
            )
    ordered = sorted(
        eligible,
        key=lambda j: (matrix.values[query_index, j], ds[j].instance_id),
    )
    return [ds[j].instance_id for j in ordered]


def restrict_ranking(result_candidates, eligible_ids):
    """Project a full ranked candidate list onto the eligible set, in order."""
    eligible = set(eligible_ids)
    return [cid for cid, _sim in result_candidates if cid in eligible]


@dataclass(frozen=True)
class EditStats:
    avg_node_edits: float
    avg_edge_edits: float
    avg_total_edits: float
    avg_top1_ged: float


def edit_statistics(results, ds: GraphDataset, cm) -> EditStats:
    """Mean edit counts and GED over query results.

    Paths are recomputed here with the bipartite solver so that any method's
    retrievals are scored identically.
    """
    if not results:
        raise ValidationError("edit_statistics requires at least one result")
    node_total = edge_total = ged_total = 0.0
    for res in results:
        qi = ds.index_of(res.query_id)
        ci = ds.index_of(res.counterfactual_id)
        computed = bipartite_ged(ds[qi], ds[ci], cm)
        node_total += computed.path.node_edits
        edge_total += computed.path.edge_edits
        ged_total += computed.value
    n = len(results)
    avg_node = node_total / n
    avg_edge = edge_total / n
    return EditStats(
        avg_node_edits=avg_node,
        avg_edge_edits=avg_edge,
        avg_total_edits=avg_node + avg_edge,
        avg_top1_ged=ged_total / n,
    )


@dataclass(frozen=True)
class EvalReport:
    avg_precision_at_k: dict
    binary_precision_at_k: dict
    binary_ndcg_at_k: dict
    avg_node_edits: float
    avg_edge_edits: float
    avg_total_edits: float
    avg_top1_ged: float
    num_queries: int


def evaluate(ds: GraphDataset, matrix, results, cm, ks=(1, 2, 4), target=None) -> EvalReport:
    """Score retrieval results against GED ground truth.

    Both the ground-truth and the predicted rankings are restricted to the
    same class-eligible candidate set before comparison.
    """
    if not results:
        raise ValidationError("evaluate requires at least one result")
    sums = {k: [0.0, 0.0, 0.0] for k in ks}
    for res in results:
        qi = ds.index_of(res.query_id)
        gt = gt_ranking(matrix, ds, qi, target)
        pred = restrict_ranking(res.candidates, gt)
        for k in ks:
            sums[k][0] += avg_precision_at_k(gt, pred, k)
            sums[k][1] += binary_precision_at_k(gt, pred, k)
            sums[k][2] += binary_ndcg_at_k(gt, pred, k)
    n = len(results)
    stats = edit_statistics(results, ds, cm)
    return EvalReport(
        avg_precision_at_k={k: sums[k][0] / n for k in ks},
        binary_precision_at_k={k: sums[k][1] / n for k in ks},
        binary_ndcg_at_k={k: sums[k][2] / n for k in ks},
        avg_node_edits=stats.avg_node_edits,
        avg_edge_edits=stats.avg_edge_edits,
        avg_total_edits=stats.avg_total_edits,
        avg_top1_ged=stats.avg_top1_ged,
        num_queries=n,
    )


def report_to_json(report: EvalReport) -> bytes:
    doc = {
        "num_queries": report.num_queries,
        "avg_precision_at_k": {str(k): v for k, v in report.avg_precision_at_k.items()},
        "binary_precision_at_k": {str(k): v for k, v in report.binary_precision_at_k.items()},
        "binary_ndcg_at_k": {str(k): v for k, v in report.binary_ndcg_at_k.items()},
        "avg_node_edits": report.avg_node_edits,
        "avg_edge_edits": report.avg_edge_edits,
        "avg_total_edits": report.avg_total_edits,
        "avg_top1_ged": report.avg_top1_ged,
    }
    return json.dumps(doc, indent=2, sort_keys=True).encode("utf-8")


def report_to_markdown(report: EvalReport) -> str:
    """Markdown table with one column group per metric and one row per k."""
    ks = sorted(report.avg_precision_at_k)
    lines = [
        "| k | P@k | P@k (binary) | NDCG@k (binary) |",
        "|---|-----|--------------|-----------------|",
    ]
    for k in ks:
        lines.append(
            f"| {k} | {report.avg_precision_at_k[k]:.3f} "
            f"| {report.binary_precision_at_k[k]:.3f} "
            f"| {report.binary_ndcg_at_k[k]:.3f} |"
        )
    lines.append("")
    lines.append(
        f"Average edits: node {report.avg_node_edits:.2f}, "
        f"edge {report.avg_edge_edits:.2f}, total {report.avg_total_edits:.2f}; "
        f"average top-1 GED {report.avg_top1_ged:.3f} "
        f"over {report.num_queries} queries."
    )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GlobalEdits:
    """Normalized edit counts aggregated over one class transition."""

    transition: tuple
    triple_counts: dict    # (kind, item) -> count / max
    concept_counts: dict
    relation_counts: dict


_KIND_NAMES = {
    NODE_INS: "ins", NODE_DEL: "del", NODE_SUB: "sub",
    EDGE_INS: "ins", EDGE_DEL: "del", EDGE_SUB: "sub",
}


def _normalize_counts(counts):
    if not counts:
        return {}
    top = max(counts.values())
    return {key: value / top for key, value in counts.items()}


def aggregate_global_edits(results, ds: GraphDataset) -> GlobalEdits:
    """Count triple/concept/relation edits over all paths of one transition,
    each map normalized by its own maximum count."""
    if not results:
        raise ValidationError("aggregate_global_edits requires at least one result")
    transitions = set()
    for res in results:
        qi = ds.index_of(res.query_id)
        transitions.add((ds[qi].class_pred, res.target_class))
    if len(transitions) != 1:
        raise ValidationError(f"results span multiple transitions: {sorted(transitions)}")

    triples, concepts, relations = {}, {}, {}

    def bump(table, kind, item):
        key = (kind, item)
        table[key] = table.get(key, 0) + 1

    for res in results:
        qi = ds.index_of(res.query_id)
        ci = ds.index_of(res.counterfactual_id)
        source_labels = ds[qi].label_map()
        target_labels = ds[ci].label_map()
        for op in res.edit_path.ops:
            if op.cost <= 0:
                continue
            kind = _KIND_NAMES[op.kind]
            if op.kind == NODE_INS:
                bump(concepts, kind, op.target[1])
            elif op.kind == NODE_DEL:
                bump(concepts, kind, op.source[1])
            elif op.kind == NODE_SUB:
                bump(concepts, kind, (op.source[1], op.target[1]))
            elif op.kind in (EDGE_INS, EDGE_DEL, EDGE_SUB):
                if op.kind == EDGE_INS:
                    src, dst, label = op.target
                    triple = (target_labels[src], label, target_labels[dst])
                    bump(relations, kind, label)
                    bump(triples, kind, triple)
                elif op.kind == EDGE_DEL:
                    src, dst, label = op.source
                    triple = (source_labels[src], label, source_labels[dst])
                    bump(relations, kind, label)
                    bump(triples, kind, triple)
                else:
                    ssrc, sdst, slabel = op.source
                    tsrc, tdst, tlabel = op.target
                    bump(relations, kind, (slabel, tlabel))
                    bump(triples, kind, (
                        (source_labels[ssrc], slabel, source_labels[sdst]),
                        (target_labels[tsrc], tlabel, target_labels[tdst]),
                    ))

    transition = transitions.pop()
    return GlobalEdits(
        transition=transition,
        triple_counts=_normalize_counts(triples),
        concept_counts=_normalize_counts(concepts),
        relation_counts=_normalize_counts(relations),
    )


def _item_text(item):
    if isinstance(item, tuple):
        if item and isinstance(item[0], tuple):
            return " -> ".join(_item_text(part) for part in item)
        if len(item) == 3:
            return f"({item[0]}, {item[1]}, {item[2]})"
        return " -> ".join(str(part) for part in item)
    return str(item)


def _sorted_entries(counts):
    entries = [
        {"kind": kind, "item": _item_text(item), "count": value}
        for (kind, item), value in counts.items()
    ]
    entries.sort(key=lambda e: (-e["count"], e["item"], e["kind"]))
    return entries


def global_edits_to_json(edits: GlobalEdits) -> bytes:
    doc = {
        "transition": list(edits.transition),
        "triple_edits": _sorted_entries(edits.triple_counts),
        "concept_edits": _sorted_entries(edits.concept_counts),
        "relation_edits": _sorted_entries(edits.relation_counts),
    }
    return json.dumps(doc, indent=2).encode("utf-8")


def global_edits_to_csv(edits: GlobalEdits) -> bytes:
    lines = ["table,kind,item,normalized_count"]
    for name, counts in (("triple", edits.triple_counts),
                         ("concept", edits.concept_counts),
                         ("relation", edits.relation_counts)):
        for entry in _sorted_entries(counts):
            item = entry["item"].replace('"', "'")
            lines.append(f'{name},{entry["kind"]},"{item}",{entry["count"]!r}')
    return ("\n".join(lines) + "\n").encode("utf-8")

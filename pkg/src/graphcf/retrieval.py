"""Candidate ranking and counterfactual selection.

Rankings order every other graph by similarity to the query, descending, with
exact ties broken by instance_id ascending. The counterfactual is the
highest-ranked candidate whose predicted class satisfies the class rule, and
its edit distance and path are computed once, post hoc.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ged.bipartite import bipartite_ged
from .ged.paths import EditPath
from .graphs import GraphDataset

SIMILARITIES = ("cosine", "euclidean")


@dataclass(frozen=True)
class RankedRetrieval:
    """Per-query retrieval outcome: the full ordered candidate list, the
    eligible counterfactual, and its post-hoc edit distance and path."""

    query_id: str
    candidates: tuple            # (instance_id, similarity), best first
    counterfactual_id: str
    target_class: str
    ged_value: float
    edit_path: EditPath


def order_candidates(scores, query_index, instance_ids=None):
    """Sort candidates by score descending, ties by instance_id ascending
    (by index when ids are not supplied); the query itself is excluded."""
    n = len(scores)
    if instance_ids is not None:
        keys = list(instance_ids)
    else:
        keys = list(range(n))
    order = sorted(
        (i for i in range(n) if i != query_index),
        key=lambda i: (-scores[i], keys[i]),
    )
    return [(i, float(scores[i])) for i in order]


def rank_candidates(embeddings, query_index, instance_ids=None, similarity="cosine"):
    """Rank all other rows against the query row.

    Cosine by default; zero-norm embeddings get similarity -1 with a warning.
    The euclidean option scores by negative squared distance.
    """
    emb = np.asarray(embeddings, dtype=np.float64)
    n = emb.shape[0]
    if not 0 <= query_index < n:
        raise ValidationError(f"query index {query_index} out of range")
    if similarity == "cosine":
        norms = np.linalg.norm(emb, axis=1)
        scores = np.full(n, -1.0)
        if norms[query_index] == 0.0:
            warnings.warn("query embedding has zero norm; all similarities set to -1")
        else:
            ok = norms > 0.0
            scores[ok] = (emb[ok] @ emb[query_index]) / (norms[ok] * norms[query_index])
            if not ok.all():
                warnings.warn("zero-norm candidate embeddings scored as -1")
    elif similarity == "euclidean":
        diff = emb - emb[query_index]
        scores = -np.einsum("ij,ij->i", diff, diff)
    else:
        raise ValidationError(f"unknown similarity {similarity!r}")
    return order_candidates(scores, query_index, instance_ids)


def rank_by_ged(matrix, query_index, instance_ids=None):
    """Ground-truth style ranking by ascending GED (scored as its negation)."""
    n = len(matrix.instance_ids)
    if not 0 <= query_index < n:
        raise ValidationError(f"query index {query_index} out of range")
    missing = [j for j in range(n) if j != query_index and not matrix.computed[query_index, j]]
    if missing:
        raise ValidationError(
            f"GED matrix incomplete for query {query_index}: missing {len(missing)} cells"
        )
    scores = -matrix.values[query_index]
    return order_candidates(scores, query_index,
                            instance_ids if instance_ids is not None else matrix.instance_ids)


def select_counterfactual(ds: GraphDataset, ranking, query_index, target=None,
                          *, cost_model) -> RankedRetrieval:
    """Pick the highest-ranked candidate satisfying the class rule.

    With an explicit target class, the candidate must be predicted as that
    class; otherwise any class other than the query's qualifies and the
    candidate's own class becomes the target. GED and the edit path for the
    selected pair are computed once here.
    """
    query = ds[query_index]
    if target is not None and target == query.class_pred:
        raise ValidationError(
            f"target class {target!r} equals the query's predicted class"
        )
    chosen = None
    for idx, _sim in ranking:
        cand = ds[idx]
        if target is not None:
            if cand.class_pred == target:
                chosen = cand
                break
        elif cand.class_pred != query.class_pred:
            chosen = cand
            break
    if chosen is None:
        wanted = target if target is not None else f"anything but {query.class_pred!r}"
        raise ValidationError(f"no counterfactual in target class ({wanted})")

    result = bipartite_ged(query, chosen, cost_model)
    return RankedRetrieval(
        query_id=query.instance_id,
        candidates=tuple((ds[i].instance_id, sim) for i, sim in ranking),
        counterfactual_id=chosen.instance_id,
        target_class=target if target is not None else chosen.class_pred,
        ged_value=result.value,
        edit_path=result.path,
    )


def confusion_target(confusions: dict, query_class: str) -> str:
    """Look up the externally supplied most-confused class for a query class."""
    if query_class not in confusions:
        raise ValidationError(f"no confusion entry for class {query_class!r}")
    return confusions[query_class]

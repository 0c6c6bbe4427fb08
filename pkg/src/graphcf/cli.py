"""Command-line front end for the full pipeline.

Every command writes its artifact plus a timing line into timings.csv in the
output directory. Exit codes: 0 success, 2 missing prerequisite artifact,
3 domain/validation errors; failures print a JSON error object to stderr.
GED matrices and embeddings are cached under <out>/cache keyed by content
hashes, so reruns with identical inputs skip recomputation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .embed import (
    TrainConfig,
    WordVectorTable,
    embed_all,
    load_model,
    loss_trace_csv,
    save_model,
    train,
)
from .errors import GraphCFError, MissingArtifactError, ValidationError
from .ged.bipartite import bipartite_ged
from .ged.matrix import ged_matrix, load_matrix, matrix_to_csv, save_matrix
from .ged.paths import EditOp, EditPath, path_to_dot, path_to_json
from .graphs import dataset_content_hash, parse_dataset, serialize_dataset
from .kernel import PyramidConfig, kernel_rank
from .metrics import (
    aggregate_global_edits,
    evaluate,
    global_edits_to_csv,
    global_edits_to_json,
    report_to_json,
    report_to_markdown,
)
from .retrieval import (
    RankedRetrieval,
    confusion_target,
    rank_candidates,
    select_counterfactual,
)
from .synthetic import NODE_TAXONOMY, RELATION_TAXONOMY, make_corpus, make_word_vectors
from .taxonomy import CostModel, load_taxonomy

ENV_OUTDIR = "GRAPHCF_OUTDIR"


def _read_bytes(path) -> bytes:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(path)
    return path.read_bytes()


def _existing_path(path) -> Path:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(path)
    return path


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, data) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)


def _record_timing(out: Path, command: str, phase: str, seconds: float) -> None:
    timings = out / "timings.csv"
    header = not timings.exists()
    with timings.open("a", encoding="utf-8") as fh:
        if header:
            fh.write("command,phase,seconds\n")
        fh.write(f"{command},{phase},{seconds!r}\n")


def _load_dataset(args):
    return parse_dataset(_read_bytes(args.dataset))


def _add_cost_flags(parser):
    parser.add_argument("--taxonomy", required=True, help="concept taxonomy file")
    parser.add_argument("--relation-taxonomy", default=None,
                        help="optional relation taxonomy file")
    parser.add_argument("--node-indel", type=float, default=None,
                        help="node insert/delete cost (default: half taxonomy diameter)")
    parser.add_argument("--edge-indel", type=float, default=1.0,
                        help="edge insert/delete cost")
    parser.add_argument("--unknown-cost", type=float, default=None,
                        help="substitution cost for unknown concepts (default: 2x node indel)")


def _build_cost_model(args) -> CostModel:
    taxonomy = load_taxonomy(_read_bytes(args.taxonomy))
    relation_taxonomy = None
    if args.relation_taxonomy:
        relation_taxonomy = load_taxonomy(_read_bytes(args.relation_taxonomy))
    return CostModel.from_taxonomy(
        taxonomy,
        node_indel_cost=args.node_indel,
        edge_indel_cost=args.edge_indel,
        unknown_concept_cost=args.unknown_cost,
        relation_taxonomy=relation_taxonomy,
    )


def _edit_path_doc(path: EditPath) -> dict:
    return json.loads(path_to_json(path).decode("utf-8"))


def _edit_path_from_doc(doc) -> EditPath:
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


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    out = _outdir(args)
    ds = make_corpus(
        n_graphs=args.graphs,
        min_nodes=args.min_nodes,
        max_nodes=args.max_nodes,
        seed=args.seed,
    )
    _write(out / "dataset.json", serialize_dataset(ds))
    _write(out / "taxonomy.tsv", NODE_TAXONOMY)
    _write(out / "relations.tsv", RELATION_TAXONOMY)
    _write(out / "vectors.txt", make_word_vectors(seed=args.seed, dim=args.dim))
    print(json.dumps({"graphs": len(ds), "out": str(out)}))
    return 0


def cmd_validate(args) -> int:
    ds = _load_dataset(args)
    summary = {
        "name": ds.name,
        "graphs": len(ds),
        "classes": list(ds.classes()),
        "nodes_min": min(g.n_nodes for g in ds.graphs),
        "nodes_max": max(g.n_nodes for g in ds.graphs),
        "edges_min": min(g.n_edges for g in ds.graphs),
        "edges_max": max(g.n_edges for g in ds.graphs),
    }
    if args.taxonomy:
        taxonomy = load_taxonomy(_read_bytes(args.taxonomy))
        known = sum(
            1 for g in ds.graphs for _, label in g.nodes if label in taxonomy
        )
        total = sum(g.n_nodes for g in ds.graphs)
        summary["taxonomy_concepts"] = len(taxonomy.concepts)
        summary["node_labels_in_taxonomy"] = f"{known}/{total}"
    print(json.dumps(summary, indent=2))
    return 0


def _ged_cache_key(ds, cm, fraction, seed) -> str:
    payload = f"{dataset_content_hash(ds)}|{cm.content_hash()}|{fraction!r}|{seed}"
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def cmd_ged(args) -> int:
    out = _outdir(args)
    ds = _load_dataset(args)
    cm = _build_cost_model(args)

    cache_dir = out / "cache"
    cache_dir.mkdir(exist_ok=True)
    key = _ged_cache_key(ds, cm, args.pair_fraction, args.seed)
    cache_file = cache_dir / f"ged-{key}.npz"

    started = time.perf_counter()
    if cache_file.is_file():
        matrix, _, _ = load_matrix(cache_file)
    else:
        pairs = None
        if args.pair_fraction < 1.0:
            n = len(ds)
            everything = [(i, j) for i in range(n) for j in range(i + 1, n)]
            count = int(round(args.pair_fraction * len(everything)))
            rng = np.random.default_rng(args.seed)
            chosen = rng.choice(len(everything), size=count, replace=False)
            pairs = [everything[int(i)] for i in chosen]
        matrix = ged_matrix(ds, cm, pairs=pairs, threads=args.threads)
        save_matrix(matrix, cache_file, ds=ds, cost_hash=cm.content_hash())
    elapsed = time.perf_counter() - started

    _write(out / "ged.csv", matrix_to_csv(matrix))
    save_matrix(matrix, out / "ged.npz", ds=ds, cost_hash=cm.content_hash())
    _record_timing(out, "ged", "total", elapsed)
    print(json.dumps({"pairs_computed": len(matrix.computed_pairs()),
                      "out": str(out / "ged.csv")}))
    return 0


def cmd_train(args) -> int:
    out = _outdir(args)
    ds = _load_dataset(args)
    matrix, _, _ = load_matrix(_existing_path(args.ged))
    wv = WordVectorTable.load(_read_bytes(args.vectors), fallback_seed=args.fallback_seed)
    cfg = TrainConfig(
        seed=args.seed,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        epochs=args.epochs,
        d_out=args.d_out,
        activation=args.activation,
        reify_edges=args.reify_edges,
        pairs=args.pairs,
        loss=args.loss,
        normalize_ged=None if args.normalize_ged == "none" else args.normalize_ged,
    )
    started = time.perf_counter()
    result = train(ds, matrix, wv, cfg)
    elapsed = time.perf_counter() - started

    model = result.model
    model.config["fallback_seed"] = args.fallback_seed
    _write(out / "model.bin", save_model(model))
    _write(out / "loss_trace.csv", loss_trace_csv(result.loss_trace))
    _record_timing(out, "train", "total", elapsed)
    print(json.dumps({
        "pairs_trained": len(result.pair_samples),
        "final_loss": result.loss_trace[-1],
        "out": str(out / "model.bin"),
    }))
    return 0


def cmd_embed(args) -> int:
    out = _outdir(args)
    ds = _load_dataset(args)
    model = load_model(_read_bytes(args.model))
    fallback_seed = args.fallback_seed
    if fallback_seed is None:
        fallback_seed = model.config.get("fallback_seed", 0)
    wv = WordVectorTable.load(_read_bytes(args.vectors), fallback_seed=fallback_seed)

    cache_dir = out / "cache"
    cache_dir.mkdir(exist_ok=True)
    payload = (dataset_content_hash(ds)
               + hashlib.sha256(save_model(model)).hexdigest()
               + hashlib.sha256(_read_bytes(args.vectors)).hexdigest())
    key = hashlib.sha256(payload.encode()).hexdigest()[:24]
    cache_file = cache_dir / f"emb-{key}.npy"

    started = time.perf_counter()
    if cache_file.is_file():
        embeddings = np.load(cache_file)
    else:
        embeddings = embed_all(model, ds, wv)
        np.save(cache_file, embeddings)
    elapsed = time.perf_counter() - started

    np.save(out / "embeddings.npy", embeddings)
    _record_timing(out, "embed", "total", elapsed)
    _record_timing(out, "embed", "per_graph", elapsed / len(ds))
    print(json.dumps({"graphs": len(ds), "d_out": int(embeddings.shape[1]),
                      "out": str(out / "embeddings.npy")}))
    return 0


def _load_embeddings(args, ds):
    path = Path(args.embeddings)
    if not path.is_file():
        raise MissingArtifactError(path)
    embeddings = np.load(path)
    if embeddings.shape[0] != len(ds):
        raise ValidationError(
            f"embeddings hold {embeddings.shape[0]} rows but the dataset has {len(ds)} graphs"
        )
    return embeddings


def _result_doc(res: RankedRetrieval, k: int) -> dict:
    return {
        "query_id": res.query_id,
        "target_class": res.target_class,
        "counterfactual_id": res.counterfactual_id,
        "ged_value": res.ged_value,
        "top_k": [
            {"id": cid, "similarity": sim} for cid, sim in res.candidates[:k]
        ],
        "ranking": [
            {"id": cid, "similarity": sim} for cid, sim in res.candidates
        ],
        "edit_path": _edit_path_doc(res.edit_path),
    }


def _write_report(out: Path, filename: str, ds, results, k, mode, target) -> None:
    doc = {
        "dataset": ds.name,
        "constraint": {"mode": mode, "target": target},
        "k": k,
        "queries": [_result_doc(res, k) for res in results],
    }
    _write(out / filename, json.dumps(doc, indent=2).encode("utf-8"))


def load_retrieval_report(path):
    """Read a retrieval/kernel report back into RankedRetrieval values plus
    the constraint metadata."""
    raw = _read_bytes(path)
    doc = json.loads(raw.decode("utf-8"))
    results = []
    for entry in doc["queries"]:
        results.append(
            RankedRetrieval(
                query_id=entry["query_id"],
                candidates=tuple((c["id"], float(c["similarity"]))
                                 for c in entry["ranking"]),
                counterfactual_id=entry["counterfactual_id"],
                target_class=entry["target_class"],
                ged_value=float(entry["ged_value"]),
                edit_path=_edit_path_from_doc(entry["edit_path"]),
            )
        )
    constraint = doc.get("constraint", {"mode": "fallback", "target": None})
    return results, constraint


def _select_queries(ds, query_id):
    if query_id is None:
        return list(range(len(ds)))
    return [ds.index_of(query_id)]


def cmd_retrieve(args) -> int:
    out = _outdir(args)
    ds = _load_dataset(args)
    cm = _build_cost_model(args)
    embeddings = _load_embeddings(args, ds)

    confusions = None
    if args.confusion_file:
        confusions = json.loads(_read_bytes(args.confusion_file).decode("utf-8"))
        mode = "confusion"
    elif args.target_class:
        mode = "fixed"
    else:
        mode = "fallback"

    ids = ds.instance_ids()
    results = []
    started = time.perf_counter()
    for q in _select_queries(ds, args.query):
        query_class = ds[q].class_pred
        if confusions is not None:
            target = confusion_target(confusions, query_class)
            if target == query_class:
                raise ValidationError(
                    f"confusion map sends class {query_class!r} to itself"
                )
        elif args.target_class:
            if args.target_class == query_class:
                continue
            target = args.target_class
        else:
            target = None
        ranking = rank_candidates(embeddings, q, ids, similarity=args.similarity)
        results.append(select_counterfactual(ds, ranking, q, target, cost_model=cm))
    elapsed = time.perf_counter() - started

    if not results:
        raise ValidationError("no queries were eligible for retrieval")
    _write_report(out, "retrieval.json", ds, results, args.k, mode,
                  args.target_class)
    _record_timing(out, "retrieve", "total", elapsed)
    _record_timing(out, "retrieve", "per_query", elapsed / len(results))
    print(json.dumps({"queries": len(results), "out": str(out / "retrieval.json")}))
    return 0


def cmd_explain(args) -> int:
    out = _outdir(args)
    ds = _load_dataset(args)
    qi = ds.index_of(args.query)
    if args.counterfactual:
        cm = _build_cost_model(args)
        ci = ds.index_of(args.counterfactual)
        result = bipartite_ged(ds[qi], ds[ci], cm)
        path, counterfactual_id = result.path, args.counterfactual
    else:
        if not args.retrieval:
            raise ValidationError("explain needs --retrieval or --counterfactual")
        results, _ = load_retrieval_report(args.retrieval)
        match = [r for r in results if r.query_id == args.query]
        if not match:
            raise ValidationError(f"query {args.query!r} not present in the retrieval report")
        path, counterfactual_id = match[0].edit_path, match[0].counterfactual_id

    stem = args.query.replace(os.sep, "_")
    _write(out / f"{stem}_path.json", path_to_json(path))
    _write(out / f"{stem}_path.dot",
           path_to_dot(ds[qi], path, name=f"{args.query}->{counterfactual_id}"))
    print(json.dumps({
        "query": args.query,
        "counterfactual": counterfactual_id,
        "total_cost": path.total_cost,
        "node_edits": path.node_edits,
        "edge_edits": path.edge_edits,
    }))
    return 0


def cmd_eval(args) -> int:
    out = _outdir(args)
    ds = _load_dataset(args)
    cm = _build_cost_model(args)
    matrix, _, _ = load_matrix(_existing_path(args.ged))
    results, constraint = load_retrieval_report(args.retrieval)
    target = args.target_class
    if target is None and constraint.get("mode") == "fixed":
        target = constraint.get("target")
    ks = tuple(int(k) for k in args.ks.split(","))

    started = time.perf_counter()
    report = evaluate(ds, matrix, results, cm, ks=ks, target=target)
    elapsed = time.perf_counter() - started

    _write(out / "eval.json", report_to_json(report))
    _write(out / "eval.md", report_to_markdown(report))
    _record_timing(out, "eval", "total", elapsed)
    print(report_to_markdown(report))
    return 0


def cmd_aggregate(args) -> int:
    out = _outdir(args)
    ds = _load_dataset(args)
    results, _ = load_retrieval_report(args.retrieval)
    wanted = []
    for res in results:
        qi = ds.index_of(res.query_id)
        if ds[qi].class_pred == args.source_class and res.target_class == args.target_class:
            wanted.append(res)
    edits = aggregate_global_edits(wanted, ds)
    _write(out / "global_edits.json", global_edits_to_json(edits))
    _write(out / "global_edits.csv", global_edits_to_csv(edits))
    print(json.dumps({
        "transition": list(edits.transition),
        "queries": len(wanted),
        "out": str(out / "global_edits.json"),
    }))
    return 0


def cmd_kernel(args) -> int:
    out = _outdir(args)
    ds = _load_dataset(args)
    cm = _build_cost_model(args)
    cfg = PyramidConfig(d=args.d, levels=args.levels, use_labels=not args.unlabeled)

    started = time.perf_counter()
    rankings = kernel_rank(ds, cfg)
    results = [
        select_counterfactual(ds, rankings[q], q, cost_model=cm)
        for q in range(len(ds))
    ]
    elapsed = time.perf_counter() - started

    _write_report(out, "kernel_retrieval.json", ds, results, args.k,
                  "fallback", None)
    _record_timing(out, "kernel", "total", elapsed)
    _record_timing(out, "kernel", "per_query", elapsed / len(results))
    print(json.dumps({"queries": len(results),
                      "out": str(out / "kernel_retrieval.json")}))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphcf",
        description="Semantic-graph counterfactual explanations: taxonomy-weighted "
                    "GED, distance-preserving embeddings, retrieval, and evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"graphcf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    default_out = os.environ.get(ENV_OUTDIR, ".")

    def with_out(p):
        p.add_argument("--out", default=default_out, help="output directory")
        return p

    p = with_out(sub.add_parser("synth", help="generate the bundled synthetic corpus"))
    p.add_argument("--graphs", type=int, default=60)
    p.add_argument("--min-nodes", type=int, default=5)
    p.add_argument("--max-nodes", type=int, default=10)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--dim", type=int, default=16)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", help="validate a dataset file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--taxonomy", default=None)
    p.set_defaults(func=cmd_validate)

    p = with_out(sub.add_parser("ged", help="compute the pairwise GED matrix"))
    p.add_argument("--dataset", required=True)
    _add_cost_flags(p)
    p.add_argument("--pair-fraction", type=float, default=1.0,
                   help="fraction of pairs to compute (1.0 = all)")
    p.add_argument("--seed", type=int, default=0, help="pair sampling seed")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_ged)

    p = with_out(sub.add_parser("train", help="train the embedding model"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--ged", required=True, help="GED matrix (.npz)")
    p.add_argument("--vectors", required=True, help="word vector text file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--pairs", type=int, default=None,
                   help="training pairs (default: half of all pairs)")
    p.add_argument("--d-out", type=int, default=128)
    p.add_argument("--learning-rate", type=float, default=0.04)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--activation", choices=["identity", "rectifier"], default="rectifier")
    p.add_argument("--loss", choices=["mse", "mae"], default="mse")
    p.add_argument("--normalize-ged", choices=["none", "max"], default="none")
    p.add_argument("--reify-edges", action="store_true")
    p.add_argument("--fallback-seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = with_out(sub.add_parser("embed", help="embed every graph with a trained model"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--fallback-seed", type=int, default=None,
                   help="default: value stored in the model config")
    p.set_defaults(func=cmd_embed)

    p = with_out(sub.add_parser("retrieve", help="rank candidates and select counterfactuals"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--embeddings", required=True)
    _add_cost_flags(p)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--query", default=None, help="restrict to one query id")
    p.add_argument("--target-class", default=None)
    p.add_argument("--confusion-file", default=None,
                   help="JSON map from class to its most-confused class")
    p.add_argument("--similarity", choices=["cosine", "euclidean"], default="cosine")
    p.set_defaults(func=cmd_retrieve)

    p = with_out(sub.add_parser("explain", help="export the edit path for one query"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--retrieval", default=None, help="retrieval report JSON")
    p.add_argument("--counterfactual", default=None,
                   help="explicit counterfactual id (computes the path directly)")
    _add_cost_flags(p)
    p.set_defaults(func=cmd_explain)

    p = with_out(sub.add_parser("eval", help="score retrieval against GED ground truth"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--ged", required=True)
    p.add_argument("--retrieval", required=True)
    _add_cost_flags(p)
    p.add_argument("--ks", default="1,2,4")
    p.add_argument("--target-class", default=None)
    p.set_defaults(func=cmd_eval)

    p = with_out(sub.add_parser("aggregate", help="aggregate global edits for a transition"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--retrieval", required=True)
    p.add_argument("--source-class", required=True)
    p.add_argument("--target-class", required=True)
    p.set_defaults(func=cmd_aggregate)

    p = with_out(sub.add_parser("kernel", help="pyramid-match kernel baseline retrieval"))
    p.add_argument("--dataset", required=True)
    _add_cost_flags(p)
    p.add_argument("--d", type=int, default=6)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--unlabeled", action="store_true")
    p.add_argument("--k", type=int, default=4)
    p.set_defaults(func=cmd_kernel)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingArtifactError as exc:
        print(json.dumps({"error": {"kind": "missing_artifact", "message": str(exc)}}),
              file=sys.stderr)
        return 2
    except GraphCFError as exc:
        print(json.dumps({"error": {"kind": type(exc).__name__, "message": str(exc)}}),
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance suite: one test per criterion, named so the verbose pytest line
doubles as the per-criterion pass/fail record. Prints a summary line each
(visible with -s)."""

import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from graphcf import (
    CostModel,
    EmbeddingModel,
    TrainConfig,
    WordVectorTable,
    apply_path,
    avg_precision_at_k,
    bipartite_ged,
    binary_ndcg_at_k,
    binary_precision_at_k,
    embed_all,
    embed_graph,
    evaluate,
    exact_ged,
    ged_matrix,
    kernel_gram,
    loss_and_gradient,
    pyramid_match,
    rank_by_ged,
    rank_candidates,
    select_counterfactual,
    train,
)
from graphcf.cli import main as cli_main
from graphcf.embed import held_out_pairs
from graphcf.metrics import edit_statistics, gt_ranking, restrict_ranking
from graphcf.synthetic import NODE_TAXONOMY, make_corpus, make_word_vectors
from graphcf.taxonomy import load_taxonomy

from .conftest import random_small_graph
from .oracles import brute_force_ged, label_isomorphic

CORPUS_SEED = 7
TRAIN_SEED = 11


def _report(criterion, message):
    print(f"ACCEPTANCE {criterion}: PASS - {message}")


@pytest.fixture(scope="module")
def oracle_pairs(cost_model):
    """30 random graph pairs (<= 4 nodes, <= 4 edges, 10-concept taxonomy)
    with brute-force, exact, and bipartite results."""
    rng = np.random.default_rng(2024)
    pairs = []
    started = time.perf_counter()
    for trial in range(30):
        a = random_small_graph(rng, f"oa{trial}")
        b = random_small_graph(rng, f"ob{trial}")
        pairs.append({
            "a": a,
            "b": b,
            "brute": brute_force_ged(a, b, cost_model),
            "exact": exact_ged(a, b, cost_model),
            "bipartite": bipartite_ged(a, b, cost_model),
        })
    elapsed = time.perf_counter() - started
    return pairs, elapsed


@pytest.fixture(scope="module")
def synthetic_pipeline():
    """The bundled 60-graph corpus taken through GED, training, embedding,
    and both retrieval variants, with total wall time."""
    started = time.perf_counter()
    ds = make_corpus(seed=CORPUS_SEED)
    taxonomy = load_taxonomy(NODE_TAXONOMY)
    cm = CostModel.from_taxonomy(taxonomy)
    matrix = ged_matrix(ds, cm)
    wv = WordVectorTable.load(make_word_vectors(seed=CORPUS_SEED),
                              fallback_seed=CORPUS_SEED)
    result = train(ds, matrix, wv, TrainConfig(seed=TRAIN_SEED))
    embeddings = embed_all(result.model, ds, wv)
    ids = ds.instance_ids()
    gnn_results = [
        select_counterfactual(ds, rank_candidates(embeddings, q, ids), q,
                              cost_model=cm)
        for q in range(len(ds))
    ]
    ged_results = [
        select_counterfactual(ds, rank_by_ged(matrix, q, ids), q, cost_model=cm)
        for q in range(len(ds))
    ]
    elapsed = time.perf_counter() - started
    return {
        "ds": ds, "cm": cm, "matrix": matrix, "wv": wv, "train": result,
        "embeddings": embeddings, "gnn_results": gnn_results,
        "ged_results": ged_results, "elapsed": elapsed,
    }


def test_criterion_01_exact_equals_brute_force(oracle_pairs):
    pairs, elapsed = oracle_pairs
    for entry in pairs:
        assert entry["exact"].value == pytest.approx(entry["brute"], abs=1e-9)
    assert elapsed < 10.0
    _report(1, f"30/30 exact == brute force, {elapsed:.2f}s total")


def test_criterion_02_bipartite_upper_bound_and_paths(oracle_pairs, cost_model):
    pairs, _ = oracle_pairs
    equal = 0
    for entry in pairs:
        upper, lower = entry["bipartite"], entry["exact"]
        assert upper.value >= lower.value - 1e-9
        equal += abs(upper.value - lower.value) < 1e-9
        assert upper.value == pytest.approx(
            sum(op.cost for op in upper.path.ops), abs=1e-9
        )
        assert lower.value == pytest.approx(
            sum(op.cost for op in lower.path.ops), abs=1e-9
        )
        assert label_isomorphic(apply_path(entry["a"], upper.path), entry["b"])
    assert equal >= 15
    _report(2, f"bound holds on 30/30 pairs, tight on {equal}/30, paths apply")


def test_criterion_03_exact_metric_properties(cost_model):
    rng = np.random.default_rng(31)
    for trial in range(50):
        a = random_small_graph(rng, f"ta{trial}")
        b = random_small_graph(rng, f"tb{trial}")
        c = random_small_graph(rng, f"tc{trial}")
        ab = exact_ged(a, b, cost_model).value
        ba = exact_ged(b, a, cost_model).value
        ac = exact_ged(a, c, cost_model).value
        cb = exact_ged(c, b, cost_model).value
        assert abs(ab - ba) <= 1e-9
        assert ab <= ac + cb + 1e-9
    _report(3, "symmetry and triangle inequality on 50 random triples")


def test_criterion_04_gradient_check():
    rng = np.random.default_rng(404)
    d_in, d_out = 5, 4
    tokens = ["dog", "cat", "bird", "tree", "fish", "on", "near", "has"]
    checked = 0
    config_seed = 0
    while checked < 10:
        config_seed += 1
        gen = np.random.default_rng(config_seed)
        table = WordVectorTable(
            d_in, {t: gen.standard_normal(d_in) for t in tokens}, fallback_seed=1
        )
        gx = random_small_graph(gen, "gx", max_nodes=4, max_edges=3,
                                concepts=tokens[:5])
        gy = random_small_graph(gen, "gy", max_nodes=4, max_edges=3,
                                concepts=tokens[:5])
        weight = gen.standard_normal((d_in, d_out))
        activation = "identity" if checked % 2 == 0 else "rectifier"
        model = EmbeddingModel(weight=weight, activation=activation,
                               config={"loss": "mse"})
        if activation == "rectifier":
            # finite differences are invalid near the rectifier kink
            from graphcf.embed import _aggregate, init_features
            z = np.vstack([
                _aggregate(init_features(g, table, False)) @ weight
                for g in (gx, gy)
            ])
            if np.abs(z).min() < 1e-3:
                continue
        pair = (gx, gy, float(gen.uniform(0, 5)))
        _, grad = loss_and_gradient(model, pair, table)
        step = 1e-6
        fd = np.zeros_like(weight)
        for i in range(d_in):
            for j in range(d_out):
                up = weight.copy(); up[i, j] += step
                down = weight.copy(); down[i, j] -= step
                lp, _ = loss_and_gradient(
                    EmbeddingModel(weight=up, activation=activation,
                                   config={"loss": "mse"}), pair, table)
                lm, _ = loss_and_gradient(
                    EmbeddingModel(weight=down, activation=activation,
                                   config={"loss": "mse"}), pair, table)
                fd[i, j] = (lp - lm) / (2 * step)
        denom = max(np.abs(fd).max(), 1e-12)
        assert np.abs(grad - fd).max() / denom < 1e-4, (config_seed, activation)
        checked += 1
    _report(4, "10 configurations (identity and rectifier) within 1e-4")


def test_criterion_05_end_to_end_reproduction(synthetic_pipeline):
    pipe = synthetic_pipeline
    ds, matrix = pipe["ds"], pipe["matrix"]
    ids = ds.instance_ids()
    hits = 0.0
    for q, res in enumerate(pipe["gnn_results"]):
        gt = gt_ranking(matrix, ds, q)
        pred = restrict_ranking(res.candidates, gt)
        hits += binary_precision_at_k(gt, pred, 1)
    hit_rate = hits / len(ds)
    random_baseline = 1.0 / (len(ds) - 1)
    assert hit_rate >= 0.15
    assert hit_rate >= 5 * random_baseline

    held = held_out_pairs(matrix, pipe["train"].pair_samples)
    emb = pipe["embeddings"]
    squared = [float(((emb[s.i] - emb[s.j]) ** 2).sum()) for s in held]
    targets = [s.ged for s in held]
    rho = spearmanr(squared, targets).statistic
    assert rho >= 0.5
    assert pipe["elapsed"] < 300.0
    _report(5, f"hit@1={hit_rate:.3f} (>=0.15), spearman={rho:.3f} (>=0.5), "
               f"{pipe['elapsed']:.1f}s (<300s)")


def test_criterion_06_edit_economy(synthetic_pipeline):
    pipe = synthetic_pipeline
    gnn = edit_statistics(pipe["gnn_results"], pipe["ds"], pipe["cm"])
    optimal = edit_statistics(pipe["ged_results"], pipe["ds"], pipe["cm"])
    ratio = gnn.avg_total_edits / optimal.avg_total_edits
    assert ratio <= 1.25
    _report(6, f"edit ratio {ratio:.3f} (<= 1.25; gnn {gnn.avg_total_edits:.2f}, "
               f"optimal {optimal.avg_total_edits:.2f})")


def test_criterion_07_metric_fixtures(synthetic_pipeline):
    assert avg_precision_at_k(["g3", "g1", "g2"], ["g3", "g2", "g1"], 2) == 0.5
    assert binary_ndcg_at_k(["a", "b"], ["a", "b"], 1) == 1.0
    assert binary_ndcg_at_k(["a", "x", "y", "z"], ["x", "y", "a", "z"], 4) == pytest.approx(0.5)
    assert binary_ndcg_at_k(["a", "x", "y", "z", "w"],
                            ["x", "y", "z", "w", "a"], 4) == 0.0
    rng = np.random.default_rng(7)
    items = [f"i{k}" for k in range(8)]
    for _ in range(25):
        gt = list(rng.permutation(items))
        pred = list(rng.permutation(items))
        assert binary_precision_at_k(gt, pred, 4) >= binary_precision_at_k(gt, pred, 1)

    pipe = synthetic_pipeline
    report = evaluate(pipe["ds"], pipe["matrix"], pipe["ged_results"],
                      pipe["cm"], ks=(1, 2, 4))
    for k in (1, 2, 4):
        assert report.avg_precision_at_k[k] == 1.0
        assert report.binary_precision_at_k[k] == 1.0
        assert report.binary_ndcg_at_k[k] == 1.0
    _report(7, "hand fixtures pass; GED-vs-itself scores 1.0 at k=1,2,4")


def test_criterion_08_retrieval_efficiency(synthetic_pipeline):
    rng = np.random.default_rng(88)
    embeddings = rng.standard_normal((500, 128))
    rank_candidates(embeddings, 0)  # warm up
    times = []
    for q in range(20):
        started = time.perf_counter()
        rank_candidates(embeddings, q)
        times.append(time.perf_counter() - started)
    per_query = sorted(times)[len(times) // 2]
    assert per_query < 0.050

    pipe = synthetic_pipeline
    graph = next(g for g in pipe["ds"].graphs if g.n_nodes == 10)
    model, wv = pipe["train"].model, pipe["wv"]
    embed_graph(model, graph, wv)  # warm up
    runs = []
    for _ in range(20):
        started = time.perf_counter()
        embed_graph(model, graph, wv)
        runs.append(time.perf_counter() - started)
    inference = sorted(runs)[len(runs) // 2]
    assert inference < 0.010
    _report(8, f"retrieval {per_query*1000:.2f}ms/query (<50ms), "
               f"inference {inference*1000:.2f}ms (<10ms)")


def test_criterion_09_kernel_sanity(synthetic_pipeline):
    ds = synthetic_pipeline["ds"]
    gram = kernel_gram(ds)
    assert np.array_equal(gram, gram.T)
    min_eig = float(np.linalg.eigvalsh(gram).min())
    assert min_eig >= -1e-8
    for g in ds.graphs:
        assert pyramid_match(g, g) == pytest.approx(g.n_nodes)
    _report(9, f"gram symmetric, min eigenvalue {min_eig:.2e} (>= -1e-8), "
               "self-kernel == node count")


def test_criterion_10_pipeline_determinism(tmp_path):
    compared = ["ged.csv", "model.bin", "loss_trace.csv", "embeddings.npy",
                "retrieval.json", "eval.json", "eval.md"]

    def run(out):
        out.mkdir()
        dataset = str(out / "dataset.json")
        taxonomy = str(out / "taxonomy.tsv")
        vectors = str(out / "vectors.txt")
        assert cli_main(["synth", "--out", str(out), "--seed", str(CORPUS_SEED)]) == 0
        assert cli_main(["ged", "--dataset", dataset, "--taxonomy", taxonomy,
                         "--threads", "1", "--out", str(out)]) == 0
        assert cli_main(["train", "--dataset", dataset, "--ged", str(out / "ged.npz"),
                         "--vectors", vectors, "--seed", str(TRAIN_SEED),
                         "--fallback-seed", str(CORPUS_SEED), "--out", str(out)]) == 0
        assert cli_main(["embed", "--dataset", dataset, "--model", str(out / "model.bin"),
                         "--vectors", vectors, "--out", str(out)]) == 0
        assert cli_main(["retrieve", "--dataset", dataset,
                         "--embeddings", str(out / "embeddings.npy"),
                         "--taxonomy", taxonomy, "--out", str(out)]) == 0
        assert cli_main(["eval", "--dataset", dataset, "--ged", str(out / "ged.npz"),
                         "--retrieval", str(out / "retrieval.json"),
                         "--taxonomy", taxonomy, "--out", str(out)]) == 0

    run(tmp_path / "run1")
    run(tmp_path / "run2")
    for name in compared:
        first = (tmp_path / "run1" / name).read_bytes()
        second = (tmp_path / "run2" / name).read_bytes()
        assert first == second, f"{name} differs between identical runs"
    _report(10, f"byte-identical artifacts across reruns: {', '.join(compared)}")

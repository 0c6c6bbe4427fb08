"""Distance-preserving graph embeddings.

A single trainable graph-convolution layer in a Siamese arrangement: node
features are word vectors of the labels, each node aggregates itself plus its
neighbors, one weight matrix maps to the embedding space, and mean readout
produces the graph vector. Training minimizes the squared mismatch between
squared embedding distance and the pairwise edit distance, with hand-derived
gradients and Adam.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import struct
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, NumericalError, ValidationError
from .graphs import GraphDataset, SemanticGraph, normalize_label

ACTIVATIONS = ("identity", "rectifier")


class WordVectorTable:
    """Token vectors with deterministic fallbacks for unknown tokens.

    Multi-word labels average their per-token vectors. An unknown token draws
    a pseudo-random unit vector derived from (fallback_seed, token), so the
    same token always maps to the same vector.
    """

    def __init__(self, dimension, entries, fallback_seed=0):
        self.dimension = int(dimension)
        if self.dimension < 1:
            raise ConfigError("word vector dimension must be >= 1")
        self.entries = {}
        for token, vec in entries.items():
            vec = np.asarray(vec, dtype=np.float64)
            if vec.shape != (self.dimension,):
                raise ValidationError(
                    f"vector for {token!r} has length {vec.shape}, expected {self.dimension}"
                )
            self.entries[normalize_label(token)] = vec
        self.fallback_seed = int(fallback_seed)
        self._fallback_cache = {}

    @classmethod
    def load(cls, data, fallback_seed=0) -> "WordVectorTable":
        """Parse the plain text format: one 'token v1 v2 ... vd' line per token."""
        if isinstance(data, (bytes, bytearray)):
            data = data.decode("utf-8")
        entries = {}
        dimension = None
        for lineno, raw in enumerate(data.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            token, values = parts[0], parts[1:]
            if dimension is None:
                dimension = len(values)
                if dimension == 0:
                    raise ValidationError(f"line {lineno}: no vector components")
            elif len(values) != dimension:
                raise ValidationError(
                    f"line {lineno}: expected {dimension} components, found {len(values)}"
                )
            entries[token] = np.asarray([float(x) for x in values])
        if not entries:
            raise ValidationError("word vector file contains no entries")
        return cls(dimension=dimension, entries=entries, fallback_seed=fallback_seed)

    def _fallback(self, token):
        cached = self._fallback_cache.get(token)
        if cached is not None:
            return cached
        digest = hashlib.sha256(f"{self.fallback_seed}:{token}".encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        vec = rng.standard_normal(self.dimension)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        vec = vec / norm
        self._fallback_cache[token] = vec
        return vec

    def lookup(self, label) -> np.ndarray:
        tokens = normalize_label(label).split()
        if not tokens:
            return self._fallback("")
        vecs = [self.entries.get(t) for t in tokens]
        vecs = [v if v is not None else self._fallback(t) for v, t in zip(vecs, tokens)]
        return np.mean(vecs, axis=0)


class FeatureGraph(NamedTuple):
    features: np.ndarray   # one row per node (plus one per edge when reified)
    adjacency: np.ndarray  # symmetric 0/1 message-passing structure


def init_features(g: SemanticGraph, wv: WordVectorTable,
                  reify_edges: bool = False) -> FeatureGraph:
    """Node feature matrix and message-passing adjacency for one graph.

    Edges are treated as undirected links; a self-loop contributes its node
    to its own neighborhood once. With reify_edges, every edge becomes an
    extra feature row carrying the edge label's vector, linked to both
    endpoints, and the direct endpoint link is dropped.
    """
    index_of = {nid: k for k, (nid, _) in enumerate(g.nodes)}
    rows = [wv.lookup(label) for _, label in g.nodes]
    n = len(rows)
    if reify_edges:
        size = n + g.n_edges
        adjacency = np.zeros((size, size))
        for e, (src, dst, label) in enumerate(g.edges):
            rows.append(wv.lookup(label))
            mid = n + e
            i, j = index_of[src], index_of[dst]
            adjacency[i, mid] = adjacency[mid, i] = 1.0
            adjacency[mid, j] = adjacency[j, mid] = 1.0
    else:
        adjacency = np.zeros((n, n))
        for src, dst, _ in g.edges:
            i, j = index_of[src], index_of[dst]
            adjacency[i, j] = adjacency[j, i] = 1.0
    return FeatureGraph(features=np.asarray(rows, dtype=np.float64), adjacency=adjacency)


@dataclass(frozen=True)
class EmbeddingModel:
    """One graph-convolution layer: weight matrix, activation, and a config
    snapshot of how it was trained."""

    weight: np.ndarray
    activation: str = "rectifier"
    reify_edges: bool = False
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        weight = np.asarray(self.weight, dtype=np.float64)
        if weight.ndim != 2 or weight.shape[1] < 1:
            raise ConfigError("weight must be a d_in x d_out matrix with d_out >= 1")
        if not np.isfinite(weight).all():
            raise ConfigError("weight contains non-finite values")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "weight", weight)

    @property
    def d_in(self) -> int:
        return self.weight.shape[0]

    @property
    def d_out(self) -> int:
        return self.weight.shape[1]


def _activate(z, activation):
    if activation == "identity":
        return z
    return np.maximum(z, 0.0)


def _activation_mask(z, activation):
    if activation == "identity":
        return np.ones_like(z)
    return (z > 0.0).astype(np.float64)


def _aggregate(fg: FeatureGraph) -> np.ndarray:
    return fg.features + fg.adjacency @ fg.features


def _check_dimensions(model: EmbeddingModel, wv: WordVectorTable):
    if wv.dimension != model.d_in:
        raise ConfigError(
            f"word vectors have dimension {wv.dimension}, model expects {model.d_in}"
        )


def embed_graph(model: EmbeddingModel, g: SemanticGraph, wv: WordVectorTable) -> np.ndarray:
    """Graph vector: mean over rows of act((X + A X) W)."""
    _check_dimensions(model, wv)
    fg = init_features(g, wv, model.reify_edges)
    u = _activate(_aggregate(fg) @ model.weight, model.activation)
    return u.mean(axis=0)


def embed_all(model: EmbeddingModel, ds: GraphDataset, wv: WordVectorTable) -> np.ndarray:
    """Row k is the embedding of graph k."""
    return np.vstack([embed_graph(model, g, wv) for g in ds.graphs])


def _pair_loss_grad(s_x, s_y, weight, activation, ged, loss_kind):
    z_x = s_x @ weight
    z_y = s_y @ weight
    u_x = _activate(z_x, activation)
    u_y = _activate(z_y, activation)
    h_x = u_x.mean(axis=0)
    h_y = u_y.mean(axis=0)
    diff = h_x - h_y
    err = float(diff @ diff) - float(ged)
    if loss_kind == "mse":
        loss = err * err
        factor = 2.0 * err
    elif loss_kind == "mae":
        loss = abs(err)
        factor = math.copysign(1.0, err) if err != 0.0 else 0.0
    else:
        raise ConfigError(f"unknown loss {loss_kind!r}")
    # d loss / d h_x = factor * 2 * diff, spread uniformly over readout rows
    g_x = (factor * 2.0 / s_x.shape[0]) * diff
    g_y = (-factor * 2.0 / s_y.shape[0]) * diff
    dz_x = _activation_mask(z_x, activation) * g_x
    dz_y = _activation_mask(z_y, activation) * g_y
    grad = s_x.T @ dz_x + s_y.T @ dz_y
    return loss, grad


def loss_and_gradient(model: EmbeddingModel, pair, wv: WordVectorTable):
    """Per-pair loss and d(loss)/d(weight) through both Siamese branches.

    ``pair`` is (graph_x, graph_y, ged). The loss kind comes from the model's
    config snapshot (default squared error).
    """
    g_x, g_y, ged = pair
    _check_dimensions(model, wv)
    s_x = _aggregate(init_features(g_x, wv, model.reify_edges))
    s_y = _aggregate(init_features(g_y, wv, model.reify_edges))
    loss_kind = model.config.get("loss", "mse")
    loss, grad = _pair_loss_grad(s_x, s_y, model.weight, model.activation, ged, loss_kind)
    if not (np.isfinite(loss) and np.isfinite(grad).all()):
        raise NumericalError(
            f"non-finite loss/gradient for pair ({g_x.instance_id!r}, {g_y.instance_id!r})"
        )
    return loss, grad


@dataclass(frozen=True)
class PairSample:
    i: int
    j: int
    ged: float

    def __post_init__(self):
        if not self.i < self.j:
            raise ValidationError("pair sample requires i < j")
        if self.ged < 0:
            raise ValidationError("pair sample GED must be nonnegative")


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters. Defaults are the desk-scale setup; the
    full-scale preset keeps the published embedding width."""

    seed: int | None = None
    learning_rate: float = 0.04
    batch_size: int = 32
    epochs: int = 50
    d_out: int = 128
    activation: str = "rectifier"
    reify_edges: bool = False
    pairs: int | None = None
    loss: str = "mse"
    normalize_ged: str | None = None

    @classmethod
    def published_preset(cls, seed, **overrides) -> "TrainConfig":
        return cls(seed=seed, d_out=2048, **overrides)

    def snapshot(self) -> dict:
        return {
            "seed": self.seed,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "d_out": self.d_out,
            "activation": self.activation,
            "reify_edges": self.reify_edges,
            "pairs": self.pairs,
            "loss": self.loss,
            "normalize_ged": self.normalize_ged,
        }


@dataclass(frozen=True)
class TrainResult:
    model: EmbeddingModel
    loss_trace: tuple
    pair_samples: tuple


def default_pair_count(n_graphs: int) -> int:
    """Half of all unordered pairs, rounded up."""
    return math.ceil(n_graphs * (n_graphs - 1) / 2 / 2)


def sample_pairs(matrix, p: int, seed) -> tuple:
    """Sample p computed pairs uniformly without replacement.

    Deterministic in (matrix, p, seed); training and held-out evaluation use
    this same function to agree on the split.
    """
    available = matrix.computed_pairs()
    if p > len(available):
        warnings.warn(
            f"requested {p} training pairs but only {len(available)} are computed; clamping"
        )
        p = len(available)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(available), size=p, replace=False)
    samples = []
    for idx in chosen:
        i, j = available[int(idx)]
        samples.append(PairSample(i=i, j=j, ged=float(matrix.values[i, j])))
    return tuple(samples)


def held_out_pairs(matrix, train_samples) -> tuple:
    """Computed pairs not used for training."""
    used = {(s.i, s.j) for s in train_samples}
    out = []
    for i, j in matrix.computed_pairs():
        if (i, j) not in used:
            out.append(PairSample(i=i, j=j, ged=float(matrix.values[i, j])))
    return tuple(out)


def _xavier_uniform(rng, d_in, d_out):
    limit = math.sqrt(6.0 / (d_in + d_out))
    return rng.uniform(-limit, limit, size=(d_in, d_out))


def train(ds: GraphDataset, matrix, wv: WordVectorTable, cfg: TrainConfig) -> TrainResult:
    """Train the embedding model on sampled pairs of the GED matrix.

    Pair sampling, weight init, and epoch shuffling all derive from cfg.seed;
    batches run sequentially so the result is reproducible bit for bit.
    """
    if cfg.seed is None:
        raise ConfigError("training requires an explicit seed")
    if cfg.activation not in ACTIVATIONS:
        raise ConfigError(f"unknown activation {cfg.activation!r}")
    if len(ds) < 2:
        raise ValidationError("training needs at least two graphs")

    p = cfg.pairs if cfg.pairs is not None else default_pair_count(len(ds))
    samples = sample_pairs(matrix, p, cfg.seed)
    if not samples:
        raise ValidationError("no computed GED pairs available for training")

    targets = np.asarray([s.ged for s in samples], dtype=np.float64)
    if cfg.normalize_ged == "max":
        top = float(np.nanmax(matrix.values))
        if top > 0:
            targets = targets / top
    elif cfg.normalize_ged is not None:
        raise ConfigError(f"unknown normalize_ged mode {cfg.normalize_ged!r}")

    aggregated = [
        _aggregate(init_features(g, wv, cfg.reify_edges)) for g in ds.graphs
    ]

    rng = np.random.default_rng((cfg.seed, 0x5EED))
    weight = _xavier_uniform(rng, wv.dimension, cfg.d_out)

    beta1, beta2, eps = 0.9, 0.999, 1e-8
    moment1 = np.zeros_like(weight)
    moment2 = np.zeros_like(weight)
    step = 0
    trace = []
    n_pairs = len(samples)
    for _epoch in range(cfg.epochs):
        order = rng.permutation(n_pairs)
        epoch_loss = 0.0
        for start in range(0, n_pairs, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            grad = np.zeros_like(weight)
            for idx in batch:
                s = samples[int(idx)]
                loss, g = _pair_loss_grad(
                    aggregated[s.i], aggregated[s.j], weight,
                    cfg.activation, targets[int(idx)], cfg.loss,
                )
                epoch_loss += loss
                grad += g
            grad /= len(batch)
            step += 1
            moment1 = beta1 * moment1 + (1 - beta1) * grad
            moment2 = beta2 * moment2 + (1 - beta2) * grad * grad
            m_hat = moment1 / (1 - beta1 ** step)
            v_hat = moment2 / (1 - beta2 ** step)
            weight = weight - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + eps)
        if not np.isfinite(weight).all():
            raise NumericalError(f"weights became non-finite at epoch {_epoch}")
        trace.append(epoch_loss / n_pairs)

    config = cfg.snapshot()
    config["d_in"] = wv.dimension
    model = EmbeddingModel(
        weight=weight,
        activation=cfg.activation,
        reify_edges=cfg.reify_edges,
        config=config,
    )
    return TrainResult(model=model, loss_trace=tuple(trace), pair_samples=samples)


_MAGIC = b"GCFM1\x00"
_ACT_CODES = {"identity": 0, "rectifier": 1}
_ACT_NAMES = {v: k for k, v in _ACT_CODES.items()}


def save_model(model: EmbeddingModel) -> bytes:
    """Binary layout: magic, header (d_in, d_out, activation, reify, seed),
    row-major float64 weights, JSON config trailer."""
    seed = model.config.get("seed")
    header = struct.pack(
        "<IIBBq",
        model.d_in,
        model.d_out,
        _ACT_CODES[model.activation],
        1 if model.reify_edges else 0,
        -1 if seed is None else int(seed),
    )
    trailer = json.dumps(model.config, sort_keys=True).encode("utf-8")
    return _MAGIC + header + model.weight.astype("<f8").tobytes(order="C") + trailer


def load_model(data) -> EmbeddingModel:
    if len(data) < len(_MAGIC) + struct.calcsize("<IIBBq"):
        raise ValidationError("model file too short")
    if data[: len(_MAGIC)] != _MAGIC:
        raise ValidationError("not a graphcf model file")
    offset = len(_MAGIC)
    d_in, d_out, act_code, reify, _seed = struct.unpack_from("<IIBBq", data, offset)
    offset += struct.calcsize("<IIBBq")
    count = d_in * d_out
    weight = np.frombuffer(data, dtype="<f8", count=count, offset=offset)
    weight = weight.reshape(d_in, d_out).copy()
    offset += count * 8
    config = json.loads(data[offset:].decode("utf-8")) if len(data) > offset else {}
    return EmbeddingModel(
        weight=weight,
        activation=_ACT_NAMES.get(act_code, "rectifier"),
        reify_edges=bool(reify),
        config=config,
    )


def loss_trace_csv(trace) -> bytes:
    buf = io.StringIO()
    buf.write("epoch,mean_loss\n")
    for epoch, value in enumerate(trace):
        buf.write(f"{epoch},{value!r}\n")
    return buf.getvalue().encode("utf-8")

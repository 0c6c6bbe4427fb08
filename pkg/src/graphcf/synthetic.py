"""Bundled synthetic corpus generator.

Produces small scene-like graphs in three classes whose label pools overlap
partially, a concept taxonomy covering all labels, a relation taxonomy, and
word vectors correlated with taxonomy structure (concepts sharing ancestors
share vector components). Everything is a pure function of the seed, so the
corpus can be regenerated identically anywhere.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .graphs import GraphDataset, SemanticGraph

NODE_TAXONOMY = """!root thing
object\tthing
region\tthing
plant\tthing
vehicle\tobject
animal\tobject
furniture\tobject
fixture\tobject
car\tvehicle
truck\tvehicle
bus\tvehicle
bike\tvehicle
van\tvehicle
scooter\tvehicle
dog\tanimal
cat\tanimal
bird\tanimal
horse\tanimal
sheep\tanimal
duck\tanimal
person\tanimal
table\tfurniture
chair\tfurniture
sofa\tfurniture
shelf\tfurniture
desk\tfurniture
stool\tfurniture
lamp\tfixture
sign\tfixture
light\tfixture
fence\tfixture
door\tfixture
bench\tfixture
road\tregion
field\tregion
river\tregion
floor\tregion
wall\tregion
yard\tregion
sky\tregion
room\tregion
tree\tplant
flower\tplant
bush\tplant
grass\tplant
"""

RELATION_TAXONOMY = """!root relation
spatial\trelation
interaction\trelation
on\tspatial
under\tspatial
near\tspatial
beside\tspatial
behind\tspatial
above\tspatial
has\tinteraction
holds\tinteraction
rides\tinteraction
pulls\tinteraction
faces\tinteraction
watches\tinteraction
"""

CLASS_CONCEPTS = {
    "street": ["car", "truck", "bus", "bike", "van", "scooter",
               "road", "sign", "light", "person", "sky", "fence"],
    "meadow": ["dog", "cat", "bird", "horse", "sheep", "duck",
               "field", "river", "tree", "grass", "person", "sky"],
    "lounge": ["table", "chair", "sofa", "shelf", "desk", "stool",
               "lamp", "floor", "wall", "room", "person", "door"],
}

CLASS_RELATIONS = {
    "street": ["on", "near", "behind", "rides", "beside", "faces"],
    "meadow": ["on", "near", "under", "watches", "beside", "above"],
    "lounge": ["on", "near", "under", "has", "holds", "beside"],
}


def _taxonomy_tokens(text):
    tokens = []
    for line in text.strip().splitlines():
        if line.startswith("!root"):
            tokens.append(line.split()[1])
        else:
            child, parent = line.split("\t")
            for tok in (child, parent):
                if tok not in tokens:
                    tokens.append(tok)
    return tokens


def _parent_map(text):
    parents = {}
    for line in text.strip().splitlines():
        if line.startswith("!root"):
            continue
        child, parent = line.split("\t")
        parents[child] = parent
    return parents


def _basis_vector(seed, name, dim):
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    vec = rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def make_word_vectors(seed=7, dim=16, ancestor_weight=0.55) -> str:
    """Word vector text for all taxonomy tokens.

    Each token's vector blends its own basis direction with increasingly
    down-weighted ancestor directions, so taxonomy-close concepts end up with
    correlated vectors.
    """
    lines = []
    for text in (NODE_TAXONOMY, RELATION_TAXONOMY):
        parents = _parent_map(text)
        for token in _taxonomy_tokens(text):
            vec = np.zeros(dim)
            weight = 1.0
            current = token
            while True:
                vec += weight * _basis_vector(seed, current, dim)
                if current not in parents:
                    break
                current = parents[current]
                weight *= ancestor_weight
            vec = vec / np.linalg.norm(vec)
            lines.append(token + " " + " ".join(f"{x:.6f}" for x in vec))
    return "\n".join(lines) + "\n"


def _make_graph(rng, instance_id, class_name, min_nodes, max_nodes):
    concepts = CLASS_CONCEPTS[class_name]
    relations = CLASS_RELATIONS[class_name]
    n = int(rng.integers(min_nodes, max_nodes + 1))
    labels = [concepts[int(rng.integers(len(concepts)))] for _ in range(n)]
    nodes = tuple((k, labels[k]) for k in range(n))

    target_edges = int(rng.integers(max(1, n - 2), int(1.6 * n) + 1))
    edges = []
    seen = set()
    attempts = 0
    while len(edges) < target_edges and attempts < 10 * target_edges:
        attempts += 1
        i = int(rng.integers(n))
        j = int(rng.integers(n))
        if i == j:
            continue
        label = relations[int(rng.integers(len(relations)))]
        key = (i, j, label)
        if key in seen:
            continue
        seen.add(key)
        edges.append(key)
    return SemanticGraph(
        instance_id=instance_id,
        class_pred=class_name,
        class_true=class_name,
        nodes=nodes,
        edges=tuple(edges),
    )


def make_corpus(n_graphs=60, classes=None, min_nodes=5, max_nodes=10, seed=7) -> GraphDataset:
    """Deterministic corpus of labeled graphs, classes assigned round-robin."""
    if classes is None:
        classes = tuple(CLASS_CONCEPTS)
    rng = np.random.default_rng(seed)
    graphs = []
    for idx in range(n_graphs):
        class_name = classes[idx % len(classes)]
        graphs.append(
            _make_graph(rng, f"g{idx:03d}", class_name, min_nodes, max_nodes)
        )
    return GraphDataset(name=f"synthetic-{n_graphs}", graphs=tuple(graphs))

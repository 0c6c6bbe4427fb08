import numpy as np
import pytest

from graphcf import CostModel, SemanticGraph, Taxonomy

# 10-concept hierarchy used by the randomized GED tests.
ANIMAL_LINKS = [
    ("animal", "root"), ("bird", "animal"), ("mammal", "animal"),
    ("dog", "mammal"), ("cat", "mammal"), ("fish", "animal"),
    ("plant", "root"), ("tree", "plant"), ("bush", "plant"),
]
RELATION_LABELS = ["on", "near", "has"]


@pytest.fixture(scope="session")
def animal_taxonomy():
    return Taxonomy(concepts=(), parent_links=ANIMAL_LINKS, root="root")


@pytest.fixture(scope="session")
def cost_model(animal_taxonomy):
    return CostModel.from_taxonomy(animal_taxonomy, node_indel_cost=2.0,
                                   edge_indel_cost=1.0)


def random_small_graph(rng, instance_id, max_nodes=4, max_edges=4,
                       concepts=None, class_pred="c"):
    """Random labeled digraph without parallel edges (the brute-force oracle
    requires unique (src, dst) pairs); self-loops occur occasionally."""
    concepts = concepts or sorted(
        {c for link in ANIMAL_LINKS for c in link}
    )
    n = int(rng.integers(1, max_nodes + 1))
    nodes = tuple(
        (k, concepts[int(rng.integers(len(concepts)))]) for k in range(n)
    )
    m = int(rng.integers(0, max_edges + 1))
    edges, seen = [], set()
    for _ in range(m):
        i, j = int(rng.integers(n)), int(rng.integers(n))
        if (i, j) in seen:
            continue
        seen.add((i, j))
        edges.append((i, j, RELATION_LABELS[int(rng.integers(len(RELATION_LABELS)))]))
    return SemanticGraph(instance_id, class_pred, nodes=nodes, edges=tuple(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

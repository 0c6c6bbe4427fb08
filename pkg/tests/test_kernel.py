import numpy as np
import pytest

from graphcf import (
    GraphDataset,
    PyramidConfig,
    SemanticGraph,
    ValidationError,
    kernel_gram,
    kernel_rank,
    pyramid_match,
)
from graphcf.kernel import (
    intersection_profile,
    jacobi_eigh,
    profile_from_points,
    spectral_node_points,
    value_from_profile,
)

from .conftest import random_small_graph


def test_jacobi_matches_numpy(rng):
    for _ in range(40):
        n = int(rng.integers(1, 12))
        matrix = rng.standard_normal((n, n))
        matrix = (matrix + matrix.T) / 2
        values, vectors = jacobi_eigh(matrix)
        assert np.allclose(np.sort(values), np.linalg.eigvalsh(matrix), atol=1e-8)
        assert np.allclose(vectors @ np.diag(values) @ vectors.T, matrix, atol=1e-8)


def test_config_invariants():
    with pytest.raises(ValidationError):
        PyramidConfig(d=0)
    with pytest.raises(ValidationError):
        PyramidConfig(levels=-1)
    cfg = PyramidConfig()
    assert (cfg.d, cfg.levels, cfg.use_labels) == (6, 4, True)


def test_spectral_points_isolated_node_zero():
    g = SemanticGraph("g", "c", nodes=((0, "dog"),))
    assert (spectral_node_points(g, 4) == 0).all()


def test_spectral_points_single_edge():
    g = SemanticGraph("g", "c", nodes=((0, "a"), (1, "b")), edges=((0, 1, "r"),))
    points = spectral_node_points(g, 3)
    # eigenvectors of [[0,1],[1,0]] are (1, +-1)/sqrt(2)
    assert np.allclose(points[:, 0], 1 / np.sqrt(2), atol=1e-9)
    assert np.allclose(points[:, 1], 1 / np.sqrt(2), atol=1e-9)
    assert (points[:, 2] == 0).all()  # padding column


def test_spectral_points_triangle():
    g = SemanticGraph("g", "c", nodes=((0, "a"), (1, "b"), (2, "c")),
                      edges=((0, 1, "r"), (1, 2, "r"), (2, 0, "r")))
    points = spectral_node_points(g, 2)
    assert np.allclose(points[:, 0], 1 / np.sqrt(3), atol=1e-9)
    assert (points >= 0).all() and (points <= 1).all()


def test_points_within_unit_cube(rng):
    for trial in range(20):
        g = random_small_graph(rng, f"g{trial}", max_nodes=6, max_edges=8)
        points = spectral_node_points(g, 6)
        assert (points >= 0).all() and (points <= 1).all()


def test_self_match_equals_node_count(rng):
    cfg = PyramidConfig()
    for trial in range(10):
        g = random_small_graph(rng, f"g{trial}", max_nodes=6, max_edges=6)
        assert pyramid_match(g, g, cfg) == pytest.approx(g.n_nodes)


def test_disjoint_label_sets_zero():
    cfg = PyramidConfig()
    x = SemanticGraph("x", "c", nodes=((0, "aa"), (1, "bb")), edges=((0, 1, "r"),))
    y = SemanticGraph("y", "c", nodes=((0, "cc"), (1, "dd")), edges=((0, 1, "r"),))
    assert pyramid_match(x, y, cfg) == 0.0


def test_hand_evaluated_intersection_level_one():
    # hand-placed 1-d points, L=1: level 0 has 2 cells, level 1 has 1 cell
    px = [[0.3], [0.3], [0.9]]
    py = [[0.4], [0.9], [0.9]]
    labels = ["", "", ""]
    profile = profile_from_points(px, labels, py, labels, levels=1)
    # level 0 cells: px -> {cell0: 2, cell1: 1}; py -> {cell0: 1, cell1: 2}
    assert profile[0] == 2.0  # min(2,1) + min(1,2)
    assert profile[1] == 3.0  # one coarse cell holds everything
    # kernel = I_1 + (I_0 - I_1)/2
    assert value_from_profile(profile, 1) == pytest.approx(3.0 + (2.0 - 3.0) / 2)


def test_boundary_points_assign_to_lower_cell():
    # 0.5 sits exactly on the boundary with 2 cells; lower cell wins
    profile = profile_from_points([[0.5]], [""], [[0.4]], [""], levels=1)
    assert profile[0] == 1.0


def test_profile_monotone_in_level(rng):
    cfg = PyramidConfig()
    for trial in range(15):
        x = random_small_graph(rng, f"x{trial}", max_nodes=6, max_edges=6)
        y = random_small_graph(rng, f"y{trial}", max_nodes=6, max_edges=6)
        profile = intersection_profile(x, y, cfg)
        assert profile == sorted(profile)


def test_symmetry(rng):
    cfg = PyramidConfig()
    for trial in range(15):
        x = random_small_graph(rng, f"x{trial}", max_nodes=6, max_edges=6)
        y = random_small_graph(rng, f"y{trial}", max_nodes=6, max_edges=6)
        assert pyramid_match(x, y, cfg) == pyramid_match(y, x, cfg)


def test_gram_psd_and_nonnegative(rng):
    graphs = tuple(random_small_graph(rng, f"g{k}", max_nodes=5, max_edges=6)
                   for k in range(12))
    ds = GraphDataset(name="gram", graphs=graphs)
    gram = kernel_gram(ds)
    assert (gram >= 0).all()
    assert np.allclose(gram, gram.T)
    assert np.linalg.eigvalsh(gram).min() >= -1e-8


def test_unlabeled_mode_pools_labels():
    cfg = PyramidConfig(use_labels=False)
    x = SemanticGraph("x", "c", nodes=((0, "aa"), (1, "bb")), edges=((0, 1, "r"),))
    y = SemanticGraph("y", "c", nodes=((0, "cc"), (1, "dd")), edges=((0, 1, "r"),))
    assert pyramid_match(x, y, cfg) == pytest.approx(2.0)


def test_kernel_rank_identical_graphs_tie_break():
    def g(gid):
        return SemanticGraph(gid, "c", nodes=((0, "dog"), (1, "cat")),
                             edges=((0, 1, "r"),))
    ds = GraphDataset(name="ties", graphs=(g("bb"), g("aa"), g("cc")))
    rankings = kernel_rank(ds)
    # all kernel values equal, so candidates order by instance_id
    assert [i for i, _ in rankings[0]] == [1, 2]  # aa, cc
    assert [i for i, _ in rankings[1]] == [0, 2]  # bb, cc

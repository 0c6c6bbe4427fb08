import pytest

from graphcf import SemanticGraph, ValidationError
from graphcf.ged.paths import (
    EDGE_DEL,
    EDGE_INS,
    NODE_DEL,
    NODE_INS,
    NODE_SUB,
    EditOp,
    EditPath,
    PathInconsistencyError,
    apply_path,
    invert_path,
    path_from_json,
    path_to_dot,
    path_to_json,
)


def op(kind, source=None, target=None, cost=1.0):
    return EditOp(kind=kind, source=source, target=target, cost=cost)


def test_op_ref_invariants():
    op(NODE_SUB, source=(0, "a"), target=(1, "b"))
    op(NODE_INS, target=(1, "b"))
    op(NODE_DEL, source=(0, "a"))
    with pytest.raises(ValidationError):
        op(NODE_SUB, source=(0, "a"))
    with pytest.raises(ValidationError):
        op(NODE_INS, source=(0, "a"), target=(1, "b"))
    with pytest.raises(ValidationError):
        op(NODE_DEL, target=(1, "b"))
    with pytest.raises(ValidationError):
        op(NODE_DEL, source=(0, "a"), cost=-0.5)


def test_path_totals_and_edit_counts():
    path = EditPath.from_ops([
        op(NODE_SUB, source=(0, "a"), target=(0, "a"), cost=0.0),
        op(NODE_SUB, source=(1, "b"), target=(1, "c"), cost=2.0),
        op(EDGE_DEL, source=(0, 1, "r"), cost=1.0),
    ])
    assert path.total_cost == 3.0
    assert path.node_edits == 1  # the zero-cost substitution does not count
    assert path.edge_edits == 1
    assert path.total_edits == 2


def test_apply_empty_path_is_identity():
    g = SemanticGraph("g", "c", nodes=((0, "a"), (1, "b")), edges=((0, 1, "r"),))
    identity = EditPath.from_ops([
        op(NODE_SUB, source=(0, "a"), target=(0, "a"), cost=0.0),
        op(NODE_SUB, source=(1, "b"), target=(1, "b"), cost=0.0),
    ])
    result = apply_path(g, identity)
    assert set(result.nodes) == set(g.nodes)
    assert sorted(result.edges) == sorted(g.edges)


def test_apply_path_translates_edges_through_mapping():
    g = SemanticGraph("g", "c", nodes=((0, "a"), (1, "b")), edges=((0, 1, "r"),))
    path = EditPath.from_ops([
        op(NODE_SUB, source=(0, "a"), target=(10, "a"), cost=0.0),
        op(NODE_SUB, source=(1, "b"), target=(11, "z"), cost=2.0),
    ])
    result = apply_path(g, path)
    assert set(result.nodes) == {(10, "a"), (11, "z")}
    assert result.edges == ((10, 11, "r"),)


def test_apply_path_missing_node_is_inconsistency():
    g = SemanticGraph("g", "c", nodes=((0, "a"),))
    bad = EditPath.from_ops([
        op(NODE_SUB, source=(0, "a"), target=(0, "a"), cost=0.0),
        op(NODE_DEL, source=(7, "ghost")),
    ])
    with pytest.raises(PathInconsistencyError):
        apply_path(g, bad)


def test_apply_path_requires_deleting_touching_edges():
    g = SemanticGraph("g", "c", nodes=((0, "a"), (1, "b")), edges=((0, 1, "r"),))
    bad = EditPath.from_ops([
        op(NODE_SUB, source=(0, "a"), target=(0, "a"), cost=0.0),
        op(NODE_DEL, source=(1, "b")),
    ])
    with pytest.raises(PathInconsistencyError, match="deleted node"):
        apply_path(g, bad)


def test_apply_path_unaccounted_source_node():
    g = SemanticGraph("g", "c", nodes=((0, "a"), (1, "b")))
    bad = EditPath.from_ops([op(NODE_SUB, source=(0, "a"), target=(0, "a"), cost=0.0)])
    with pytest.raises(PathInconsistencyError, match="unaccounted"):
        apply_path(g, bad)


def test_invert_path_swaps_directions():
    path = EditPath.from_ops([
        op(NODE_INS, target=(5, "n")),
        op(EDGE_DEL, source=(0, 1, "r")),
    ])
    inverse = invert_path(path)
    kinds = [o.kind for o in inverse.ops]
    assert kinds == [NODE_DEL, EDGE_INS]
    assert inverse.ops[0].source == (5, "n")
    assert inverse.ops[1].target == (0, 1, "r")
    assert inverse.total_cost == path.total_cost


def test_json_roundtrip():
    path = EditPath.from_ops([
        op(NODE_SUB, source=(0, "a"), target=(2, "b"), cost=1.5),
        op(EDGE_INS, target=(2, 3, "near")),
    ])
    again = path_from_json(path_to_json(path))
    assert again == path


def test_dot_export_colors():
    g = SemanticGraph("g", "c", nodes=((0, "man"), (1, "bike")),
                      edges=((0, 1, "riding"),))
    path = EditPath.from_ops([
        op(NODE_SUB, source=(0, "man"), target=(0, "woman"), cost=1.0),
        op(NODE_DEL, source=(1, "bike")),
        op(NODE_INS, target=(9, "helmet")),
        op(EDGE_DEL, source=(0, 1, "riding")),
        op(EDGE_INS, target=(0, 9, "wearing")),
    ])
    dot = path_to_dot(g, path)
    assert dot.startswith("digraph")
    assert 'color=blue' in dot and 'color=red' in dot and 'color=green' in dot
    assert 'man -> woman' in dot

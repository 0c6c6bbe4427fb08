"""Counterfactual explanation retrieval over semantic graphs.

Pipeline: parse labeled graphs, derive edit costs from a concept taxonomy,
compute (approximate) graph edit distances, train an embedding model that
preserves them, retrieve minimum-edit counterfactual instances from other
classes, and evaluate the rankings against GED ground truth.
"""

__version__ = "0.1.0"

from .embed import (
    EmbeddingModel,
    PairSample,
    TrainConfig,
    TrainResult,
    WordVectorTable,
    embed_all,
    embed_graph,
    init_features,
    load_model,
    loss_and_gradient,
    save_model,
    train,
)
from .errors import (
    ConfigError,
    GraphCFError,
    MissingArtifactError,
    NumericalError,
    ParseError,
    ValidationError,
)
from .ged import (
    EditOp,
    EditPath,
    GedLimits,
    GedMatrix,
    GedResult,
    apply_path,
    bipartite_ged,
    exact_ged,
    ged_matrix,
    path_to_dot,
    path_to_json,
)
from .graphs import (
    AttributeRecord,
    GraphDataset,
    SemanticGraph,
    build_star_graph,
    normalize_label,
    parse_attribute_record,
    parse_dataset,
    serialize_dataset,
)
from .kernel import PyramidConfig, kernel_gram, kernel_rank, pyramid_match
from .metrics import (
    EvalReport,
    GlobalEdits,
    aggregate_global_edits,
    avg_precision_at_k,
    binary_ndcg_at_k,
    binary_precision_at_k,
    edit_statistics,
    evaluate,
)
from .retrieval import (
    RankedRetrieval,
    confusion_target,
    rank_by_ged,
    rank_candidates,
    select_counterfactual,
)
from .taxonomy import CostModel, Taxonomy, load_taxonomy

__all__ = [
    "__version__",
    "AttributeRecord", "GraphDataset", "SemanticGraph", "build_star_graph",
    "normalize_label", "parse_attribute_record", "parse_dataset", "serialize_dataset",
    "CostModel", "Taxonomy", "load_taxonomy",
    "EditOp", "EditPath", "GedLimits", "GedMatrix", "GedResult",
    "apply_path", "bipartite_ged", "exact_ged", "ged_matrix",
    "path_to_dot", "path_to_json",
    "EmbeddingModel", "PairSample", "TrainConfig", "TrainResult",
    "WordVectorTable", "embed_all", "embed_graph", "init_features",
    "load_model", "loss_and_gradient", "save_model", "train",
    "RankedRetrieval", "confusion_target", "rank_by_ged", "rank_candidates",
    "select_counterfactual",
    "EvalReport", "GlobalEdits", "aggregate_global_edits", "avg_precision_at_k",
    "binary_ndcg_at_k", "binary_precision_at_k", "edit_statistics", "evaluate",
    "PyramidConfig", "kernel_gram", "kernel_rank", "pyramid_match",
    "GraphCFError", "ParseError", "ValidationError", "ConfigError",
    "NumericalError", "MissingArtifactError",
]

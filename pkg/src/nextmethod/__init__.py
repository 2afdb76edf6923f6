"""Next-method recommendation from mined commit histories.

Pipeline: ingest a JSONL commit corpus, extract the methods each commit
added, cluster similar methods across repositories, mine association rules
over per-file cluster transactions, and recommend the complete next method
a developer is likely to write. Ships with a replay-based evaluation
harness, a tuning sweep, an HTTP service and a CLI.
"""

from .clustering import Cluster, SimilarityGraph, build_graph, cluster_methods, components
from .corpus import (
    CommitRecord,
    FileChange,
    MethodRecord,
    MinedCommit,
    added_methods,
    filter_commits,
    mine_commits,
    parse_corpus,
    read_corpus,
)
from .evaluation import (
    DEFAULT_GRID,
    CommitOutcome,
    EvalReport,
    SplitConfig,
    TuningConfig,
    TuningGrid,
    compute_metrics,
    evaluate_commits,
    long_method_reanalysis,
    select_presets,
    simulate_commit,
    time_split,
    tune,
)
from .javalex import CallableDecl, extract_callables
from .model import ModelArtifact, ModelConfig, ModelError, build_model, load_model, save_model
from .recommender import Recommendation, assign_cluster, candidate_lhs, recommend
from .rules import AssociationRule, Transaction, build_transactions, mine_rules
from .similarity import similarity, term_vector, token_distance, tokenize

__version__ = "0.1.0"

__all__ = [
    "AssociationRule",
    "CallableDecl",
    "Cluster",
    "CommitOutcome",
    "CommitRecord",
    "DEFAULT_GRID",
    "EvalReport",
    "FileChange",
    "MethodRecord",
    "MinedCommit",
    "ModelArtifact",
    "ModelConfig",
    "ModelError",
    "Recommendation",
    "SimilarityGraph",
    "SplitConfig",
    "Transaction",
    "TuningConfig",
    "TuningGrid",
    "added_methods",
    "assign_cluster",
    "build_graph",
    "build_model",
    "build_transactions",
    "candidate_lhs",
    "cluster_methods",
    "components",
    "compute_metrics",
    "evaluate_commits",
    "extract_callables",
    "filter_commits",
    "load_model",
    "long_method_reanalysis",
    "mine_commits",
    "mine_rules",
    "parse_corpus",
    "read_corpus",
    "recommend",
    "save_model",
    "select_presets",
    "similarity",
    "simulate_commit",
    "term_vector",
    "time_split",
    "token_distance",
    "tokenize",
    "tune",
]

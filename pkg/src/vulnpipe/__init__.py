"""Function-level vulnerability dataset pipeline and diff-driven review scorer.

Stages: extract PHP function spans from a checkout, deduplicate them with a
token sliding window plus Jaccard confirmation, fuse static-analyzer
findings into binary labels, materialize CSV datasets with seeded splits
and class balancing, evaluate classifiers cross-domain, and score the
functions a pull request touches.
"""

from .annotation import (
    AnnotatedFunction,
    Finding,
    SeverityFilter,
    Tool,
    fuse_annotations,
    parse_report,
)
from .dataset import (
    BalanceKind,
    BalanceStrategy,
    ClassWeights,
    DatasetRecord,
    SplitAssignment,
    balance,
    dataset_quality_report,
    read_csv,
    split,
    write_csv,
)
from .dedup import DedupConfig, DedupReport, dedup_corpus, jaccard, window_candidates
from .extraction import (
    ExtractionConfig,
    FunctionSpan,
    SourceFile,
    enumerate_files,
    extract_directory,
    extract_functions,
)
from .metrics import ConfusionCounts, MetricsReport, confusion, cross_domain_matrix, prf
from .phplex import tokenize
from .review import (
    ChangedLines,
    ReviewFinding,
    changed_functions,
    parse_unified_diff,
    render_review,
    run_review,
)
from .scoring import (
    RemoteScorer,
    ScoreRequest,
    ScoreResponse,
    StubScorer,
    score_batch,
    stub_score,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedFunction", "BalanceKind", "BalanceStrategy", "ChangedLines",
    "ClassWeights", "ConfusionCounts", "DatasetRecord", "DedupConfig",
    "DedupReport", "ExtractionConfig", "Finding", "FunctionSpan",
    "MetricsReport", "RemoteScorer", "ReviewFinding", "ScoreRequest",
    "ScoreResponse", "SeverityFilter", "SourceFile", "SplitAssignment",
    "StubScorer", "Tool", "balance", "changed_functions", "confusion",
    "cross_domain_matrix", "dataset_quality_report", "dedup_corpus",
    "enumerate_files", "extract_directory", "extract_functions",
    "fuse_annotations", "jaccard", "parse_report", "parse_unified_diff",
    "prf", "read_csv", "render_review", "run_review", "score_batch",
    "split", "stub_score", "tokenize", "window_candidates", "write_csv",
]

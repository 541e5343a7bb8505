"""Relevance judgment convergence (RJCD), retrieval evaluation and snippet re-ranking."""

from .judgments import (
    LABELS,
    InvalidInputError,
    ItemVerdict,
    JudgmentMatrix,
    Label,
    RjcdReport,
    UnresolvedTieError,
    Verdict,
    binary_verdict,
    fleiss_kappa,
    gamma,
    jaccard_agreement,
    qrels_from_judgments,
    rjcd,
    score_of,
    sum_scores,
)
from .metrics import (
    ContingencyTable,
    CorrelationResult,
    PrCurve,
    PrPoint,
    RecallLevelProfile,
    gate_queries,
    improvement,
    interpolated_profile,
    mean_profile_precision,
    p_at_n,
    pearson,
    pr_curve,
    precision,
    recall,
)

__version__ = "0.1.0"

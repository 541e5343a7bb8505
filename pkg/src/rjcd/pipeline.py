"""Per-query evaluation of a baseline ordering against a re-ranked one."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .judgments import (
    InvalidInputError,
    JudgmentMatrix,
    RjcdReport,
    Verdict,
    qrels_from_judgments,
    rjcd,
)
from .metrics import (
    CorrelationResult,
    PrCurve,
    RecallLevelProfile,
    improvement,
    interpolated_profile,
    mean_profile_precision,
    p_at_n,
    pearson,
    pr_curve,
)


@dataclass(frozen=True)
class QueryEvaluation:
    query_id: str
    report: RjcdReport
    qrels: tuple[bool, ...]
    baseline_curve: PrCurve
    reranked_curve: PrCurve
    baseline_profile: RecallLevelProfile
    reranked_profile: RecallLevelProfile
    order: tuple[int, ...]  # original ranks in re-ranked order

    @property
    def mean_precision_baseline(self) -> float:
        return mean_profile_precision(self.baseline_profile)

    @property
    def mean_precision_reranked(self) -> float:
        return mean_profile_precision(self.reranked_profile)

    @property
    def improvement(self) -> float:
        return improvement(self.baseline_profile, self.reranked_profile)

    def p_at(self, n: int = 10) -> tuple[float, float]:
        n = min(n, len(self.qrels))
        return p_at_n(self.qrels, n), p_at_n(_apply(self.qrels, self.order), n)


def _apply(qrels: Sequence[bool], order: Sequence[int]) -> list[bool]:
    return [qrels[r - 1] for r in order]


def evaluate_query(
    matrix: JudgmentMatrix,
    overrides: Mapping[tuple[str, int], Verdict] | None = None,
    reranked_order: Sequence[int] | None = None,
) -> QueryEvaluation:
    """Evaluate one query.

    ``reranked_order`` lists original ranks in their new order; when it is
    None the baseline order is used for both runs. Raises
    UnresolvedTieError if a zero-score item has no override.
    """
    qrels = qrels_from_judgments(matrix, overrides)
    n = len(qrels)
    order = tuple(reranked_order) if reranked_order is not None else tuple(range(1, n + 1))
    if sorted(order) != list(range(1, n + 1)):
        raise InvalidInputError(f"query {matrix.query_id!r}: re-ranked order is not a permutation of 1..{n}")
    r_total = sum(qrels)
    if r_total == 0:
        raise InvalidInputError(f"query {matrix.query_id!r}: no relevant items, precision/recall undefined")
    base = pr_curve(qrels, r_total, matrix.query_id)
    rer = pr_curve(_apply(qrels, order), r_total, matrix.query_id)
    return QueryEvaluation(
        matrix.query_id,
        rjcd(matrix),
        tuple(qrels),
        base,
        rer,
        interpolated_profile(base),
        interpolated_profile(rer),
        order,
    )


def correlate(evaluations: Sequence[QueryEvaluation]) -> CorrelationResult:
    """Pearson correlation between per-query RJCD and precision improvement."""
    return pearson([e.report.rho for e in evaluations], [e.improvement for e in evaluations])

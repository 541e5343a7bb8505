"""Retrieval effectiveness measures and the RJCD/improvement correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from scipy import stats

from .judgments import InvalidInputError, RjcdReport

RECALL_LEVELS: tuple[float, ...] = tuple(round(0.1 * i, 1) for i in range(1, 11))


class UndefinedMetricError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ContingencyTable:
    tp: int
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise InvalidInputError("contingency counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class PrPoint:
    rank: int
    cum_relevant: int
    recall: float
    precision: float


@dataclass(frozen=True)
class PrCurve:
    query_id: str
    total_relevant: int
    points: tuple[PrPoint, ...]


@dataclass(frozen=True)
class RecallLevelProfile:
    precisions: tuple[float, ...]
    levels: tuple[float, ...] = RECALL_LEVELS

    def __post_init__(self):
        if len(self.precisions) != len(self.levels):
            raise InvalidInputError("one precision value per recall level is required")


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    t_stat: float
    p_value: float


def round_half_up(x: float, places: int = 4) -> float:
    """Round half away from zero (the way printed tables round)."""
    q = Decimal(1).scaleb(-places)
    d = Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP)
    return float(d)


def precision(tbl: ContingencyTable) -> float:
    if tbl.tp + tbl.fp == 0:
        raise UndefinedMetricError("precision undefined: tp + fp = 0")
    return tbl.tp / (tbl.tp + tbl.fp)


def recall(tbl: ContingencyTable) -> float:
    if tbl.tp + tbl.fn == 0:
        raise UndefinedMetricError("recall undefined: tp + fn = 0")
    return tbl.tp / (tbl.tp + tbl.fn)


def p_at_n(ranked: Sequence[bool], n: int) -> float:
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if n > len(ranked):
        raise InvalidInputError(f"cannot take P@{n} of a list with {len(ranked)} items")
    return sum(1 for x in ranked[:n] if x) / n


def pr_curve(ranked: Sequence[bool], r_total: int | None = None, query_id: str = "") -> PrCurve:
    """Cumulative recall/precision at every relevant rank.

    ``r_total`` defaults to the number of relevant items in the list itself.
    """
    in_list = sum(1 for x in ranked if x)
    if r_total is None:
        r_total = in_list
    if r_total < 1:
        raise InvalidInputError("r_total must be >= 1")
    if in_list > r_total:
        raise InvalidInputError(f"{in_list} relevant items in list exceed r_total={r_total}")
    points = []
    cum = 0
    for rank, rel in enumerate(ranked, 1):
        if rel:
            cum += 1
            points.append(PrPoint(rank, cum, cum / r_total, cum / rank))
    return PrCurve(query_id, r_total, tuple(points))


def interpolated_profile(curve: PrCurve) -> RecallLevelProfile:
    """Max precision at recall >= level, for levels 0.1 .. 1.0."""
    if not curve.points:
        raise InvalidInputError("cannot interpolate an empty curve")
    pts = curve.points
    # suffix max over points ordered by recall
    suffix = [0.0] * (len(pts) + 1)
    for i in range(len(pts) - 1, -1, -1):
        suffix[i] = max(pts[i].precision, suffix[i + 1])
    out = []
    i = 0
    eps = 1e-12
    for level in RECALL_LEVELS:
        while i < len(pts) and pts[i].recall < level - eps:
            i += 1
        out.append(suffix[i])
    return RecallLevelProfile(tuple(out))


def mean_profile_precision(profile: RecallLevelProfile) -> float:
    return math.fsum(profile.precisions) / len(profile.precisions)


def improvement(baseline: RecallLevelProfile, treated: RecallLevelProfile) -> float:
    if tuple(baseline.levels) != tuple(treated.levels):
        raise InvalidInputError("profiles use different recall levels")
    return mean_profile_precision(treated) - mean_profile_precision(baseline)


def average_profiles(profiles: Iterable[RecallLevelProfile]) -> RecallLevelProfile:
    """Level-wise mean across queries (the averaged curve of a run)."""
    profiles = list(profiles)
    if not profiles:
        raise InvalidInputError("no profiles to average")
    cols = zip(*(p.precisions for p in profiles))
    return RecallLevelProfile(tuple(math.fsum(c) / len(profiles) for c in cols))


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Sample Pearson r with a two-tailed Student-t p-value (n - 2 df)."""
    n = len(x)
    if n != len(y):
        raise InvalidInputError("x and y differ in length")
    if n < 3:
        raise InvalidInputError("pearson needs at least 3 pairs")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [a - mx for a in x]
    dy = [b - my for b in y]
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0.0 or syy == 0.0:
        raise InvalidInputError("zero variance series")
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    df = n - 2
    if abs(r) == 1.0:
        return CorrelationResult(r, n, math.copysign(math.inf, r), 0.0)
    t = r * math.sqrt(df / (1.0 - r * r))
    p = 2.0 * stats.t.sf(abs(t), df)
    return CorrelationResult(r, n, t, min(1.0, float(p)))


def gate_queries(reports: Iterable[RjcdReport], threshold: float = 0.05) -> tuple[list[RjcdReport], list[RjcdReport]]:
    """Split reports into (kept, excluded); excluded have rho strictly below threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise InvalidInputError("threshold must lie in [0, 1]")
    kept, excluded = [], []
    for rep in reports:
        (excluded if rep.rho < threshold else kept).append(rep)
    return kept, excluded

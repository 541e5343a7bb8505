"""Graded relevance judgments, score aggregation and assessor convergence.

Each assessor puts a returned snippet into one of four categories:

    R  relevant
    P  partially relevant
    I  irrelevant
    N  not enough information in the snippet to decide

Scores are summed per item and collapsed to a binary verdict. The
convergence degree (RJCD) of a query is the number of unanimously judged
items divided by the total number of distinct labels used per item.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class InvalidInputError(ValueError):
    """Raised when an operation receives structurally invalid input."""


class UnresolvedTieError(InvalidInputError):
    """Raised when a zero-score item has no manual verdict."""

    def __init__(self, items: Sequence[tuple[str, int]]):
        self.items = list(items)
        listed = ", ".join(f"({q}, {r})" for q, r in self.items)
        super().__init__(f"unresolved ties without override: {listed}")


class Label(str, enum.Enum):
    R = "R"
    P = "P"
    I = "I"  # noqa: E741
    N = "N"

    @property
    def score(self) -> int:
        return SCORES[self]


SCORES = {Label.R: 3, Label.P: 1, Label.I: -3, Label.N: 0}

# Ω; iteration order is also the Fleiss category order.
LABELS: tuple[Label, ...] = (Label.R, Label.P, Label.I, Label.N)


class Verdict(str, enum.Enum):
    RELEVANT = "relevant"
    IRRELEVANT = "irrelevant"
    UNRESOLVED = "unresolved"


def parse_label(token: str) -> Label:
    """Case-sensitive lookup of a label token."""
    try:
        return Label(token)
    except ValueError:
        raise InvalidInputError(f"unknown label {token!r}") from None


@dataclass(frozen=True)
class JudgmentMatrix:
    """Judgments for one query: ``rows[i][j]`` is assessor j's label for rank i+1."""

    query_id: str
    rows: tuple[tuple[Label, ...], ...]
    assessors: tuple[str, ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(Label(x) for x in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise InvalidInputError(f"query {self.query_id!r}: no items")
        h = len(rows[0])
        if h < 1:
            raise InvalidInputError(f"query {self.query_id!r}: no assessors")
        for rank, row in enumerate(rows, 1):
            if len(row) != h:
                raise InvalidInputError(
                    f"query {self.query_id!r} rank {rank}: expected {h} labels, got {len(row)}"
                )
        if not self.assessors:
            object.__setattr__(self, "assessors", tuple(str(j + 1) for j in range(h)))
        elif len(self.assessors) != h:
            raise InvalidInputError("assessor id count does not match row width")

    @property
    def h(self) -> int:
        return len(self.rows[0])

    @property
    def n_items(self) -> int:
        return len(self.rows)

    def column(self, j: int) -> tuple[Label, ...]:
        return tuple(row[j] for row in self.rows)


@dataclass(frozen=True)
class ItemVerdict:
    rank: int
    score_sum: int
    verdict: Verdict


@dataclass(frozen=True)
class RjcdReport:
    query_id: str
    agreement_number: int
    judgment_number: int
    gammas: tuple[int, ...] = field(repr=False)

    @property
    def rho(self) -> float:
        return self.agreement_number / self.judgment_number

    # short aliases matching the report columns
    @property
    def AN(self) -> int:
        return self.agreement_number

    @property
    def JN(self) -> int:
        return self.judgment_number


def score_of(label: Label | str) -> int:
    return SCORES[Label(label)]


def sum_scores(row: Iterable[Label | str]) -> int:
    row = list(row)
    if not row:
        raise InvalidInputError("cannot score an empty row")
    return sum(score_of(x) for x in row)


def binary_verdict(score_sum: int, override: Verdict | str | None = None, rank: int = 0) -> ItemVerdict:
    """Collapse a summed score to relevant/irrelevant.

    A zero score takes ``override`` when given and is otherwise left
    unresolved.
    """
    if score_sum > 0:
        v = Verdict.RELEVANT
    elif score_sum < 0:
        v = Verdict.IRRELEVANT
    elif override is not None:
        v = Verdict(override)
        if v is Verdict.UNRESOLVED:
            raise InvalidInputError("an override must be relevant or irrelevant")
    else:
        v = Verdict.UNRESOLVED
    return ItemVerdict(rank, score_sum, v)


def gamma(row: Iterable[Label | str]) -> int:
    """Number of distinct labels the assessors used for one item."""
    labels = {Label(x) for x in row}
    if not labels:
        raise InvalidInputError("cannot compute gamma of an empty row")
    return len(labels)


def rjcd(matrix: JudgmentMatrix) -> RjcdReport:
    gammas = tuple(gamma(row) for row in matrix.rows)
    if not gammas:
        raise InvalidInputError("empty judgment matrix")
    an = sum(1 for g in gammas if g == 1)
    return RjcdReport(matrix.query_id, an, sum(gammas), gammas)


def verdicts(matrix: JudgmentMatrix, overrides: Mapping[tuple[str, int], Verdict | str] | None = None) -> list[ItemVerdict]:
    overrides = overrides or {}
    out = []
    for rank, row in enumerate(matrix.rows, 1):
        out.append(binary_verdict(sum_scores(row), overrides.get((matrix.query_id, rank)), rank))
    return out


def qrels_from_judgments(
    matrix: JudgmentMatrix,
    overrides: Mapping[tuple[str, int], Verdict | str] | None = None,
) -> list[bool]:
    """Binary relevance per rank (index 0 is rank 1).

    Raises UnresolvedTieError listing every zero-score item that has no
    override.
    """
    items = verdicts(matrix, overrides)
    pending = [(matrix.query_id, v.rank) for v in items if v.verdict is Verdict.UNRESOLVED]
    if pending:
        raise UnresolvedTieError(pending)
    return [v.verdict is Verdict.RELEVANT for v in items]


def fleiss_kappa(matrix: JudgmentMatrix) -> float:
    """Fleiss' kappa over the four label categories."""
    h = matrix.h
    if h < 2:
        raise InvalidInputError("Fleiss' kappa needs at least two assessors")
    n = matrix.n_items
    totals = Counter()
    p_bar = 0.0
    for row in matrix.rows:
        counts = Counter(row)
        totals.update(counts)
        p_bar += (sum(c * c for c in counts.values()) - h) / (h * (h - 1))
    p_bar /= n
    p_e = sum((totals[c] / (n * h)) ** 2 for c in LABELS)
    if p_e == 1.0:
        # every rating is the same category
        if p_bar == 1.0:
            return 1.0
        raise InvalidInputError("Fleiss' kappa undefined: expected agreement is 1")
    return (p_bar - p_e) / (1.0 - p_e)


JACCARD_RELEVANT = frozenset({Label.R, Label.P})


def jaccard_agreement(matrix: JudgmentMatrix, a: int, b: int, relevant=JACCARD_RELEVANT) -> float:
    """Jaccard overlap of the items two assessors marked relevant (R or P by default)."""
    h = matrix.h
    for idx in (a, b):
        if not 0 <= idx < h:
            raise InvalidInputError(f"assessor index {idx} out of range for h={h}")
    if a == b:
        raise InvalidInputError("jaccard_agreement needs two different assessors")
    set_a = {i for i, x in enumerate(matrix.column(a)) if x in relevant}
    set_b = {i for i, x in enumerate(matrix.column(b)) if x in relevant}
    union = set_a | set_b
    if not union:
        return 1.0
    return len(set_a & set_b) / len(union)

"""Readers and writers for the on-disk formats.

Canonical layouts (comma separated, UTF-8, header row required)::

    judgments.csv   query_id,rank,assessor_id,label
    overrides.csv   query_id,rank,verdict
    snippets.csv    query_id,rank,title,snippet,url
    queries.csv     query,info_need,category
    profiles.csv    query_id,topic1,topic2
    reranked.csv    query_id,new_rank,original_rank,topic
    corpus.tsv      topic<TAB>text            (no header)

Every loader takes an optional ``column_map`` of canonical name -> actual
header name for files that use other column titles.
"""

from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .judgments import (
    InvalidInputError,
    JudgmentMatrix,
    Label,
    RjcdReport,
    Verdict,
    parse_label,
)
from .metrics import CorrelationResult, PrCurve, RecallLevelProfile, round_half_up
from .rerank import PreferenceProfile, RerankedItem, Snippet, check_topic

JUDGMENT_COLUMNS = ("query_id", "rank", "assessor_id", "label")
OVERRIDE_COLUMNS = ("query_id", "rank", "verdict")
SNIPPET_COLUMNS = ("query_id", "rank", "title", "snippet", "url")
QUERY_COLUMNS = ("query", "info_need", "category")
PROFILE_COLUMNS = ("query_id", "topic1", "topic2")
RANKING_COLUMNS = ("query_id", "new_rank", "original_rank", "topic")


class DataFormatError(InvalidInputError):
    """A problem in an input file; carries file name and line number."""

    kind = "format"

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class MissingColumnError(DataFormatError):
    kind = "missing-column"


class UnknownLabelError(DataFormatError):
    kind = "unknown-label"


class DuplicateJudgmentError(DataFormatError):
    kind = "duplicate-judgment"


class MissingCellError(DataFormatError):
    kind = "missing-cell"


class DuplicateRankError(DataFormatError):
    kind = "duplicate-rank"


class RankGapError(DataFormatError):
    kind = "rank-gap"


class QueryCategory(str, enum.Enum):
    AMBIGUOUS = "Ambiguous"
    ENTITY = "Entity"
    GENERAL = "General"


@dataclass(frozen=True)
class QueryRecord:
    query: str
    information_need: str
    category: QueryCategory


@dataclass
class Dataset:
    queries: list[QueryRecord] = field(default_factory=list)
    snippets: dict[str, list[Snippet]] = field(default_factory=dict)
    judgments: list[JudgmentMatrix] = field(default_factory=list)
    overrides: dict[tuple[str, int], Verdict] = field(default_factory=dict)


def _assessor_key(a: str):
    return (0, int(a), a) if a.isdigit() else (1, 0, a)


def _rows(path, columns: Sequence[str], column_map: Mapping[str, str] | None) -> Iterator[tuple[int, dict]]:
    """Yield (line number, {canonical column: value}) for every data row."""
    column_map = dict(column_map or {})
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(path, None, f"cannot open: {exc.strerror or exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(path, 1, "empty file, header row expected") from None
        header = [h.strip() for h in header]
        idx = {}
        for col in columns:
            actual = column_map.get(col, col)
            if actual not in header:
                raise MissingColumnError(path, 1, f"missing column {actual!r}")
            idx[col] = header.index(actual)
        start = reader.line_num
        for row in reader:
            line = start + 1
            start = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise DataFormatError(path, line, f"expected {len(header)} fields, got {len(row)}")
            yield line, {col: row[i] for col, i in idx.items()}


def _int(path, line: int, value: str, what: str, minimum: int = 1) -> int:
    try:
        n = int(value.strip())
    except ValueError:
        raise DataFormatError(path, line, f"{what} must be an integer, got {value!r}") from None
    if n < minimum:
        raise DataFormatError(path, line, f"{what} must be >= {minimum}, got {n}")
    return n


def _check_contiguous(path, qid: str, first_line: Mapping[int, int]):
    ranks = sorted(first_line)
    for expected, rank in enumerate(ranks, 1):
        if rank != expected:
            raise RankGapError(path, first_line[rank], f"query {qid!r}: ranks not contiguous, expected {expected} but found {rank}")


def load_judgments(path, column_map: Mapping[str, str] | None = None) -> list[JudgmentMatrix]:
    """One matrix per query, in order of first appearance in the file."""
    cells: dict[str, dict[int, dict[str, Label]]] = {}
    first_line: dict[str, dict[int, int]] = {}
    for line, rec in _rows(path, JUDGMENT_COLUMNS, column_map):
        qid = rec["query_id"].strip()
        if not qid:
            raise DataFormatError(path, line, "empty query_id")
        rank = _int(path, line, rec["rank"], "rank")
        assessor = rec["assessor_id"].strip()
        if not assessor:
            raise DataFormatError(path, line, "empty assessor_id")
        token = rec["label"].strip()
        try:
            label = parse_label(token)
        except InvalidInputError:
            raise UnknownLabelError(path, line, f"unknown label {token!r} (expected one of R, P, I, N)") from None
        row = cells.setdefault(qid, {}).setdefault(rank, {})
        first_line.setdefault(qid, {}).setdefault(rank, line)
        if assessor in row:
            raise DuplicateJudgmentError(path, line, f"duplicate judgment for query {qid!r} rank {rank} assessor {assessor!r}")
        row[assessor] = label
    if not cells:
        raise DataFormatError(path, None, "no judgments found")
    out = []
    for qid, by_rank in cells.items():
        _check_contiguous(path, qid, first_line[qid])
        assessors = sorted({a for row in by_rank.values() for a in row}, key=_assessor_key)
        rows = []
        for rank in sorted(by_rank):
            row = by_rank[rank]
            missing = [a for a in assessors if a not in row]
            if missing:
                raise MissingCellError(
                    path, first_line[qid][rank], f"query {qid!r} rank {rank}: no judgment from assessor(s) {', '.join(missing)}"
                )
            rows.append(tuple(row[a] for a in assessors))
        out.append(JudgmentMatrix(qid, tuple(rows), tuple(assessors)))
    return out


def load_overrides(path, column_map: Mapping[str, str] | None = None) -> dict[tuple[str, int], Verdict]:
    out: dict[tuple[str, int], Verdict] = {}
    for line, rec in _rows(path, OVERRIDE_COLUMNS, column_map):
        key = (rec["query_id"].strip(), _int(path, line, rec["rank"], "rank"))
        token = rec["verdict"].strip().lower()
        if token not in ("relevant", "irrelevant"):
            raise DataFormatError(path, line, f"verdict must be 'relevant' or 'irrelevant', got {rec['verdict']!r}")
        if key in out:
            raise DataFormatError(path, line, f"duplicate override for {key}")
        out[key] = Verdict(token)
    return out


def load_snippets(path, column_map: Mapping[str, str] | None = None) -> dict[str, list[Snippet]]:
    by_query: dict[str, dict[int, Snippet]] = {}
    first_line: dict[str, dict[int, int]] = {}
    for line, rec in _rows(path, SNIPPET_COLUMNS, column_map):
        qid = rec["query_id"].strip()
        rank = _int(path, line, rec["rank"], "rank")
        ranks = by_query.setdefault(qid, {})
        if rank in ranks:
            raise DuplicateRankError(path, line, f"query {qid!r}: duplicate rank {rank}")
        try:
            ranks[rank] = Snippet(qid, rank, rec["title"], rec["snippet"], rec["url"].strip())
        except InvalidInputError as exc:
            raise DataFormatError(path, line, str(exc)) from None
        first_line.setdefault(qid, {})[rank] = line
    out = {}
    for qid, ranks in by_query.items():
        _check_contiguous(path, qid, first_line[qid])
        out[qid] = [ranks[r] for r in sorted(ranks)]
    return out


def load_queries(path, column_map: Mapping[str, str] | None = None) -> list[QueryRecord]:
    out = []
    for line, rec in _rows(path, QUERY_COLUMNS, column_map):
        query = rec["query"].strip()
        if not query:
            raise DataFormatError(path, line, "empty query")
        try:
            cat = QueryCategory(rec["category"].strip())
        except ValueError:
            raise DataFormatError(path, line, f"category must be Ambiguous, Entity or General, got {rec['category']!r}") from None
        out.append(QueryRecord(query, rec["info_need"].strip(), cat))
    return out


def load_profiles(path, column_map: Mapping[str, str] | None = None) -> dict[str, PreferenceProfile]:
    out = {}
    for line, rec in _rows(path, PROFILE_COLUMNS, column_map):
        qid = rec["query_id"].strip()
        if qid in out:
            raise DataFormatError(path, line, f"duplicate profile for query {qid!r}")
        try:
            out[qid] = PreferenceProfile((rec["topic1"].strip(), rec["topic2"].strip()))
        except InvalidInputError as exc:
            raise DataFormatError(path, line, str(exc)) from None
    return out


def load_corpus(path) -> list[tuple[str, str]]:
    """Training corpus as (text, topic) pairs."""
    path = Path(path)
    out = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(path, None, f"cannot open: {exc.strerror or exc}") from None
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise DataFormatError(path, line_no, "expected 'topic<TAB>text'")
        topic, doc = line.split("\t", 1)
        try:
            check_topic(topic.strip())
        except InvalidInputError as exc:
            raise DataFormatError(path, line_no, str(exc)) from None
        out.append((doc, topic.strip()))
    if not out:
        raise DataFormatError(path, None, "empty corpus")
    return out


def load_rankings(path, column_map: Mapping[str, str] | None = None) -> dict[str, list[int]]:
    """Re-ranked orderings: query_id -> original ranks listed in new-rank order."""
    by_query: dict[str, dict[int, int]] = {}
    first_line: dict[str, dict[int, int]] = {}
    for line, rec in _rows(path, RANKING_COLUMNS, column_map):
        qid = rec["query_id"].strip()
        new = _int(path, line, rec["new_rank"], "new_rank")
        orig = _int(path, line, rec["original_rank"], "original_rank")
        topic = rec["topic"].strip()
        if topic:
            try:
                check_topic(topic)
            except InvalidInputError as exc:
                raise DataFormatError(path, line, str(exc)) from None
        ranks = by_query.setdefault(qid, {})
        if new in ranks:
            raise DuplicateRankError(path, line, f"query {qid!r}: duplicate new_rank {new}")
        if orig in ranks.values():
            raise DuplicateRankError(path, line, f"query {qid!r}: original_rank {orig} listed twice")
        ranks[new] = orig
        first_line.setdefault(qid, {})[new] = line
    out = {}
    for qid, ranks in by_query.items():
        _check_contiguous(path, qid, first_line[qid])
        order = [ranks[r] for r in sorted(ranks)]
        if sorted(order) != list(range(1, len(order) + 1)):
            raise RankGapError(path, None, f"query {qid!r}: original ranks are not a permutation of 1..{len(order)}")
        out[qid] = order
    return out


def load_dataset(
    judgments,
    snippets=None,
    queries=None,
    overrides=None,
    column_map: Mapping[str, str] | None = None,
) -> Dataset:
    """Load a full dataset and cross-check judgments against snippets."""
    ds = Dataset(judgments=load_judgments(judgments, column_map))
    if snippets is not None:
        ds.snippets = load_snippets(snippets, column_map)
        for m in ds.judgments:
            have = len(ds.snippets.get(m.query_id, ()))
            if m.n_items > have:
                raise DataFormatError(judgments, None, f"query {m.query_id!r}: judgments reference rank {m.n_items} but only {have} snippets exist")
    if queries is not None:
        ds.queries = load_queries(queries, column_map)
    if overrides is not None:
        ds.overrides = load_overrides(overrides, column_map)
    return ds


# -- writers ---------------------------------------------------------------


def fmt(x: float) -> str:
    return f"{round_half_up(x, 4):.4f}"


def safe_name(query_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", query_id).strip("_") or "query"


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_judgments(path, matrices: Iterable[JudgmentMatrix]) -> Path:
    rows = []
    for m in matrices:
        for rank, row in enumerate(m.rows, 1):
            for a, label in zip(m.assessors, row):
                rows.append((m.query_id, rank, a, label.value))
    return _write_csv(path, JUDGMENT_COLUMNS, rows)


def write_overrides(path, overrides: Mapping[tuple[str, int], Verdict]) -> Path:
    return _write_csv(path, OVERRIDE_COLUMNS, ((q, r, Verdict(v).value) for (q, r), v in overrides.items()))


def write_snippets(path, snippets: Mapping[str, Sequence[Snippet]]) -> Path:
    rows = ((s.query_id, s.rank, s.title, s.summary, s.url) for lst in snippets.values() for s in lst)
    return _write_csv(path, SNIPPET_COLUMNS, rows)


def write_queries(path, queries: Iterable[QueryRecord]) -> Path:
    return _write_csv(path, QUERY_COLUMNS, ((q.query, q.information_need, q.category.value) for q in queries))


def write_profiles(path, profiles: Mapping[str, PreferenceProfile]) -> Path:
    from .rerank import TOPICS

    rows = []
    for qid, prof in profiles.items():
        t1, t2 = sorted(prof.topics, key=TOPICS.index)
        rows.append((qid, t1, t2))
    return _write_csv(path, PROFILE_COLUMNS, rows)


def write_dataset(out_dir, ds: Dataset) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {"judgments": write_judgments(out_dir / "judgments.csv", ds.judgments)}
    if ds.snippets:
        files["snippets"] = write_snippets(out_dir / "snippets.csv", ds.snippets)
    if ds.queries:
        files["queries"] = write_queries(out_dir / "queries.csv", ds.queries)
    if ds.overrides:
        files["overrides"] = write_overrides(out_dir / "overrides.csv", ds.overrides)
    return files


def write_rjcd_csv(path, reports: Iterable[RjcdReport]) -> Path:
    return _write_csv(path, ("query_id", "rho", "AN", "JN"), ((r.query_id, fmt(r.rho), r.AN, r.JN) for r in reports))


def write_gate_csv(path, kept: Iterable[RjcdReport], excluded: Iterable[RjcdReport]) -> Path:
    rows = [(r.query_id, fmt(r.rho), r.AN, r.JN, "kept") for r in kept]
    rows += [(r.query_id, fmt(r.rho), r.AN, r.JN, "excluded") for r in excluded]
    return _write_csv(path, ("query_id", "rho", "AN", "JN", "decision"), rows)


def write_curve_csv(path, curve: PrCurve) -> Path:
    return _write_csv(path, ("rank", "recall", "precision"), ((p.rank, fmt(p.recall), fmt(p.precision)) for p in curve.points))


def write_profile_csv(path, profile: RecallLevelProfile) -> Path:
    return _write_csv(path, ("level", "precision"), ((f"{lv:.1f}", fmt(p)) for lv, p in zip(profile.levels, profile.precisions)))


def write_correlation_csv(path, result: CorrelationResult | None) -> Path:
    rows = []
    if result is not None:
        t = fmt(result.t_stat) if math.isfinite(result.t_stat) else str(result.t_stat)
        # p-values are tiny; fixed 4 decimals would print 0.0000
        rows.append((result.n, fmt(result.r), t, f"{result.p_value:.4e}"))
    return _write_csv(path, ("n", "r", "t_stat", "p_value"), rows)


def write_reranked_csv(path, results: Mapping[str, Sequence[RerankedItem]]) -> Path:
    rows = ((qid, it.new_rank, it.snippet.rank, it.topic) for qid, items in results.items() for it in items)
    return _write_csv(path, RANKING_COLUMNS, rows)


def write_sweep_csv(path, rows) -> Path:
    return _write_csv(path, ("p_unanimous", "seed", "rho", "AN", "JN"), ((f"{r.p_unanimous:g}", r.seed, fmt(r.rho), r.AN, r.JN) for r in rows))


SUMMARY_COLUMNS = (
    "query_id",
    "rho",
    "AN",
    "JN",
    "mean_precision_baseline",
    "mean_precision_reranked",
    "improvement",
)


def write_summary_csv(path, evaluations) -> Path:
    rows = (
        (e.query_id, fmt(e.report.rho), e.report.AN, e.report.JN, fmt(e.mean_precision_baseline), fmt(e.mean_precision_reranked), fmt(e.improvement))
        for e in evaluations
    )
    return _write_csv(path, SUMMARY_COLUMNS, rows)


def load_summary(path) -> list[tuple[str, float, float]]:
    """(query_id, rho, improvement) triples from a summary.csv."""
    out = []
    for line, rec in _rows(path, ("query_id", "rho", "improvement"), None):
        try:
            out.append((rec["query_id"], float(rec["rho"]), float(rec["improvement"])))
        except ValueError:
            raise DataFormatError(path, line, "rho and improvement must be numbers") from None
    return out


def write_reports(evaluations, out_dir, *, threshold: float = 0.05, correlation: CorrelationResult | None = None, figures: bool = True, include_correlation: bool = True) -> list[Path]:
    """Write the full report set for a list of QueryEvaluation objects.

    Files::

        rjcd.csv, summary.csv, gate.csv, p_at_10.csv, correlation.csv
        curves/<query>_baseline.csv, curves/<query>_reranked.csv
        profiles/<query>_baseline.csv, profiles/<query>_reranked.csv
        figures/pr_<query>.svg, figures/pr_average.svg, figures/improvement_rjcd.svg
    """
    from .metrics import average_profiles, gate_queries

    evaluations = list(evaluations)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "curves").mkdir(exist_ok=True)
    (out_dir / "profiles").mkdir(exist_ok=True)
    reports = [e.report for e in evaluations]
    kept, excluded = gate_queries(reports, threshold)
    files = [
        write_rjcd_csv(out_dir / "rjcd.csv", reports),
        write_summary_csv(out_dir / "summary.csv", evaluations),
        write_gate_csv(out_dir / "gate.csv", kept, excluded),
        _write_csv(out_dir / "p_at_10.csv", ("query_id", "baseline", "reranked"), ((e.query_id, *map(fmt, e.p_at(10))) for e in evaluations)),
    ]
    if include_correlation:
        files.append(write_correlation_csv(out_dir / "correlation.csv", correlation))
    for e in evaluations:
        name = safe_name(e.query_id)
        files.append(write_curve_csv(out_dir / "curves" / f"{name}_baseline.csv", e.baseline_curve))
        files.append(write_curve_csv(out_dir / "curves" / f"{name}_reranked.csv", e.reranked_curve))
        files.append(write_profile_csv(out_dir / "profiles" / f"{name}_baseline.csv", e.baseline_profile))
        files.append(write_profile_csv(out_dir / "profiles" / f"{name}_reranked.csv", e.reranked_profile))
    if figures:
        from . import plotting

        fig_dir = out_dir / "figures"
        fig_dir.mkdir(exist_ok=True)
        for e in evaluations:
            files.append(plotting.plot_pr_profiles(fig_dir / f"pr_{safe_name(e.query_id)}.svg", e.baseline_profile, e.reranked_profile, e.query_id))
        if evaluations:
            files.append(
                plotting.plot_pr_profiles(
                    fig_dir / "pr_average.svg",
                    average_profiles(e.baseline_profile for e in evaluations),
                    average_profiles(e.reranked_profile for e in evaluations),
                    f"average over {len(evaluations)} queries",
                )
            )
            files.append(
                plotting.plot_improvement_vs_rjcd(
                    fig_dir / "improvement_rjcd.svg",
                    [e.query_id for e in evaluations],
                    [e.report.rho for e in evaluations],
                    [e.improvement for e in evaluations],
                    threshold,
                )
            )
    return files

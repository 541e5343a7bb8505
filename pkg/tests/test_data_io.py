import csv

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from rjcd import data_io
from rjcd.data_io import (
    Dataset,
    DuplicateJudgmentError,
    DuplicateRankError,
    MissingCellError,
    MissingColumnError,
    QueryCategory,
    QueryRecord,
    RankGapError,
    UnknownLabelError,
)
from rjcd.judgments import LABELS, JudgmentMatrix, Verdict, rjcd
from rjcd.pipeline import evaluate_query
from rjcd.rerank import TOPICS, PreferenceProfile, Snippet


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_fixture(resume_matrix):
    assert resume_matrix.query_id == "resume"
    assert (resume_matrix.n_items, resume_matrix.h) == (50, 5)
    assert resume_matrix.assessors == ("1", "2", "3", "4", "5")


def test_unknown_label(tmp_path):
    p = write(tmp_path / "j.csv", "query_id,rank,assessor_id,label\nq,1,a,R\nq,1,b,X\n")
    with pytest.raises(UnknownLabelError) as exc:
        data_io.load_judgments(p)
    assert exc.value.line == 3 and "j.csv:3" in str(exc.value)


def test_labels_case_sensitive(tmp_path):
    p = write(tmp_path / "j.csv", "query_id,rank,assessor_id,label\nq,1,a,r\n")
    with pytest.raises(UnknownLabelError):
        data_io.load_judgments(p)


def test_missing_cell(tmp_path):
    p = write(
        tmp_path / "j.csv",
        "query_id,rank,assessor_id,label\nq,1,1,R\nq,1,2,R\nq,1,3,R\nq,2,1,I\nq,2,2,I\n",
    )
    with pytest.raises(MissingCellError) as exc:
        data_io.load_judgments(p)
    assert exc.value.line == 5 and "assessor(s) 3" in str(exc.value)


def test_duplicate_judgment(tmp_path):
    p = write(tmp_path / "j.csv", "query_id,rank,assessor_id,label\nq,1,a,R\nq,1,a,P\n")
    with pytest.raises(DuplicateJudgmentError):
        data_io.load_judgments(p)


def test_rank_gap_in_judgments(tmp_path):
    p = write(tmp_path / "j.csv", "query_id,rank,assessor_id,label\nq,1,a,R\nq,3,a,P\n")
    with pytest.raises(RankGapError):
        data_io.load_judgments(p)


def test_empty_and_header_only(tmp_path):
    with pytest.raises(data_io.DataFormatError):
        data_io.load_judgments(write(tmp_path / "e.csv", ""))
    with pytest.raises(data_io.DataFormatError):
        data_io.load_judgments(write(tmp_path / "h.csv", "query_id,rank,assessor_id,label\n"))
    with pytest.raises(MissingColumnError):
        data_io.load_judgments(write(tmp_path / "c.csv", "query,rank,assessor,label\n"))
    with pytest.raises(data_io.DataFormatError, match="cannot open"):
        data_io.load_judgments(tmp_path / "absent.csv")


def test_column_map(tmp_path):
    p = write(tmp_path / "j.csv", "topic,pos,judge,grade\nq,1,a,R\nq,1,b,N\n")
    (m,) = data_io.load_judgments(p, {"query_id": "topic", "rank": "pos", "assessor_id": "judge", "label": "grade"})
    assert m.rows == (("R", "N"),)


def test_assessor_order_sorted(tmp_path):
    p = write(tmp_path / "j.csv", "query_id,rank,assessor_id,label\nq,1,10,R\nq,1,2,P\nq,1,b,I\nq,1,a,N\n")
    (m,) = data_io.load_judgments(p)
    assert m.assessors == ("2", "10", "a", "b")


def snippet_file(tmp_path, ranks):
    rows = ["query_id,rank,title,snippet,url"]
    for r in ranks:
        rows.append(f'q,{r},"Title, {r}","text, with ""quotes"" {r}",http://x/{r}')
    return write(tmp_path / "s.csv", "\n".join(rows) + "\n")


def test_snippets(tmp_path):
    snips = data_io.load_snippets(snippet_file(tmp_path, range(1, 51)))
    assert [s.rank for s in snips["q"]] == list(range(1, 51))
    assert snips["q"][0].title == "Title, 1"
    assert snips["q"][0].summary == 'text, with "quotes" 1'
    with pytest.raises(RankGapError):
        data_io.load_snippets(snippet_file(tmp_path, [1, 2, 4]))
    with pytest.raises(DuplicateRankError):
        data_io.load_snippets(snippet_file(tmp_path, [1, 2, 2]))


def test_overrides_profiles_queries_corpus(tmp_path):
    o = data_io.load_overrides(write(tmp_path / "o.csv", "query_id,rank,verdict\nq,3,relevant\nq,4,Irrelevant\n"))
    assert o == {("q", 3): Verdict.RELEVANT, ("q", 4): Verdict.IRRELEVANT}
    with pytest.raises(data_io.DataFormatError):
        data_io.load_overrides(write(tmp_path / "o2.csv", "query_id,rank,verdict\nq,3,maybe\n"))
    prof = data_io.load_profiles(write(tmp_path / "p.csv", "query_id,topic1,topic2\nq,Kids & Teens,Arts\n"))
    assert prof["q"].topics == {"Kids & Teens", "Arts"}
    with pytest.raises(data_io.DataFormatError):
        data_io.load_profiles(write(tmp_path / "p2.csv", "query_id,topic1,topic2\nq,Arts,Arts\n"))
    qs = data_io.load_queries(write(tmp_path / "q.csv", "query,info_need,category\nresume,how to write a resume,General\n"))
    assert qs == [QueryRecord("resume", "how to write a resume", QueryCategory.GENERAL)]
    with pytest.raises(data_io.DataFormatError):
        data_io.load_queries(write(tmp_path / "q2.csv", "query,info_need,category\nx,y,Vague\n"))
    corpus = data_io.load_corpus(write(tmp_path / "c.tsv", "Arts\tpainting gallery\nSports\tfootball\n"))
    assert corpus == [("painting gallery", "Arts"), ("football", "Sports")]
    with pytest.raises(data_io.DataFormatError) as exc:
        data_io.load_corpus(write(tmp_path / "c2.tsv", "Arts\tok\nNotATopic\tx\n"))
    assert exc.value.line == 2


def test_rankings(resume_order, tmp_path):
    assert resume_order[:5] == [2, 4, 5, 7, 8]
    assert sorted(resume_order) == list(range(1, 51))
    bad = write(tmp_path / "r.csv", "query_id,new_rank,original_rank,topic\nq,1,1,\nq,2,1,\n")
    with pytest.raises(DuplicateRankError):
        data_io.load_rankings(bad)


def test_load_dataset_cross_check(tmp_path, data_dir):
    snips = snippet_file(tmp_path, range(1, 11))
    with pytest.raises(data_io.DataFormatError, match="only 0 snippets"):
        data_io.load_dataset(data_dir / "resume_judgments.csv", snips)


label_rows = st.lists(st.sampled_from(LABELS), min_size=3, max_size=3)
texts = st.text(st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=20).filter(lambda t: t.strip())


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.lists(label_rows, min_size=1, max_size=6), min_size=1, max_size=3), st.data())
def test_round_trip(tmp_path, matrices, data):
    ds = Dataset()
    for qi, rows in enumerate(matrices):
        qid = f"q{qi}"
        ds.judgments.append(JudgmentMatrix(qid, rows, ("a1", "a2", "b")))
        pairs = data.draw(st.lists(st.tuples(texts, texts), min_size=len(rows), max_size=len(rows)))
        ds.snippets[qid] = [Snippet(qid, r, t, s, f"http://e/{r}") for r, (t, s) in enumerate(pairs, 1)]
    ds.queries = [QueryRecord("q0", "need, with comma", QueryCategory.ENTITY)]
    ds.overrides = {("q0", 1): Verdict.RELEVANT}
    out = tmp_path / f"rt{data.draw(st.integers(0, 10**9))}"
    files = data_io.write_dataset(out, ds)
    back = data_io.load_dataset(files["judgments"], files["snippets"], files["queries"], files["overrides"])
    assert back.judgments == ds.judgments
    assert back.snippets == ds.snippets
    assert back.queries == ds.queries
    assert back.overrides == ds.overrides


def test_profiles_round_trip(tmp_path):
    profiles = {"a": PreferenceProfile([TOPICS[3], TOPICS[0]]), "b": PreferenceProfile(["Kids & Teens", "News"])}
    assert data_io.load_profiles(data_io.write_profiles(tmp_path / "p.csv", profiles)) == profiles


def read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_write_reports_fixture(tmp_path, resume_matrix, resume_order):
    e = evaluate_query(resume_matrix, None, resume_order)
    files = data_io.write_reports([e], tmp_path)
    assert read(tmp_path / "rjcd.csv") == [["query_id", "rho", "AN", "JN"], ["resume", "0.0069", "1", "145"]]
    assert len(read(tmp_path / "profiles" / "resume_baseline.csv")) == 11
    curve = read(tmp_path / "curves" / "resume_baseline.csv")
    assert curve[0] == ["rank", "recall", "precision"]
    assert ["12", "0.3030", "0.8333"] in curve
    assert (tmp_path / "figures" / "pr_average.svg").read_text().lstrip().startswith("<?xml")
    assert all(f.exists() for f in files)


def test_write_reports_empty(tmp_path):
    data_io.write_reports([], tmp_path)
    for name in ("rjcd.csv", "summary.csv", "gate.csv", "p_at_10.csv", "correlation.csv"):
        assert len(read(tmp_path / name)) == 1
    assert read(tmp_path / "summary.csv")[0] == list(data_io.SUMMARY_COLUMNS)


def test_write_reports_two_queries(tmp_path, resume_matrix):
    other = JudgmentMatrix("resume writing/tips", resume_matrix.rows[:10], resume_matrix.assessors)
    evals = [evaluate_query(resume_matrix), evaluate_query(other)]
    data_io.write_reports(evals, tmp_path, figures=False)
    names = sorted(p.name for p in (tmp_path / "curves").iterdir())
    assert names == ["resume_baseline.csv", "resume_reranked.csv", "resume_writing_tips_baseline.csv", "resume_writing_tips_reranked.csv"]
    first = (tmp_path / "summary.csv").read_bytes()
    data_io.write_reports(evals, tmp_path, figures=False)
    assert (tmp_path / "summary.csv").read_bytes() == first


def test_figures_deterministic(tmp_path, resume_matrix, resume_order):
    e = evaluate_query(resume_matrix, None, resume_order)
    data_io.write_reports([e], tmp_path / "a")
    data_io.write_reports([e], tmp_path / "b")
    for name in ("pr_average.svg", "improvement_rjcd.svg"):
        assert (tmp_path / "a" / "figures" / name).read_bytes() == (tmp_path / "b" / "figures" / name).read_bytes()


def test_unwritable_output(tmp_path, resume_matrix):
    blocker = write(tmp_path / "file", "x")
    with pytest.raises(OSError):
        data_io.write_reports([evaluate_query(resume_matrix)], blocker / "sub")


def test_rjcd_report_from_loaded_sim(tmp_path):
    m = JudgmentMatrix("s", ["RRR", "RPI"])
    (back,) = data_io.load_judgments(data_io.write_judgments(tmp_path / "j.csv", [m]))
    assert rjcd(back) == rjcd(m)


def test_reconstruction_touches_only_row_46(resume_matrix, resume_literal):
    diffs = [
        (rank, a)
        for rank, (r1, r2) in enumerate(zip(resume_matrix.rows, resume_literal.rows), 1)
        for a, x, y in zip(resume_matrix.assessors, r1, r2)
        if x != y
    ]
    assert diffs == [(46, "3"), (46, "5")]

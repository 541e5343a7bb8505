import csv
from pathlib import Path

import pytest

from rjcd import data_io

DATA = Path(__file__).parent / "data"

# filled by test_acceptance; printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def resume_table():
    """Published "resume" judgment table, one dict per row (ints and floats parsed)."""
    rows = []
    with open(DATA / "resume_published.csv", newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append({k: (float(v) if "." in v else int(v)) for k, v in rec.items()})
    return rows


@pytest.fixture(scope="session")
def resume_matrix():
    (m,) = data_io.load_judgments(DATA / "resume_judgments.csv")
    return m


@pytest.fixture(scope="session")
def resume_literal():
    (m,) = data_io.load_judgments(DATA / "resume_judgments_literal.csv")
    return m


@pytest.fixture(scope="session")
def resume_order():
    return data_io.load_rankings(DATA / "resume_reranked.csv")["resume"]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""Topic-based re-ranking of Web snippet result lists.

The pipeline runs in five steps:

1. A labelled corpus over the 15 top-level ODP topics is the training set.
2. A multinomial naive Bayes model assigns each snippet a topic.
3. The NB labels are smoothed by a k-nearest-neighbour vote over TF-IDF
   cosine similarity between the snippets of one query.
4. The NB and smoothed labels are merged. Where they disagree, NB wins
   only if its log-posterior margin is at least ``tau``.
5. Snippets whose topic is in the user's two-topic preference profile move
   to the front. Relative order is kept inside both groups.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence, TypeVar

from .judgments import InvalidInputError

TOPICS: tuple[str, ...] = (
    "Arts",
    "Business",
    "Computers",
    "Games",
    "Health",
    "Home",
    "News",
    "Recreation",
    "Reference",
    "Regional",
    "Science",
    "Shopping",
    "Society",
    "Sports",
    "Kids & Teens",
)
_TOPIC_ORDER = {t: i for i, t in enumerate(TOPICS)}

DEFAULT_K = 5
DEFAULT_TAU = 2.0

_TOKEN_RE = re.compile(r"[a-z0-9]+")

T = TypeVar("T")


def check_topic(name: str) -> str:
    if name not in _TOPIC_ORDER:
        raise InvalidInputError(f"unknown topic {name!r}")
    return name


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    text = resources.files("rjcd.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.split() if w.strip())


def toy_corpus() -> list[tuple[str, str]]:
    """Small bundled training corpus, three documents per topic."""
    text = resources.files("rjcd.data").joinpath("toy_corpus.tsv").read_text(encoding="utf-8")
    out = []
    for line in text.splitlines():
        if line.strip():
            topic, doc = line.split("\t", 1)
            out.append((doc, topic))
    return out


@dataclass(frozen=True)
class Snippet:
    query_id: str
    rank: int
    title: str
    summary: str
    url: str = ""

    def __post_init__(self):
        if not " ".join(f"{self.title} {self.summary}".split()):
            raise InvalidInputError(f"query {self.query_id!r} rank {self.rank}: empty snippet text")

    @property
    def text(self) -> str:
        return f"{self.title} {self.summary}"


@dataclass(frozen=True)
class PreferenceProfile:
    topics: frozenset[str]

    def __init__(self, topics: Iterable[str]):
        ts = frozenset(check_topic(t) for t in topics)
        if len(ts) != 2:
            raise InvalidInputError("a preference profile holds exactly two distinct topics")
        object.__setattr__(self, "topics", ts)

    def __contains__(self, topic: str) -> bool:
        return topic in self.topics


def tokenize(text: str) -> list[str]:
    stop = stopwords()
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) > 1 and t not in stop]


def featurize(text: str, mode: str = "counts", idf: Mapping[str, float] | None = None) -> dict[str, float]:
    """Sparse term vector of ``text``: raw counts, or counts times idf."""
    counts = Counter(tokenize(text))
    if mode == "counts":
        return dict(counts)
    if mode != "tfidf":
        raise ValueError(f"unknown featurize mode {mode!r}")
    if idf is None:
        raise InvalidInputError("tfidf mode needs idf statistics")
    vec = {t: c * idf[t] for t, c in counts.items() if idf.get(t, 0.0) > 0.0}
    return vec


def idf_table(texts: Sequence[str]) -> dict[str, float]:
    """Smoothed idf, ``ln((1 + n) / (1 + df)) + 1``, always positive."""
    n = len(texts)
    df = Counter()
    for text in texts:
        df.update(set(tokenize(text)))
    return {t: math.log((1 + n) / (1 + d)) + 1.0 for t, d in df.items()}


def cosine(u: Mapping[str, float], v: Mapping[str, float]) -> float:
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v.get(t, 0.0) for t, w in u.items())
    if dot == 0.0:
        return 0.0
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    return dot / (nu * nv)


@dataclass
class NbModel:
    topics: tuple[str, ...]
    vocabulary: frozenset[str]
    log_prior: dict[str, float]
    # per topic: term -> log P(term | topic)
    log_cond: dict[str, dict[str, float]] = field(repr=False)

    def log_posteriors(self, vec: Mapping[str, float]) -> dict[str, float]:
        """Unnormalised log posterior per topic; out-of-vocabulary terms are ignored."""
        out = {}
        for topic in self.topics:
            cond = self.log_cond[topic]
            out[topic] = self.log_prior[topic] + sum(c * cond[t] for t, c in vec.items() if t in cond)
        return out


def train_nb(corpus: Iterable[tuple[str, str]], alpha: float = 1.0) -> NbModel:
    """Multinomial naive Bayes with additive (Laplace) smoothing."""
    doc_counts = Counter()
    term_counts: dict[str, Counter] = {}
    for text, topic in corpus:
        check_topic(topic)
        doc_counts[topic] += 1
        term_counts.setdefault(topic, Counter()).update(featurize(text))
    if not doc_counts:
        raise InvalidInputError("empty training corpus")
    topics = tuple(sorted(doc_counts, key=_TOPIC_ORDER.__getitem__))
    vocab = frozenset(t for c in term_counts.values() for t in c)
    n_docs = sum(doc_counts.values())
    log_prior = {t: math.log(doc_counts[t] / n_docs) for t in topics}
    log_cond = {}
    for topic in topics:
        counts = term_counts[topic]
        denom = math.log(sum(counts.values()) + alpha * len(vocab))
        log_cond[topic] = {t: math.log(counts.get(t, 0) + alpha) - denom for t in vocab}
    return NbModel(topics, vocab, log_prior, log_cond)


def classify(model: NbModel, snippet: Snippet | str) -> tuple[str, float]:
    """Return (topic, margin) where margin is the top-1 minus top-2 log posterior.

    Exact ties go to the topic listed first in TOPICS.
    """
    text = snippet.text if isinstance(snippet, Snippet) else snippet
    post = model.log_posteriors(featurize(text))
    ranked = sorted(post.items(), key=lambda kv: (-kv[1], _TOPIC_ORDER[kv[0]]))
    if len(ranked) == 1:
        return ranked[0][0], math.inf
    return ranked[0][0], ranked[0][1] - ranked[1][1]


def knn_smooth(texts: Sequence[str], nb_labels: Sequence[str], k: int = DEFAULT_K) -> list[str]:
    """Relabel each item by majority vote of its k most similar neighbours.

    Similarity is TF-IDF cosine over ``texts``. Neighbours with zero
    similarity do not vote. Vote ties go to the item's own label if it is
    among the leaders, otherwise to the first leader in TOPICS order.
    """
    n = len(texts)
    if n != len(nb_labels):
        raise InvalidInputError("texts and labels differ in length")
    if n < 2:
        return list(nb_labels)
    if not 1 <= k < n:
        raise InvalidInputError(f"k must satisfy 1 <= k < {n}, got {k}")
    idf = idf_table(texts)
    vecs = [featurize(t, "tfidf", idf) for t in texts]
    out = []
    for i in range(n):
        sims = [(cosine(vecs[i], vecs[j]), j) for j in range(n) if j != i]
        sims.sort(key=lambda sj: (-sj[0], sj[1]))
        votes = Counter(nb_labels[j] for s, j in sims[:k] if s > 0.0)
        own = nb_labels[i]
        if not votes:
            out.append(own)
            continue
        best = max(votes.values())
        leaders = [t for t, c in votes.items() if c == best]
        if own in leaders:
            out.append(own)
        else:
            out.append(min(leaders, key=lambda t: _TOPIC_ORDER.get(t, len(TOPICS))))
    return out


def merge(nb: Sequence[tuple[str, float]], smoothed: Sequence[str], tau: float = DEFAULT_TAU) -> list[str]:
    if len(nb) != len(smoothed):
        raise InvalidInputError("nb and smoothed label lists differ in length")
    out = []
    for (topic, margin), sm in zip(nb, smoothed):
        if topic == sm or margin >= tau:
            out.append(topic)
        else:
            out.append(sm)
    return out


def rerank(items: Sequence[T], topics: Sequence[str], profile: PreferenceProfile) -> list[T]:
    """Stable partition: items whose topic is in the profile come first."""
    if len(items) != len(topics):
        raise InvalidInputError("items and topics differ in length")
    front = [x for x, t in zip(items, topics) if t in profile]
    back = [x for x, t in zip(items, topics) if t not in profile]
    return front + back


@dataclass(frozen=True)
class RerankedItem:
    new_rank: int
    snippet: Snippet
    topic: str


def rerank_query(
    snippets: Sequence[Snippet],
    model: NbModel,
    profile: PreferenceProfile,
    k: int = DEFAULT_K,
    tau: float = DEFAULT_TAU,
) -> list[RerankedItem]:
    """Run steps 2-5 for the snippets of one query (ordered by original rank)."""
    nb = [classify(model, s) for s in snippets]
    texts = [s.text for s in snippets]
    if len(snippets) >= 2:
        smoothed = knn_smooth(texts, [t for t, _ in nb], min(k, len(snippets) - 1))
    else:
        smoothed = [t for t, _ in nb]
    topics = merge(nb, smoothed, tau)
    pairs = rerank(list(zip(snippets, topics)), topics, profile)
    return [RerankedItem(i, s, t) for i, (s, t) in enumerate(pairs, 1)]

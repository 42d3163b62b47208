"""TF-IDF lexical complexity of questions relative to a reference corpus."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from .errors import EmptyCorpus, EmptyQuestion

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Rarity saturation: mean tf-idf at or above this maps to subscore 0.
DEFAULT_SATURATION = 0.5

_stop_words: frozenset[str] | None = None


def default_stop_words() -> frozenset[str]:
    global _stop_words
    if _stop_words is None:
        text = resources.files("bloomgate.data").joinpath("stopwords_v1.txt").read_text("utf-8")
        _stop_words = frozenset(w.strip() for w in text.splitlines() if w.strip())
    return _stop_words


def default_seed_corpus() -> list[str]:
    """Shipped reference questions so single-assignment batches still have a
    meaningful document-frequency baseline."""
    text = resources.files("bloomgate.data").joinpath("seed_corpus_v1.txt").read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def tokenize(text: str, stop_words: frozenset[str] | None = None) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop short and stop-listed tokens."""
    stop = default_stop_words() if stop_words is None else stop_words
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2 and t not in stop]


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    doc_freq: dict[str, int]
    n_docs: int
    idf: dict[str, float]
    stop_words: frozenset[str]

    @property
    def oov_idf(self) -> float:
        """Maximum-rarity idf for terms absent from the fitted corpus."""
        return math.log(1 + self.n_docs) + 1.0


def _idf(n_docs: int, df: int) -> float:
    return math.log((1 + n_docs) / (1 + df)) + 1.0


def fit_corpus(
    documents: Sequence[str], stop_words: frozenset[str] | None = None
) -> TfIdfModel:
    """Fit document frequencies and smoothed idf over a corpus.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1, which stays positive even for
    terms present in every document.
    """
    stop = default_stop_words() if stop_words is None else stop_words
    if not documents:
        raise EmptyCorpus("no documents")

    doc_freq: dict[str, int] = {}
    n_docs = 0
    for doc in documents:
        terms = set(tokenize(doc, stop))
        if not terms:
            continue
        n_docs += 1
        for t in terms:
            doc_freq[t] = doc_freq.get(t, 0) + 1
    if n_docs == 0:
        raise EmptyCorpus("no document yielded any tokens")

    vocab = {t: i for i, t in enumerate(sorted(doc_freq))}
    idf = {t: _idf(n_docs, doc_freq[t]) for t in vocab}
    return TfIdfModel(
        vocabulary=vocab, doc_freq=doc_freq, n_docs=n_docs, idf=idf, stop_words=stop
    )


@dataclass(frozen=True)
class ComplexityFeatures:
    mean_tfidf: float
    distinct_term_ratio: float
    mean_word_length: float
    lexical_subscore: float


def complexity(
    question_text: str,
    model: TfIdfModel,
    saturation: float = DEFAULT_SATURATION,
) -> ComplexityFeatures:
    """Lexical rarity features of one question against the fitted model.

    tf is the raw count over the question's token count; out-of-vocabulary
    terms take the model's max-rarity idf. Rarer vocabulary lowers the
    subscore: 100 * (1 - min(1, mean_tfidf / saturation)).
    """
    if not question_text or not question_text.strip():
        raise EmptyQuestion("question text is empty")
    tokens = tokenize(question_text, model.stop_words)
    if not tokens:
        raise EmptyQuestion("question has no measurable tokens")

    n = len(tokens)
    counts: dict[str, int] = {}
    for t in tokens:
        counts[t] = counts.get(t, 0) + 1

    total = 0.0
    for t in tokens:
        tf = counts[t] / n
        idf = model.idf.get(t, model.oov_idf)
        total += tf * idf
    mean_tfidf = total / n

    subscore = 100.0 * (1.0 - min(1.0, mean_tfidf / saturation))
    subscore = min(100.0, max(0.0, subscore))
    return ComplexityFeatures(
        mean_tfidf=mean_tfidf,
        distinct_term_ratio=len(counts) / n,
        mean_word_length=sum(len(t) for t in tokens) / n,
        lexical_subscore=subscore,
    )

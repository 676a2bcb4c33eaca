"""Tokenization and the tf-idf sparse-vector representation.

Per-tweet term frequency is the double-normalized form
``0.5 + 0.5 * f / max_f`` (computed over the terms actually in the tweet),
and document frequency idf is ``ln(N / df)`` over the fitted training set.
Only terms present in a tweet produce entries, so vectors stay sparse, and
zero products (terms appearing in every training document) are dropped.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import TrainingDataError

# Tokenization policy identifier; stored in fitted models so a model file is
# self-describing. Any change to tokenize() must introduce a new identifier.
TOKEN_RULES_V1 = "lower/alnum-split/minlen2/dropnum"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics (incl. ``&`` and ``_``), and
    drop single-character tokens and pure numbers."""
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) >= 2 and not tok.isdigit()
    ]


@dataclass(frozen=True)
class Vocabulary:
    """Term index, per-term document frequencies, and training-corpus size."""

    terms: dict[str, int]  # term -> dense index, first-seen order
    doc_frequency: dict[str, int]  # term -> number of training docs containing it
    corpus_size: int

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SparseVector:
    """Index-sorted, zero-free (index, value) entries of a tweet vector."""

    entries: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        prev = -1
        for index, value in self.entries:
            if index <= prev:
                raise ValueError("entries must have strictly increasing indices")
            if value == 0.0:
                raise ValueError("zero values must not be stored")
            prev = index

    def dot(self, dense: Sequence[float]) -> float:
        return sum(dense[index] * value for index, value in self.entries)

    def squared_norm(self) -> float:
        return sum(value * value for _, value in self.entries)

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class TfIdfModel:
    """A fitted vocabulary plus the tokenization policy it was fitted with."""

    vocabulary: Vocabulary
    token_rules: str = TOKEN_RULES_V1


def build_vocabulary(training_docs: Iterable[Sequence[str]]) -> Vocabulary:
    """Index all distinct tokens in first-seen order and count, per term, the
    number of documents containing it at least once."""
    terms: dict[str, int] = {}
    doc_frequency: dict[str, int] = {}
    corpus_size = 0
    for doc in training_docs:
        corpus_size += 1
        for token in dict.fromkeys(doc):  # distinct tokens, order preserved
            if token not in terms:
                terms[token] = len(terms)
            doc_frequency[token] = doc_frequency.get(token, 0) + 1
    if corpus_size == 0:
        raise TrainingDataError("cannot build a vocabulary from zero documents")
    if not terms:
        raise TrainingDataError("training documents contain no tokens")
    return Vocabulary(terms=terms, doc_frequency=doc_frequency, corpus_size=corpus_size)


def term_frequency(counts: Mapping[str, int], term: str) -> float:
    """Double-normalized within-tweet frequency: ``0.5 + 0.5 * f / max_f``.

    The maximum runs over every term of the tweet, and the term must itself
    occur in the tweet; absent terms contribute no vector entry and must not
    be routed here.
    """
    occurrences = counts.get(term, 0)
    if occurrences < 1:
        raise ValueError(f"term {term!r} does not occur in the tweet")
    return 0.5 + 0.5 * occurrences / max(counts.values())


def inverse_document_frequency(vocab: Vocabulary, term: str) -> float:
    """Natural-log idf, ``ln(N / df)``; zero for terms in every document."""
    if term not in vocab.terms:
        raise KeyError(f"term {term!r} is not in the vocabulary")
    return math.log(vocab.corpus_size / vocab.doc_frequency[term])


def fit_tfidf(texts: Iterable[str]) -> TfIdfModel:
    """Tokenize the training texts and fit the vocabulary."""
    vocab = build_vocabulary(tokenize(text) for text in texts)
    return TfIdfModel(vocabulary=vocab, token_rules=TOKEN_RULES_V1)


def vectorize(model: TfIdfModel, text: str) -> SparseVector:
    """Map a text to its sparse tf-idf vector under the fitted model.

    Tokens outside the vocabulary are ignored (they still count toward the
    within-tweet frequency maximum); entries whose product is exactly zero
    are dropped.
    """
    if model.token_rules != TOKEN_RULES_V1:
        raise ValueError(f"unsupported token rules {model.token_rules!r}")
    counts = Counter(tokenize(text))
    if not counts:
        return SparseVector()
    vocab = model.vocabulary
    max_f = max(counts.values())
    entries = []
    for token, occurrences in counts.items():
        index = vocab.terms.get(token)
        if index is None:
            continue
        tf = 0.5 + 0.5 * occurrences / max_f
        idf = math.log(vocab.corpus_size / vocab.doc_frequency[token])
        value = tf * idf
        if value != 0.0:
            entries.append((index, value))
    entries.sort()
    return SparseVector(entries=tuple(entries))

"""Stage-1 noise reduction: keep records whose text mentions a watched phrase.

Matching is word-boundary aligned over normalized text, so "salmonellosis"
does not match the phrase "salmonella". Any single phrase hit retains the
record (logical OR over the set).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

from .corpus import Corpus
from .errors import ParseError

log = logging.getLogger(__name__)

# Built-in watch list for the 2015 cucumber-linked Salmonella outbreak.
DEFAULT_PHRASES = (
    "Salmonella",
    "Salmonella Poona",
    "Salmonella Tainted",
    "Contaminated Cucumbers",
    "Andrew & Williamson Fresh Produce",
    "Fat Boy Brand",
    "Mexican Cucumbers",
)


@dataclass(frozen=True)
class KeywordSet:
    """A non-empty collection of non-empty keyword phrases."""

    phrases: tuple[str, ...]

    def __post_init__(self):
        if not self.phrases:
            raise ValueError("keyword set needs at least one phrase")
        for phrase in self.phrases:
            if not normalize_text(phrase):
                raise ValueError(f"phrase {phrase!r} is empty after normalization")

    def __len__(self) -> int:
        return len(self.phrases)


def default_keywords() -> KeywordSet:
    """The built-in seven-phrase watch list."""
    return KeywordSet(phrases=DEFAULT_PHRASES)


def normalize_text(text: str) -> str:
    """Lowercase; map punctuation other than ``&`` to spaces; collapse runs.

    ``&`` survives so brand names written with an ampersand can match
    verbatim.
    """
    lowered = text.lower()
    cleaned = "".join(ch if ch.isalnum() or ch == "&" else " " for ch in lowered)
    return " ".join(cleaned.split())


def _phrase_tokens(keywords: KeywordSet) -> list[tuple[str, ...]]:
    return [tuple(normalize_text(p).split()) for p in keywords.phrases]


def _contains_window(tokens: list[str], phrase: tuple[str, ...]) -> bool:
    width = len(phrase)
    first = phrase[0]
    for i in range(len(tokens) - width + 1):
        if tokens[i] == first and tuple(tokens[i:i + width]) == phrase:
            return True
    return False


def matches(keywords: KeywordSet, text: str) -> bool:
    """True iff the normalized text contains some phrase as a contiguous,
    word-aligned token run."""
    tokens = normalize_text(text).split()
    return any(_contains_window(tokens, phrase) for phrase in _phrase_tokens(keywords))


def filter_corpus(corpus: Corpus, keywords: KeywordSet) -> Corpus:
    """Order-preserving subset of records with at least one phrase match.

    Logs kept/dropped counts; the result carries over the source corpus's
    rejected-line count since no re-parse happens here.
    """
    phrases = _phrase_tokens(keywords)
    kept = tuple(
        record
        for record in corpus.records
        if any(_contains_window(normalize_text(record.text).split(), p) for p in phrases)
    )
    log.info("keyword filter kept %d of %d records (dropped %d)",
             len(kept), len(corpus.records), len(corpus.records) - len(kept))
    return Corpus(records=kept, rejected_count=corpus.rejected_count)


def load_keywords(lines: Iterable[str]) -> KeywordSet:
    """Read a keyword file: one phrase per line, ``#`` comments and blank
    lines ignored."""
    phrases: list[str] = []
    for line_no, raw in enumerate(lines, start=1):
        phrase = raw.strip()
        if not phrase or phrase.startswith("#"):
            continue
        if not normalize_text(phrase):
            raise ParseError(f"phrase {phrase!r} is empty after normalization", line_no)
        phrases.append(phrase)
    if not phrases:
        raise ParseError("keyword file contains no phrases")
    return KeywordSet(phrases=tuple(phrases))

"""Parsing and loading of line-delimited tweet records.

Input is UTF-8 text, one record per line. Each line is a JSON object with
exactly the fields ``id`` (string), ``timestamp`` (ISO-8601 UTC with a ``Z``
suffix, second precision) and ``text`` (string); training files additionally
carry ``label`` (integer -1 or +1). Unknown fields are ignored in lenient
mode and rejected in strict mode.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Iterator, Sequence

from .errors import ParseError, TrainingDataError

log = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"
KNOWN_FIELDS = frozenset({"id", "timestamp", "text", "label"})
VALID_LABELS = (-1, 1)
STRICTNESS_MODES = ("strict", "lenient")


@dataclass(frozen=True)
class TweetRecord:
    """One timestamped text item from the raw stream."""

    id: str
    timestamp: datetime  # always timezone-aware UTC
    text: str

    def to_line(self) -> str:
        """Serialize back to the one-record-per-line input format.

        Re-parsing the returned line yields an equal record.
        """
        return json.dumps(
            {
                "id": self.id,
                "timestamp": format_timestamp(self.timestamp),
                "text": self.text,
            },
            ensure_ascii=False,
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class LabeledExample:
    """A tweet record paired with its hand-assigned relevance label (-1/+1)."""

    record: TweetRecord
    label: int


@dataclass(frozen=True)
class Corpus:
    """Validated records in input order, plus the count of rejected lines."""

    records: tuple[TweetRecord, ...]
    rejected_count: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TweetRecord]:
        return iter(self.records)


def format_timestamp(instant: datetime) -> str:
    """Render a UTC instant in the canonical second-precision input format."""
    if instant.tzinfo is not None:
        instant = instant.astimezone(timezone.utc)
    return instant.strftime(TIMESTAMP_FORMAT)


def parse_timestamp(raw: str, line_no: int | None = None) -> datetime:
    """Parse the single accepted timestamp format into an aware UTC datetime.

    Day-level bucketing downstream depends on unambiguous instants, so any
    other date shape is an error rather than a guess.
    """
    try:
        parsed = datetime.strptime(raw, TIMESTAMP_FORMAT)
    except (ValueError, TypeError):
        raise ParseError(
            f"timestamp {raw!r} is not in {TIMESTAMP_FORMAT.replace('%', '')} "
            "form (expected e.g. 2015-09-04T12:00:00Z)",
            line_no,
        ) from None
    return parsed.replace(tzinfo=timezone.utc)


def parse_tweet_line(
    line: str, *, line_no: int | None = None, strict: bool = False
) -> TweetRecord:
    """Parse one input line into a validated TweetRecord.

    Raises ParseError (carrying ``line_no`` when given) for malformed JSON,
    missing or mistyped fields, unparseable timestamps, and text that is
    empty after trimming. ``strict`` additionally rejects unknown fields.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", line_no) from None
    if not isinstance(obj, dict):
        raise ParseError("record is not an object", line_no)

    if strict:
        unknown = sorted(set(obj) - KNOWN_FIELDS)
        if unknown:
            raise ParseError(f"unknown fields: {', '.join(unknown)}", line_no)

    for field in ("id", "timestamp", "text"):
        if field not in obj:
            raise ParseError(f"missing field {field!r}", line_no)
        if not isinstance(obj[field], str):
            raise ParseError(f"field {field!r} must be a string", line_no)

    record_id = obj["id"]
    if not record_id.strip():
        raise ParseError("empty id", line_no)
    timestamp = parse_timestamp(obj["timestamp"], line_no)
    text = obj["text"]
    if not text.strip():
        raise ParseError("empty text", line_no)

    return TweetRecord(id=record_id, timestamp=timestamp, text=text)


def parse_label(obj_label: object, line_no: int | None = None) -> int:
    """Validate a label field value; only the integers -1 and +1 are legal."""
    if isinstance(obj_label, bool) or not isinstance(obj_label, int):
        raise ParseError(f"label must be the integer -1 or 1, got {obj_label!r}", line_no)
    if obj_label not in VALID_LABELS:
        raise ParseError(f"label must be -1 or 1, got {obj_label}", line_no)
    return obj_label


def load_corpus(lines: Iterable[str], strictness: str = "lenient") -> Corpus:
    """Parse a sequence of record lines into a Corpus.

    Strict mode aborts on the first bad line. Lenient mode skips bad lines,
    counts them in ``rejected_count``, and logs each rejection. A duplicate
    id aborts in both modes because duplicates would double-count in every
    downstream report.
    """
    if strictness not in STRICTNESS_MODES:
        raise ValueError(f"strictness must be one of {STRICTNESS_MODES}, got {strictness!r}")
    strict = strictness == "strict"

    records: list[TweetRecord] = []
    seen_ids: set[str] = set()
    rejected = 0
    for line_no, line in enumerate(lines, start=1):
        try:
            record = parse_tweet_line(line, line_no=line_no, strict=strict)
        except ParseError as exc:
            if strict:
                raise
            rejected += 1
            log.warning("rejected %s", exc)
            continue
        if record.id in seen_ids:
            raise ParseError(f"duplicate id {record.id!r}", line_no)
        seen_ids.add(record.id)
        records.append(record)
    return Corpus(records=tuple(records), rejected_count=rejected)


def load_labeled_set(lines: Iterable[str]) -> list[LabeledExample]:
    """Parse a labeled training file into examples.

    Every line must parse and carry a valid label; the set is hand-curated,
    so any malformed line aborts rather than being skipped. Raises
    TrainingDataError if the input holds no examples at all.
    """
    examples: list[LabeledExample] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        record = parse_tweet_line(line, line_no=line_no, strict=False)
        obj = json.loads(line)  # cannot fail: parse_tweet_line already parsed it
        if "label" not in obj:
            raise ParseError("missing field 'label'", line_no)
        label = parse_label(obj["label"], line_no)
        if record.id in seen_ids:
            raise ParseError(f"duplicate id {record.id!r}", line_no)
        seen_ids.add(record.id)
        examples.append(LabeledExample(record=record, label=label))
    if not examples:
        raise TrainingDataError("labeled set is empty")
    return examples


def class_counts(examples: Sequence[LabeledExample]) -> tuple[int, int]:
    """Return (negative, positive) example counts."""
    positive = sum(1 for ex in examples if ex.label == 1)
    return len(examples) - positive, positive

"""Announcement timelines, period bucketing, and plot-ready count tables.

Periods are half-open intervals keyed to announcement dates at midnight UTC:
a tweet belongs to period k when boundary_k <= t < boundary_{k+1}; anything
before the first announcement is the pre-period, anything on or after the
last boundary falls in the final (open-ended) period. Recall and onset
events ride along as annotations and never bound a period.
"""
from __future__ import annotations

import csv
import io
from bisect import bisect_right
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from typing import Iterable, Sequence

from .corpus import TweetRecord
from .errors import TimelineError

ILLNESS_ONSET = "illness_onset"
ANNOUNCEMENT = "announcement"
RECALL = "recall"
FINAL_ANNOUNCEMENT = "final_announcement"
EVENT_KINDS = (ILLNESS_ONSET, ANNOUNCEMENT, RECALL, FINAL_ANNOUNCEMENT)
BOUNDARY_KINDS = frozenset({ANNOUNCEMENT, FINAL_ANNOUNCEMENT})

PRE_PERIOD = -1

TIMELINE_HEADER = ("date", "kind", "new_ill", "cumulative_ill", "states", "note")


@dataclass(frozen=True)
class EventRecord:
    """One dated event: an official announcement, a recall, or the onset."""

    date: date
    kind: str
    new_ill: int | None = None
    cumulative_ill: int | None = None
    states: int | None = None
    note: str = ""

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        for name in ("new_ill", "cumulative_ill", "states"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class EventTimeline:
    """Date-ordered events; use validate_timeline() for the full contract."""

    events: tuple[EventRecord, ...]

    def announcements(self) -> tuple[EventRecord, ...]:
        return tuple(e for e in self.events if e.kind in BOUNDARY_KINDS)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class PeriodRow:
    """One aggregation row; start None means pre-period, end None means open."""

    start: date | None
    end: date | None
    count: int


@dataclass(frozen=True)
class PeriodReport:
    rows: tuple[PeriodRow, ...]

    @property
    def total(self) -> int:
        return sum(row.count for row in self.rows)


def builtin_cdc_timeline() -> EventTimeline:
    """The built-in fixture: the CDC timeline of the 2015 cucumber-linked
    Salmonella outbreak, with cumulative case counts per announcement."""
    announcements = [
        # (date, new, cumulative, states)
        (date(2015, 9, 4), None, 285, 27),
        (date(2015, 9, 9), 56, 341, 30),
        (date(2015, 9, 15), 77, 418, 31),
        (date(2015, 9, 22), 140, 558, 33),
        (date(2015, 9, 29), 113, 671, 34),
        (date(2015, 10, 6), 61, 732, 35),
        (date(2015, 10, 14), 35, 767, 36),
        (date(2015, 11, 19), 71, 838, 38),
        (date(2016, 1, 26), 50, 888, 39),
        (date(2016, 3, 18), 19, 907, 40),
    ]
    events = [
        EventRecord(
            date=date(2015, 7, 3),
            kind=ILLNESS_ONSET,
            note="estimated first illness onset (identified retrospectively)",
        )
    ]
    for i, (day, new, cum, states) in enumerate(announcements):
        kind = FINAL_ANNOUNCEMENT if i == len(announcements) - 1 else ANNOUNCEMENT
        note = "initial public announcement" if i == 0 else ""
        events.append(
            EventRecord(date=day, kind=kind, new_ill=new, cumulative_ill=cum,
                        states=states, note=note)
        )
    events.append(
        EventRecord(date=date(2015, 9, 4), kind=RECALL,
                    note="Andrew & Williamson Fresh Produce recall (Limited Edition brand)")
    )
    events.append(
        EventRecord(date=date(2015, 9, 11), kind=RECALL,
                    note="Custom Produce Sales recall (Fat Boy brand)")
    )
    events.sort(key=lambda e: (e.date, e.kind not in BOUNDARY_KINDS))
    return EventTimeline(events=tuple(events))


def _boundaries(timeline: EventTimeline) -> list[datetime]:
    bounds = [
        datetime(e.date.year, e.date.month, e.date.day, tzinfo=timezone.utc)
        for e in timeline.announcements()
    ]
    if not bounds:
        raise TimelineError("timeline has no announcement events")
    # bisect needs sorted boundaries; an unvalidated timeline must fail loudly
    if any(b >= c for b, c in zip(bounds, bounds[1:])):
        raise TimelineError("announcement dates must be strictly increasing")
    return bounds


def _as_utc(instant: datetime) -> datetime:
    if instant.tzinfo is None:
        return instant.replace(tzinfo=timezone.utc)
    return instant.astimezone(timezone.utc)


def assign_period(timeline: EventTimeline, instant: datetime) -> int:
    """Index of the inter-announcement period holding the instant.

    Returns PRE_PERIOD (-1) before the first announcement; boundary instants
    (midnight UTC of an announcement date) open their own period; instants
    past the last boundary stay in the final period. Naive datetimes are
    taken as UTC.
    """
    return bisect_right(_boundaries(timeline), _as_utc(instant)) - 1


def bucket_counts(timeline: EventTimeline, tweets: Iterable[TweetRecord]) -> PeriodReport:
    """Count tweets per period; the pre-period gets its own leading row.

    Every tweet lands in exactly one row, so row counts always sum to the
    input size.
    """
    bounds = _boundaries(timeline)
    counts = [0] * (len(bounds) + 1)
    for tweet in tweets:
        counts[bisect_right(bounds, _as_utc(tweet.timestamp))] += 1
    dates = [b.date() for b in bounds]
    rows = [PeriodRow(start=None, end=dates[0], count=counts[0])]
    for k, start in enumerate(dates):
        end = dates[k + 1] if k + 1 < len(dates) else None
        rows.append(PeriodRow(start=start, end=end, count=counts[k + 1]))
    return PeriodReport(rows=tuple(rows))


def validate_timeline(timeline: EventTimeline) -> list[str]:
    """Check ordering, cumulative monotonicity, and new/cumulative arithmetic.

    Returns all violations found (empty list means the timeline is valid).
    """
    violations: list[str] = []
    events = timeline.events
    if not events:
        return ["timeline has no events"]
    if not timeline.announcements():
        violations.append("timeline has no announcement events")

    for prev, cur in zip(events, events[1:]):
        if cur.date < prev.date:
            violations.append(f"events out of order: {cur.date} after {prev.date}")

    ann = timeline.announcements()
    for prev, cur in zip(ann, ann[1:]):
        if cur.date <= prev.date:
            violations.append(
                f"announcement dates must strictly increase: {prev.date} then {cur.date}"
            )

    prev_cum: int | None = None
    prev_date: date | None = None
    for event in events:
        if event.cumulative_ill is None:
            continue
        if prev_cum is not None:
            if event.cumulative_ill < prev_cum:
                violations.append(
                    f"cumulative illnesses decrease from {prev_cum} to "
                    f"{event.cumulative_ill} at {event.date}"
                )
            if event.new_ill is not None and prev_cum + event.new_ill != event.cumulative_ill:
                violations.append(
                    f"arithmetic mismatch at {event.date}: {prev_cum} + {event.new_ill} "
                    f"!= {event.cumulative_ill} (previous cumulative at {prev_date})"
                )
        prev_cum = event.cumulative_ill
        prev_date = event.date
    return violations


def daily_frequency(
    tweets: Iterable[TweetRecord], start: date, end: date
) -> list[tuple[date, int]]:
    """Per-calendar-day tweet counts over [start, end], zero-filled."""
    if end < start:
        raise ValueError(f"inverted interval: {start}..{end}")
    counts: dict[date, int] = {}
    for tweet in tweets:
        day = _as_utc(tweet.timestamp).date()
        if start <= day <= end:
            counts[day] = counts.get(day, 0) + 1
    series = []
    day = start
    while day <= end:
        series.append((day, counts.get(day, 0)))
        day += timedelta(days=1)
    return series


def parse_timeline_file(lines: Iterable[str]) -> EventTimeline:
    """Read a timeline from CSV text with the canonical header row.

    Columns: date (YYYY-MM-DD), kind, new_ill, cumulative_ill, states
    (integers or empty), note (free text). Raises TimelineError on any
    malformed row.
    """
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise TimelineError("timeline file is empty") from None
    if tuple(h.strip() for h in header) != TIMELINE_HEADER:
        raise TimelineError(
            f"timeline header must be {','.join(TIMELINE_HEADER)}, got {','.join(header)}"
        )
    events = []
    for row_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(TIMELINE_HEADER):
            raise TimelineError(f"row {row_no}: expected {len(TIMELINE_HEADER)} columns")
        raw_date, kind, new_ill, cum_ill, states, note = (cell.strip() for cell in row)
        try:
            event_date = date.fromisoformat(raw_date)
        except ValueError:
            raise TimelineError(f"row {row_no}: bad date {raw_date!r}") from None
        try:
            event = EventRecord(
                date=event_date,
                kind=kind,
                new_ill=int(new_ill) if new_ill else None,
                cumulative_ill=int(cum_ill) if cum_ill else None,
                states=int(states) if states else None,
                note=note,
            )
        except ValueError as exc:
            raise TimelineError(f"row {row_no}: {exc}") from None
        events.append(event)
    if not events:
        raise TimelineError("timeline file has no events")
    return EventTimeline(events=tuple(events))


def format_timeline(timeline: EventTimeline) -> str:
    """Render a timeline in the same CSV shape parse_timeline_file reads."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TIMELINE_HEADER)
    for e in timeline.events:
        writer.writerow([
            e.date.isoformat(),
            e.kind,
            "" if e.new_ill is None else e.new_ill,
            "" if e.cumulative_ill is None else e.cumulative_ill,
            "" if e.states is None else e.states,
            e.note,
        ])
    return buffer.getvalue()


def format_period_report(report: PeriodReport) -> str:
    """CSV table: period_start, period_end, tweet_count."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("period_start", "period_end", "tweet_count"))
    for row in report.rows:
        writer.writerow([
            "" if row.start is None else row.start.isoformat(),
            "" if row.end is None else row.end.isoformat(),
            row.count,
        ])
    return buffer.getvalue()


def format_daily_counts(series: Sequence[tuple[date, int]]) -> str:
    """CSV table: date, count."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("date", "count"))
    for day, count in series:
        writer.writerow([day.isoformat(), count])
    return buffer.getvalue()

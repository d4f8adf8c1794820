"""Time instants, half-open intervals and interval-set normalization."""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from typing import Iterable

UTC = _dt.timezone.utc
# stands in for "since forever" when a tuple carries no validity and no state
BEGINNING = _dt.datetime(1, 1, 1, tzinfo=UTC)


def parse_instant(text: str | _dt.date | _dt.datetime) -> _dt.datetime:
    """Parse an ISO-8601 date or date-time into an aware UTC datetime.

    >>> parse_instant("2009-02-20")
    datetime.datetime(2009, 2, 20, 0, 0, tzinfo=datetime.timezone.utc)
    """
    if isinstance(text, _dt.datetime):
        value = text
    elif isinstance(text, _dt.date):
        value = _dt.datetime(text.year, text.month, text.day)
    else:
        if not isinstance(text, str):
            raise ValueError(f"not an ISO-8601 instant: {text!r}")
        raw = text.strip()
        if raw.endswith(("Z", "z")):
            raw = raw[:-1] + "+00:00"
        try:
            if len(raw) == 10:
                d = _dt.date.fromisoformat(raw)
                value = _dt.datetime(d.year, d.month, d.day)
            else:
                value = _dt.datetime.fromisoformat(raw)
        except ValueError as exc:
            raise ValueError(f"not an ISO-8601 instant: {text!r}") from exc
    if value.tzinfo is None:
        return value.replace(tzinfo=UTC)
    return value.astimezone(UTC)


def format_instant(value: _dt.datetime) -> str:
    """Render an instant; midnight instants are written as bare dates."""
    value = value.astimezone(UTC)
    if (value.hour, value.minute, value.second, value.microsecond) == (0, 0, 0, 0):
        return value.date().isoformat()
    return value.replace(tzinfo=None).isoformat() + "Z"


@dataclass(frozen=True)
class TimeInterval:
    """Half-open interval ``[start, end)``; ``end=None`` is OPEN (ongoing).

    A zero-length interval (``start == end``) is the closed point ``{start}``
    and is how events occupy time.
    """

    start: _dt.datetime
    end: _dt.datetime | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", parse_instant(self.start))
        if self.end is not None:
            object.__setattr__(self, "end", parse_instant(self.end))
            if self.end < self.start:
                raise ValueError(f"interval ends before it starts: {self}")

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __gt__(self, other):
        return self._key() > other._key()

    def __ge__(self, other):
        return self._key() >= other._key()

    def _key(self):
        return (self.start, self.end is None, self.end or self.start)

    @classmethod
    def at(cls, instant) -> "TimeInterval":
        t = parse_instant(instant)
        return cls(t, t)

    @property
    def is_instant(self) -> bool:
        return self.end is not None and self.end == self.start

    @property
    def is_open(self) -> bool:
        return self.end is None

    def duration(self) -> _dt.timedelta | None:
        return None if self.end is None else self.end - self.start

    def contains(self, instant) -> bool:
        t = parse_instant(instant)
        if self.is_instant:
            return t == self.start
        return self.start <= t and (self.end is None or t < self.end)

    def covers(self, other: "TimeInterval") -> bool:
        """True if every instant of ``other`` lies in ``self``."""
        if other.is_instant:
            return self.contains(other.start)
        if self.is_instant:
            return False
        if other.start < self.start:
            return False
        if self.end is None:
            return True
        return other.end is not None and other.end <= self.end

    def overlaps(self, other: "TimeInterval") -> bool:
        return self.intersection(other) is not None

    def intersection(self, other: "TimeInterval") -> "TimeInterval | None":
        if self.is_instant or other.is_instant:
            point, span = (self, other) if self.is_instant else (other, self)
            return point if span.contains(point.start) else None
        start = max(self.start, other.start)
        ends = [e for e in (self.end, other.end) if e is not None]
        end = min(ends) if ends else None
        if end is not None and end <= start:
            return None
        return TimeInterval(start, end)

    def to_json(self) -> dict:
        return {
            "start": format_instant(self.start),
            "end": None if self.end is None else format_instant(self.end),
        }

    @classmethod
    def from_json(cls, doc) -> "TimeInterval":
        if not isinstance(doc, dict) or "start" not in doc:
            raise ValueError(f"bad interval document: {doc!r}")
        return cls(doc["start"], doc.get("end"))

    def __str__(self):
        end = "OPEN" if self.end is None else format_instant(self.end)
        if self.is_instant:
            return f"@{format_instant(self.start)}"
        return f"[{format_instant(self.start)}, {end})"


def normalize_intervals(intervals: Iterable[TimeInterval]) -> tuple[TimeInterval, ...]:
    """Sort, merge overlapping or abutting spans, drop covered points."""
    intervals = list(intervals)
    spans = sorted(i for i in intervals if not i.is_instant)
    merged: list[TimeInterval] = []
    for iv in spans:
        if merged:
            last = merged[-1]
            if last.end is None or iv.start <= last.end:
                if last.end is None or iv.end is None:
                    end = None
                else:
                    end = max(last.end, iv.end)
                merged[-1] = TimeInterval(last.start, end)
                continue
        merged.append(iv)
    points = {i for i in intervals if i.is_instant}
    points = [p for p in points if not any(m.contains(p.start) for m in merged)]
    return tuple(sorted(merged + points))


def intersect_sets(a: Iterable[TimeInterval], b: Iterable[TimeInterval]) -> tuple[TimeInterval, ...]:
    out = []
    for x in a:
        for y in b:
            z = x.intersection(y)
            if z is not None:
                out.append(z)
    return normalize_intervals(out)


def set_covers(outer: Iterable[TimeInterval], inner: Iterable[TimeInterval]) -> bool:
    """Every interval of ``inner`` sits inside a single interval of normalized ``outer``."""
    outer = normalize_intervals(outer)
    return all(any(o.covers(i) for o in outer) for i in normalize_intervals(inner))

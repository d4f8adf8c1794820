"""Spatio-temporal extents: the identity criterion of every 4D object."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .temporal import TimeInterval, normalize_intervals, set_covers


@dataclass(frozen=True)
class Extent:
    """Opaque spatial tokens plus a normalized set of time intervals.

    Normalization happens on construction, so ``==`` is extensional equality.
    """

    spatial: frozenset[str] = frozenset()
    temporal: tuple[TimeInterval, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "spatial", frozenset(self.spatial))
        object.__setattr__(self, "temporal", normalize_intervals(self.temporal))

    @classmethod
    def of(cls, spatial: Iterable[str] = (), temporal: Iterable[TimeInterval] = ()) -> "Extent":
        return cls(frozenset(spatial), tuple(temporal))

    @property
    def is_empty(self) -> bool:
        return not self.spatial and not self.temporal

    @property
    def start(self):
        return self.temporal[0].start if self.temporal else None

    @property
    def end(self):
        """Latest end; ``None`` if open-ended or without time."""
        if not self.temporal:
            return None
        ends = [iv.end for iv in self.temporal]
        if any(iv.end is None for iv in self.temporal):
            return None
        return max(ends)

    def normalize(self) -> "Extent":
        return Extent(self.spatial, self.temporal)

    def union(self, other: "Extent") -> "Extent":
        return Extent(self.spatial | other.spatial, self.temporal + other.temporal)

    def temporally_within(self, other: "Extent") -> bool:
        return set_covers(other.temporal, self.temporal)

    def to_json(self) -> dict:
        return {
            "spatial": sorted(self.spatial),
            "temporal": [iv.to_json() for iv in self.temporal],
        }

    @classmethod
    def from_json(cls, doc) -> "Extent":
        if doc is None:
            return cls()
        if not isinstance(doc, dict):
            raise ValueError(f"bad extent document: {doc!r}")
        return cls(
            frozenset(doc.get("spatial", ())),
            tuple(TimeInterval.from_json(iv) for iv in doc.get("temporal", ())),
        )


def union_all(extents: Iterable[Extent]) -> Extent:
    spatial: set[str] = set()
    temporal: list[TimeInterval] = []
    for e in extents:
        spatial |= e.spatial
        temporal.extend(e.temporal)
    return Extent(frozenset(spatial), tuple(temporal))

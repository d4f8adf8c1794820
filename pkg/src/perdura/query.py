"""Temporal queries over OP instance data and schema-level CQ answerability."""

from __future__ import annotations

import datetime as _dt
import json
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import MalformedCQ, NotFunctional, UnknownElement
from .ontology import (
    BUILTIN_NAMES,
    DISSOLVES,
    HAPPENS_AT,
    HAS_TEMPORAL_PART,
    INITIATES,
    OpOntology,
    RoleTag,
    temporal_parts,
)
from .orm import OrmSchema
from .temporal import TimeInterval, parse_instant

TEMPORAL_RELATIONS = (HAS_TEMPORAL_PART, HAPPENS_AT, INITIATES, DISSOLVES)
TEMPORAL_MACHINERY = "temporal machinery"


class UnboundStateWarning(UserWarning):
    """A state exists but no event is recorded as initiating it."""


@dataclass(frozen=True)
class HistoryEntry:
    interval: TimeInterval
    value: str

    def to_json(self) -> dict:
        return {**self.interval.to_json(), "value": self.value}


@dataclass(frozen=True)
class CompetencyQuestion:
    id: str
    description: str
    concepts: tuple[str, ...]
    chain: tuple[str, ...] = ()
    temporal: bool = False

    def __post_init__(self):
        if not self.id:
            raise MalformedCQ("competency question needs an id")
        if not self.concepts:
            raise MalformedCQ(f"{self.id}: needs at least one concept")
        if self.temporal and not set(self.chain) & set(TEMPORAL_RELATIONS):
            raise MalformedCQ(f"{self.id}: temporal question without temporal relations in its chain")

    @classmethod
    def from_json(cls, doc) -> "CompetencyQuestion":
        if not isinstance(doc, dict):
            raise MalformedCQ(f"competency question must be an object, got {doc!r}")
        try:
            concepts, chain = doc["concepts"], doc.get("chain", [])
            if not isinstance(concepts, list) or not isinstance(chain, list):
                raise MalformedCQ(f"{doc.get('id')}: concepts and chain must be lists")
            return cls(
                str(doc["id"]), str(doc.get("description", "")),
                tuple(concepts), tuple(chain), bool(doc.get("temporal", False)),
            )
        except KeyError as exc:
            raise MalformedCQ(f"competency question lacks {exc}") from exc

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "concepts": list(self.concepts),
            "chain": list(self.chain),
            "temporal": self.temporal,
        }


def load_cqs(source) -> list[CompetencyQuestion]:
    if isinstance(source, (str, Path)):
        try:
            source = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedCQ(f"CQ file is not JSON: {exc}") from exc
    if not isinstance(source, list):
        raise MalformedCQ("CQ file must hold a JSON list")
    return [CompetencyQuestion.from_json(d) for d in source]


# ------------------------------------------------------------ instance queries


def _require_relation(ontology: OpOntology, name: str) -> None:
    if not ontology.has_relation(name):
        raise UnknownElement(f"unknown tuple class {name!r}")


def _require_object(ontology: OpOntology, ref: str) -> None:
    if ref not in ontology.individuals and ref not in ontology.classes:
        raise UnknownElement(f"unknown object {ref!r}")


def related(ontology: OpOntology, individual: str, tuple_class: str) -> set[str]:
    ontology.get_individual(individual)
    _require_relation(ontology, tuple_class)
    out = {t.object for t in ontology.tuples_from(individual, tuple_class)}
    if tuple_class == HAS_TEMPORAL_PART:
        out |= {p.id for p in ontology.parts_of(individual)}
    return out


def count_parts(ontology: OpOntology, subject: str, part_relation: str, part_class: str) -> int:
    """Distinct members of ``part_class`` reachable from ``subject`` through
    ``part_relation`` (transitively). ``subject`` may be a class, in which
    case every member is a starting point."""
    _require_object(ontology, subject)
    _require_relation(ontology, part_relation)
    parts = ontology.class_members(part_class)
    starts = ontology.class_members(subject) if subject in ontology.classes else {subject}
    seen: set[str] = set()
    frontier = list(starts)
    while frontier:
        cur = frontier.pop()
        for nxt in related(ontology, cur, part_relation):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return len((seen - starts) & parts)


def _all_parts(ontology: OpOntology, individual: str) -> set[str]:
    out, frontier = set(), [individual]
    while frontier:
        for p in ontology.parts_of(frontier.pop()):
            if p.id not in out:
                out.add(p.id)
                frontier.append(p.id)
    return out


def history(ontology: OpOntology, individual: str, tuple_class: str) -> list[HistoryEntry]:
    """Chronological values of a property, read off the individual and its
    temporal parts."""
    ontology.get_individual(individual)
    _require_relation(ontology, tuple_class)
    holders = {individual} | _all_parts(ontology, individual)
    entries = []
    for t in ontology.tuples:
        if t.subject in holders and ontology.get_tuple_class(t.tuple_class).name == tuple_class:
            entries.extend(HistoryEntry(iv, t.object) for iv in ontology.effective_intervals(t))
    return sorted(entries, key=lambda e: (e.interval, e.value))


def change_points(entries: Iterable[HistoryEntry]) -> list[_dt.datetime]:
    return sorted({e.interval.start for e in entries})


def value_at(ontology: OpOntology, individual: str, tuple_class: str, instant) -> str | None:
    _require_relation(ontology, tuple_class)
    classes = ontology.tuple_classes_named(tuple_class)
    if not classes or not all(tc.functional_in_time for tc in classes):
        raise NotFunctional(f"{tuple_class!r} is not functional in time")
    t = parse_instant(instant)
    hits = [e.value for e in history(ontology, individual, tuple_class) if e.interval.contains(t)]
    return hits[0] if hits else None


def state_initiation(ontology: OpOntology, individual: str, state_class: str) -> _dt.datetime | None:
    """Instant of the event that initiated the earliest ``state_class`` state."""
    ontology.get_individual(individual)
    ontology.get_class(state_class)
    states = temporal_parts(ontology, individual, state_class)
    if not states:
        return None
    first = states[0]
    instants = [
        ontology.individuals[t.subject].instant
        for t in ontology.tuples
        if t.object == first.id and ontology.get_tuple_class(t.tuple_class).name == INITIATES
    ]
    if not instants:
        warnings.warn(f"state {first.id!r} has no initiating event", UnboundStateWarning, stacklevel=2)
        return None
    return min(instants)


# ------------------------------------------------------------- answerability


def normalize_name(name: str) -> str:
    """Case- and plural-insensitive key, so ``Book`` matches ``Books``."""
    key = name.casefold()
    if key.endswith("ies") and len(key) > 4:
        return key[:-3] + "y"
    if key.endswith("s") and not key.endswith("ss") and len(key) > 2:
        return key[:-1]
    return key


_STATE, _EVENT = "op:state", "op:event"


@dataclass
class SchemaGraph:
    """Concepts, named binary edges and a generalisation relation."""

    nodes: dict[str, str]
    edges: list[tuple[str, str, str]]
    parents: dict[str, set[str]]
    has_temporal_machinery: bool

    def ancestors(self, node: str) -> set[str]:
        out, frontier = set(), [node]
        while frontier:
            for p in self.parents.get(frontier.pop(), ()):
                if p not in out:
                    out.add(p)
                    frontier.append(p)
        return out

    def compatible(self, a: str, b: str) -> bool:
        return a == b or b in self.ancestors(a) or a in self.ancestors(b)

    def has_edge(self, name: str) -> bool:
        return any(e[0] == name.casefold() for e in self.edges)

    def path_from(self, start: str, chain: Iterable[str]) -> bool:
        """Whether the chain can be walked from ``start``, each edge in either
        direction, consecutive edges meeting at compatible concepts."""
        frontier = {start}
        for name in chain:
            key = name.casefold()
            nxt = set()
            for rel, u, v in self.edges:
                if rel != key:
                    continue
                for a, b in ((u, v), (v, u)):
                    if any(self.compatible(f, a) for f in frontier):
                        nxt.add(b)
            if not nxt:
                return False
            frontier = nxt
        return True

    @classmethod
    def of(cls, schema: OrmSchema | OpOntology) -> "SchemaGraph":
        if isinstance(schema, OrmSchema):
            nodes = {normalize_name(e.name): e.name for e in schema.entities}
            edges = [(f.role.casefold(), normalize_name(f.subject), normalize_name(f.object)) for f in schema.facts]
            parents: dict[str, set[str]] = {}
            for s in schema.subtypes:
                parents.setdefault(normalize_name(s.sub), set()).add(normalize_name(s.sup))
            return cls(nodes, edges, parents, False)
        if isinstance(schema, OpOntology):
            nodes = {normalize_name(c.name): c.name for c in schema.classes.values()}
            key = {c.id: normalize_name(c.name) for c in schema.classes.values()}
            parents = {}
            for c in schema.classes.values():
                ps = parents.setdefault(key[c.id], set())
                ps |= {key[s] for s in c.superclasses}
                if c.role_tag is RoleTag.STATE_CLASS:
                    ps.add(_STATE)
                elif c.role_tag is RoleTag.EVENT_CLASS:
                    ps.add(_EVENT)
            edges = [(tc.name.casefold(), key[tc.domain], key[tc.range]) for tc in schema.tuple_classes.values()]
            # upper-ontology bindings hold between any event and any state
            edges += [(INITIATES.casefold(), _EVENT, _STATE), (DISSOLVES.casefold(), _EVENT, _STATE)]
            tags = {c.role_tag for c in schema.classes.values()}
            timed_events = any(
                tc.name == HAPPENS_AT and schema.classes[tc.domain].role_tag is RoleTag.EVENT_CLASS
                for tc in schema.tuple_classes.values()
            )
            machinery = RoleTag.STATE_CLASS in tags and RoleTag.EVENT_CLASS in tags and timed_events
            return cls(nodes, edges, parents, machinery)
        raise TypeError(f"cannot build a schema graph from {type(schema).__name__}")


@dataclass(frozen=True)
class Answerability:
    cq: str
    answerable: bool
    missing: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"id": self.cq, "answerable": self.answerable, "missing": list(self.missing)}


def answerable(schema: OrmSchema | OpOntology | SchemaGraph, cq: CompetencyQuestion) -> Answerability:
    """Schema-level answerability.

    A question is answerable iff all its concepts exist, its relation chain
    is a connected walk starting at the first concept, and, for temporal
    questions, the schema has state classes, event classes and event
    instants. ``missing`` lists every absent ingredient.
    """
    if not isinstance(cq, CompetencyQuestion):
        raise MalformedCQ(f"not a competency question: {cq!r}")
    graph = schema if isinstance(schema, SchemaGraph) else SchemaGraph.of(schema)
    missing = [c for c in cq.concepts if normalize_name(c) not in graph.nodes]
    missing += [f"relation:{r}" for r in dict.fromkeys(cq.chain) if not graph.has_edge(r)]
    if cq.temporal and not graph.has_temporal_machinery:
        missing.append(TEMPORAL_MACHINERY)
    if not missing and not graph.path_from(normalize_name(cq.concepts[0]), cq.chain):
        missing.append("path:" + " > ".join(cq.chain))
    return Answerability(cq.id, not missing, tuple(missing))

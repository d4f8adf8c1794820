"""The upper Object Paradigm ontology and its validated in-memory store.

Objects are individuals (ordinary things, states, events), classes, tuple
classes and binary tuples. Identity of individuals is extensional: two
individuals are the same thing iff their normalized extents coincide.

The store is single-writer. Mutators validate incrementally and raise on
the first broken invariant, leaving the store unchanged.
"""

from __future__ import annotations

import copy
import datetime as _dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    DanglingRef,
    DuplicateId,
    InstantMismatch,
    InvariantViolation,
    KindMismatch,
    MalformedDocument,
    UnknownClass,
    UnknownIndividual,
)
from .extent import Extent, union_all
from .temporal import BEGINNING, TimeInterval, format_instant, intersect_sets, parse_instant


class Kind(str, Enum):
    ORDINARY = "ordinary"
    STATE = "state"
    EVENT = "event"


class RoleTag(str, Enum):
    ORDINARY = "ordinary"
    STATE_CLASS = "state-class"
    EVENT_CLASS = "event-class"
    VALUE_CLASS = "value-class"


HAS_TEMPORAL_PART = "hasTemporalPart"
HAPPENS_AT = "happensAt"
INITIATES = "initiates"
DISSOLVES = "dissolves"
IS_COMPOSED_OF = "isComposedOf"
BUILTIN_NAMES = (HAS_TEMPORAL_PART, HAPPENS_AT, INITIATES, DISSOLVES, IS_COMPOSED_OF)
# derived from Individual.whole / Individual.instant, never stored as tuples
DERIVED_NAMES = (HAS_TEMPORAL_PART, HAPPENS_AT)


@dataclass(frozen=True)
class Individual:
    id: str
    name: str
    extent: Extent = field(default_factory=Extent)
    kind: Kind = Kind.ORDINARY
    whole: str | None = None
    instant: _dt.datetime | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "kind": self.kind.value,
            "extent": self.extent.to_json(),
            "whole": self.whole,
            "instant": None if self.instant is None else format_instant(self.instant),
        }


@dataclass
class OpClass:
    id: str
    name: str
    role_tag: RoleTag = RoleTag.ORDINARY
    superclasses: set[str] = field(default_factory=set)
    members: set[str] = field(default_factory=set)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "role_tag": self.role_tag.value,
            "superclasses": sorted(self.superclasses),
            "members": sorted(self.members),
        }


@dataclass(frozen=True)
class TupleClass:
    """A class of binary tuples.

    ``sequential`` demands that objects added under one subject start strictly
    later than every earlier object (editions succeeding each other).
    ``extension`` flags tuple classes added beyond the drawn bookstore model.
    Built-ins have no domain/range and accept any fitting individuals.
    """

    id: str
    name: str
    domain: str | None
    range: str | None
    functional_in_time: bool = False
    sequential: bool = False
    extension: bool = False
    builtin: bool = False

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "domain": self.domain,
            "range": self.range,
            "functional_in_time": self.functional_in_time,
            "sequential": self.sequential,
            "extension": self.extension,
        }


BUILTIN_TUPLE_CLASSES = {
    f"op:{name}": TupleClass(f"op:{name}", name, None, None, builtin=True) for name in BUILTIN_NAMES
}


@dataclass(frozen=True)
class OpTuple:
    tuple_class: str
    subject: str
    object: str
    valid: TimeInterval | None = None

    def to_json(self) -> dict:
        return {
            "tuple_class": self.tuple_class,
            "subject": self.subject,
            "object": self.object,
            "valid": None if self.valid is None else self.valid.to_json(),
        }


class OpOntology:
    """Classes, tuple classes, individuals and tuples with store-wide invariants."""

    def __init__(self):
        self.classes: dict[str, OpClass] = {}
        self.tuple_classes: dict[str, TupleClass] = {}
        self.individuals: dict[str, Individual] = {}
        self.tuples: list[OpTuple] = []

    # ------------------------------------------------------------------ lookup

    def __eq__(self, other):
        if not isinstance(other, OpOntology):
            return NotImplemented
        return self.to_document() == other.to_document()

    def copy(self) -> "OpOntology":
        return copy.deepcopy(self)

    def get_class(self, class_id: str) -> OpClass:
        try:
            return self.classes[class_id]
        except KeyError:
            raise UnknownClass(f"unknown class {class_id!r}") from None

    def get_individual(self, ind_id: str) -> Individual:
        try:
            return self.individuals[ind_id]
        except KeyError:
            raise UnknownIndividual(f"unknown individual {ind_id!r}") from None

    def get_tuple_class(self, tc_id: str) -> TupleClass:
        if tc_id in self.tuple_classes:
            return self.tuple_classes[tc_id]
        if tc_id in BUILTIN_TUPLE_CLASSES:
            return BUILTIN_TUPLE_CLASSES[tc_id]
        raise DanglingRef(f"unknown tuple class {tc_id!r}")

    def _known_id(self, obj_id: str) -> bool:
        return obj_id in self.classes or obj_id in self.tuple_classes or obj_id in self.individuals

    def tuple_classes_named(self, name: str) -> list[TupleClass]:
        found = [tc for tc in self.tuple_classes.values() if tc.name == name]
        if not found and f"op:{name}" in BUILTIN_TUPLE_CLASSES:
            found = [BUILTIN_TUPLE_CLASSES[f"op:{name}"]]
        return found

    def has_relation(self, name: str) -> bool:
        return name in BUILTIN_NAMES or any(tc.name == name for tc in self.tuple_classes.values())

    def superclass_closure(self, class_id: str) -> set[str]:
        seen: set[str] = set()
        stack = [class_id]
        while stack:
            for sup in self.get_class(stack.pop()).superclasses:
                if sup not in seen:
                    seen.add(sup)
                    stack.append(sup)
        return seen

    def subclass_closure(self, class_id: str) -> set[str]:
        """``class_id`` together with every class below it."""
        self.get_class(class_id)
        out = {class_id}
        changed = True
        while changed:
            changed = False
            for c in self.classes.values():
                if c.id not in out and c.superclasses & out:
                    out.add(c.id)
                    changed = True
        return out

    def class_members(self, class_id: str) -> set[str]:
        """Members including those of every subclass."""
        members: set[str] = set()
        for cid in self.subclass_closure(class_id):
            members |= self.classes[cid].members
        return members

    def is_member(self, ind_id: str, class_id: str) -> bool:
        return ind_id in self.class_members(class_id)

    def classes_of(self, ind_id: str) -> set[str]:
        direct = {c.id for c in self.classes.values() if ind_id in c.members}
        out = set(direct)
        for cid in direct:
            out |= self.superclass_closure(cid)
        return out

    def root_whole(self, ind_id: str) -> str:
        ind = self.get_individual(ind_id)
        while ind.whole is not None:
            ind = self.individuals[ind.whole]
        return ind.id

    def parts_of(self, ind_id: str) -> Iterator[Individual]:
        """Direct temporal parts."""
        return (i for i in self.individuals.values() if i.whole == ind_id)

    def tuples_from(self, subject: str, name: str) -> list[OpTuple]:
        return [
            t
            for t in self.tuples
            if t.subject == subject and self.get_tuple_class(t.tuple_class).name == name
        ]

    def effective_intervals(self, tup: OpTuple) -> tuple[TimeInterval, ...]:
        """When the tuple holds: its validity clipped to the subject's life."""
        subject = self.individuals[tup.subject]
        base = subject.extent.temporal or (TimeInterval(BEGINNING, None),)
        if tup.valid is None:
            return base
        return intersect_sets([tup.valid], base)

    # --------------------------------------------------------------- mutation

    def _check_fresh(self, obj_id: str) -> None:
        if not isinstance(obj_id, str) or not obj_id:
            raise InvariantViolation("ids must be non-empty strings", str(obj_id))
        if self._known_id(obj_id) or obj_id in BUILTIN_TUPLE_CLASSES:
            raise DuplicateId("id already in use", obj_id)

    def add_class(
        self,
        class_id: str,
        name: str | None = None,
        role_tag: RoleTag | str = RoleTag.ORDINARY,
        superclasses: Iterable[str] = (),
        members: Iterable[str] = (),
    ) -> str:
        self._check_fresh(class_id)
        role_tag = RoleTag(role_tag)
        superclasses = set(superclasses)
        for sup in superclasses:
            if sup not in self.classes:
                raise DanglingRef(f"class {class_id!r}: unknown superclass {sup!r}")
        cls = OpClass(class_id, name or class_id, role_tag, superclasses, set())
        self.classes[class_id] = cls
        try:
            for m in members:
                self.add_member(class_id, m)
        except Exception:
            del self.classes[class_id]
            raise
        return class_id

    def add_member(self, class_id: str, ind_id: str) -> None:
        cls = self.get_class(class_id)
        if ind_id not in self.individuals:
            raise DanglingRef(f"class {class_id!r}: unknown member {ind_id!r}")
        ind = self.individuals[ind_id]
        tags = {cls.role_tag} | {self.classes[c].role_tag for c in self.superclass_closure(class_id)}
        if RoleTag.STATE_CLASS in tags and ind.kind is not Kind.STATE:
            raise InvariantViolation(f"{ind_id!r} is not a state but joins state class {class_id!r}", ind_id)
        if RoleTag.EVENT_CLASS in tags and ind.kind is not Kind.EVENT:
            raise InvariantViolation(f"{ind_id!r} is not an event but joins event class {class_id!r}", ind_id)
        cls.members.add(ind_id)

    def add_tuple_class(
        self,
        tc_id: str,
        name: str,
        domain: str,
        range: str,
        functional_in_time: bool = False,
        sequential: bool = False,
        extension: bool = False,
    ) -> str:
        self._check_fresh(tc_id)
        if not name:
            raise InvariantViolation("tuple class needs a name", tc_id)
        for ref in (domain, range):
            if ref not in self.classes:
                raise DanglingRef(f"tuple class {tc_id!r}: unknown class {ref!r}")
        self.tuple_classes[tc_id] = TupleClass(
            tc_id, name, domain, range, bool(functional_in_time), bool(sequential), bool(extension)
        )
        return tc_id

    def add_individual(
        self,
        ind_id: str,
        name: str | None = None,
        extent: Extent | None = None,
        kind: Kind | str = Kind.ORDINARY,
        whole: str | None = None,
        instant=None,
    ) -> str:
        self._check_fresh(ind_id)
        kind = Kind(kind)
        extent = extent if extent is not None else Extent()
        if instant is not None:
            instant = parse_instant(instant)
        if kind is Kind.STATE:
            if whole is None:
                raise InvariantViolation("a state needs a whole", ind_id)
            if whole not in self.individuals:
                raise DanglingRef(f"state {ind_id!r}: unknown whole {whole!r}")
            owner = self.individuals[whole]
            if owner.kind is Kind.EVENT:
                raise InvariantViolation("events have no temporal parts", ind_id)
            if not extent.temporally_within(owner.extent):
                raise InvariantViolation(f"temporal extent escapes whole {whole!r}", ind_id)
        elif whole is not None:
            raise InvariantViolation("only states have a whole", ind_id)
        if kind is Kind.EVENT:
            if instant is None:
                raise InvariantViolation("an event needs an instant", ind_id)
            point = (TimeInterval.at(instant),)
            if not extent.temporal:
                extent = Extent(extent.spatial, point)
            elif extent.temporal != point:
                raise InvariantViolation("an event occupies exactly its instant", ind_id)
        elif instant is not None:
            raise InvariantViolation("only events have an instant", ind_id)
        self.individuals[ind_id] = Individual(ind_id, name or ind_id, extent, kind, whole, instant)
        return ind_id

    def add_tuple(self, tuple_class: str, subject: str, object: str, valid: TimeInterval | None = None) -> OpTuple:
        for ref in (subject, object):
            if ref not in self.individuals:
                raise DanglingRef(f"tuple refers to unknown individual {ref!r}")
        tc = self.resolve_tuple_class(tuple_class, subject, object)
        if tc.name in DERIVED_NAMES:
            raise InvariantViolation(f"{tc.name} is derived and cannot be asserted", subject)
        if tc.domain is not None and not self.is_member(subject, tc.domain):
            raise InvariantViolation(f"subject is not a member of {tc.domain!r}", subject)
        if tc.range is not None and not self.is_member(object, tc.range):
            raise InvariantViolation(f"object is not a member of {tc.range!r}", object)
        tup = OpTuple(tc.id, subject, object, valid)
        if tc.name in (INITIATES, DISSOLVES):
            self._check_binding(tc.name, subject, object)
        if tc.sequential:
            self._check_sequence(tup)
        if tc.functional_in_time:
            self._check_functional(tup)
        self.tuples.append(tup)
        return tup

    def resolve_tuple_class(self, ref: str, subject: str, object: str) -> TupleClass:
        """Find a tuple class by id, or by name among classes fitting the pair."""
        if ref in self.tuple_classes or ref in BUILTIN_TUPLE_CLASSES:
            return self.get_tuple_class(ref)
        named = [tc for tc in self.tuple_classes.values() if tc.name == ref]
        fitting = [
            tc
            for tc in named
            if self.is_member(subject, tc.domain) and self.is_member(object, tc.range)
        ]
        if len(fitting) == 1:
            return fitting[0]
        if len(fitting) > 1:
            raise DanglingRef(f"ambiguous tuple class {ref!r}: {sorted(t.id for t in fitting)}")
        if f"op:{ref}" in BUILTIN_TUPLE_CLASSES:
            return BUILTIN_TUPLE_CLASSES[f"op:{ref}"]
        if named:
            raise InvariantViolation(f"no {ref!r} tuple class fits ({subject}, {object})", subject)
        raise DanglingRef(f"unknown tuple class {ref!r}")

    def _check_binding(self, name: str, event_id: str, state_id: str) -> None:
        event, state = self.individuals[event_id], self.individuals[state_id]
        if event.kind is not Kind.EVENT:
            raise KindMismatch(f"{event_id!r} is not an event")
        if state.kind is not Kind.STATE:
            raise KindMismatch(f"{state_id!r} is not a state")
        if name == INITIATES:
            boundary = state.extent.start
        else:
            boundary = state.extent.end
        if boundary != event.instant:
            shown = "OPEN" if boundary is None else format_instant(boundary)
            raise InstantMismatch(
                f"event {event_id!r} at {format_instant(event.instant)} cannot {name[:-1]} "
                f"{state_id!r} whose boundary is {shown}"
            )

    def _check_sequence(self, tup: OpTuple) -> None:
        start = self.individuals[tup.object].extent.start
        if start is None:
            raise InvariantViolation("sequential part has no temporal extent", tup.object)
        for prior in self.tuples:
            if prior.tuple_class == tup.tuple_class and prior.subject == tup.subject:
                prior_start = self.individuals[prior.object].extent.start
                if prior_start is not None and start <= prior_start:
                    raise InvariantViolation(
                        f"part must start after {prior.object!r} in the sequence of {tup.subject!r}",
                        tup.object,
                    )

    def _check_functional(self, tup: OpTuple) -> None:
        holder = self.root_whole(tup.subject)
        mine = self.effective_intervals(tup)
        for prior in self.tuples:
            if prior.tuple_class != tup.tuple_class or self.root_whole(prior.subject) != holder:
                continue
            if intersect_sets(mine, self.effective_intervals(prior)):
                raise InvariantViolation(
                    f"{tup.tuple_class!r} would hold twice at once for {holder!r} "
                    f"({prior.object!r} and {tup.object!r})",
                    tup.subject,
                )

    # ----------------------------------------------------------- documents

    def to_document(self) -> dict:
        return {
            "classes": [c.to_json() for _, c in sorted(self.classes.items())],
            "tuple_classes": [t.to_json() for _, t in sorted(self.tuple_classes.items())],
            "individuals": [i.to_json() for _, i in sorted(self.individuals.items())],
            "tuples": [t.to_json() for t in self.tuples],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "OpOntology":
        if not isinstance(doc, dict) or "classes" not in doc:
            raise MalformedDocument("OP document must be an object with a 'classes' array")
        try:
            ont = cls()
            memberships: list[tuple[str, str]] = []
            for c in _topological(doc.get("classes", []), lambda c: c.get("superclasses", [])):
                ont.add_class(c["id"], c.get("name"), c.get("role_tag", "ordinary"), c.get("superclasses", []))
                memberships.extend((c["id"], m) for m in c.get("members", []))
            for t in doc.get("tuple_classes", []):
                ont.add_tuple_class(
                    t["id"],
                    t["name"],
                    t["domain"],
                    t["range"],
                    t.get("functional_in_time", False),
                    t.get("sequential", False),
                    t.get("extension", False),
                )
            inds = doc.get("individuals", [])
            for i in _topological(inds, lambda i: [i["whole"]] if i.get("whole") else []):
                ont.add_individual(
                    i["id"],
                    i.get("name"),
                    Extent.from_json(i.get("extent")),
                    i.get("kind", "ordinary"),
                    i.get("whole"),
                    i.get("instant"),
                )
            for class_id, member in memberships:
                ont.add_member(class_id, member)
            for t in doc.get("tuples", []):
                valid = t.get("valid")
                ont.add_tuple(
                    t["tuple_class"],
                    t["subject"],
                    t["object"],
                    None if valid is None else TimeInterval.from_json(valid),
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad OP document: {exc!r}") from exc
        return ont

    def export_triples(self) -> str:
        """Line-oriented triples, one per (stored or derived) tuple."""
        lines = []
        for t in self.tuples:
            name = self.get_tuple_class(t.tuple_class).name
            line = f"{t.subject} {name} {t.object}"
            if t.valid is not None:
                end = "OPEN" if t.valid.end is None else format_instant(t.valid.end)
                line += f" {format_instant(t.valid.start)} {end}"
            lines.append(line)
        for ind in self.individuals.values():
            if ind.whole is not None:
                lines.append(f"{ind.whole} {HAS_TEMPORAL_PART} {ind.id}")
            if ind.instant is not None:
                lines.append(f"{ind.id} {HAPPENS_AT} {format_instant(ind.instant)}")
        return "".join(line + "\n" for line in sorted(lines))


def _topological(items: list[dict], deps) -> list[dict]:
    by_id = {}
    for item in items:
        if item["id"] in by_id:
            raise DuplicateId("duplicate id in document", item["id"])
        by_id[item["id"]] = item
    done: set[str] = set()
    visiting: set[str] = set()
    order: list[dict] = []

    def visit(item_id: str):
        if item_id in done or item_id not in by_id:
            return
        if item_id in visiting:
            raise InvariantViolation("dependency cycle", item_id)
        visiting.add(item_id)
        for dep in deps(by_id[item_id]):
            visit(dep)
        visiting.discard(item_id)
        done.add(item_id)
        order.append(by_id[item_id])

    for item_id in sorted(by_id):
        visit(item_id)
    return order


# -------------------------------------------------------------- operations


def add_object(ontology: OpOntology, description: dict) -> str:
    """Add one object described by a dict with a ``type`` key.

    ``type`` is one of ``class``, ``tuple_class``, ``individual``, ``tuple``;
    the remaining keys follow the native document layout. Returns the id (for
    tuples, the tuple class id).
    """
    desc = dict(description)
    kind = desc.pop("type", None)
    if kind == "class":
        return ontology.add_class(
            desc["id"], desc.get("name"), desc.get("role_tag", "ordinary"),
            desc.get("superclasses", ()), desc.get("members", ()),
        )
    if kind == "tuple_class":
        return ontology.add_tuple_class(
            desc["id"], desc["name"], desc["domain"], desc["range"],
            desc.get("functional_in_time", False), desc.get("sequential", False),
            desc.get("extension", False),
        )
    if kind == "individual":
        extent = desc.get("extent")
        if isinstance(extent, dict):
            extent = Extent.from_json(extent)
        ind_id = ontology.add_individual(
            desc["id"], desc.get("name"), extent, desc.get("kind", "ordinary"),
            desc.get("whole"), desc.get("instant"),
        )
        for class_id in desc.get("classes", ()):
            ontology.add_member(class_id, ind_id)
        return ind_id
    if kind == "tuple":
        valid = desc.get("valid")
        if isinstance(valid, dict):
            valid = TimeInterval.from_json(valid)
        return ontology.add_tuple(desc["tuple_class"], desc["subject"], desc["object"], valid).tuple_class
    raise MalformedDocument(f"unknown object type {kind!r}")


def class_extent(ontology: OpOntology, class_id: str) -> Extent:
    """Sum of the extents of all members (subclass members included)."""
    members = ontology.class_members(class_id)
    return union_all(ontology.individuals[m].extent for m in sorted(members))


def same_individual(a: Individual, b: Individual) -> bool:
    return a.extent == b.extent


def temporal_parts(ontology: OpOntology, individual: str, state_class: str | None = None) -> list[Individual]:
    ontology.get_individual(individual)
    allowed = None if state_class is None else ontology.class_members(state_class)
    parts = [p for p in ontology.parts_of(individual) if allowed is None or p.id in allowed]
    return sorted(parts, key=lambda p: (p.extent.start or BEGINNING, p.id))


def bind_event(
    ontology: OpOntology,
    event: str,
    initiated_state: str | None = None,
    dissolved_state: str | None = None,
) -> OpOntology:
    """Record that ``event`` initiates and/or dissolves states.

    Both bindings are validated before either is stored.
    """
    ev = ontology.get_individual(event)
    if ev.kind is not Kind.EVENT:
        raise KindMismatch(f"{event!r} is not an event")
    pending = [(INITIATES, initiated_state), (DISSOLVES, dissolved_state)]
    pending = [(name, s) for name, s in pending if s is not None]
    for name, state in pending:
        ontology.get_individual(state)
        ontology._check_binding(name, event, state)
    for name, state in pending:
        ontology.add_tuple(name, event, state)
    return ontology


def happens_at(ontology: OpOntology, event: str) -> _dt.datetime:
    ev = ontology.get_individual(event)
    if ev.kind is not Kind.EVENT:
        raise KindMismatch(f"{event!r} is not an event")
    return ev.instant

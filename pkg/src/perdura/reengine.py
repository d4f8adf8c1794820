"""Rule-driven ORM -> OP re-engineering under a recorded decision script.

The engine never decides which ORM entity is overloaded. A human writes the
decision script; the engine applies its pattern invocations in order to a
model lifted from the ORM schema and keeps a provenance trail for every
element it emits.

Patterns:

``RefineByExtent``
    split a class into whole / part / copy classes (Book -> Books,
    BookEditions, BookCopies).
``ReattachProperty``
    move a property onto another domain under a new name.
``TemporalizeProperty``
    turn a property into a state class with an event class whose
    occurrences initiate and dissolve the states.
``RoleAsState``
    turn a role-like entity into a state of a broader class.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .boro import BoroKind, ConceptProbe, classify, load_answers
from .errors import (
    InsufficientAnswers,
    KindMismatch,
    MalformedDocument,
    NameCollision,
    PerduraError,
    UnknownClass,
    UnknownElement,
)
from .ontology import (
    DISSOLVES,
    HAPPENS_AT,
    HAS_TEMPORAL_PART,
    INITIATES,
    IS_COMPOSED_OF,
    OpOntology,
    RoleTag,
)
from .orm import OrmSchema

PATTERN_PARAMS = {
    "RefineByExtent": ("source", "whole", "part", "copy", "copy_superclass"),
    "ReattachProperty": ("property", "domain", "name"),
    "TemporalizeProperty": ("fact", "holder", "state", "event", "chain"),
    "RoleAsState": ("role", "broader", "state", "name_class"),
}
IS_NAMED_BY = "isNamedBy"


@dataclass
class ClassSpec:
    name: str
    role_tag: RoleTag = RoleTag.ORDINARY
    superclasses: set[str] = field(default_factory=set)


@dataclass
class RelSpec:
    name: str
    domain: str
    range: str
    functional_in_time: bool = False
    sequential: bool = False
    extension: bool = False

    @property
    def id(self) -> str:
        return f"{self.domain}.{self.name}.{self.range}"


@dataclass
class SchemaModel:
    """Working OP schema while patterns are applied.

    Relations are keyed by an internal handle; lifted ORM facts use
    ``fact:<orm fact id>``. ``origins`` records, per class name or relation
    handle, the source elements and the invocation that produced it.
    """

    classes: dict[str, ClassSpec] = field(default_factory=dict)
    relations: dict[str, RelSpec] = field(default_factory=dict)
    origins: dict[str, dict] = field(default_factory=dict)
    fact_status: dict[str, str] = field(default_factory=dict)
    dropped: list[dict] = field(default_factory=list)
    edge_origins: dict[str, str] = field(default_factory=dict)
    invocation: int | None = None
    _counter: int = 0

    def copy(self) -> "SchemaModel":
        return copy.deepcopy(self)

    # ---------------------------------------------------------------- helpers

    def _new_handle(self, name: str) -> str:
        self._counter += 1
        return f"rel{self._counter}:{name}"

    def _origin(self, sources, pattern: str) -> dict:
        return {"sources": sorted(set(sources)), "invocation": self.invocation, "pattern": pattern}

    def _tag(self, pattern: str) -> str:
        return pattern if self.invocation is None else f"{pattern} #{self.invocation}"

    def require_class(self, name: str) -> ClassSpec:
        if name not in self.classes:
            raise UnknownClass(f"unknown class {name!r}")
        return self.classes[name]

    def require_fresh(self, *names: str) -> None:
        if len(set(names)) != len(names):
            raise NameCollision(f"new names must be distinct: {names}")
        for n in names:
            if n in self.classes:
                raise NameCollision(f"class {n!r} already exists")

    def new_class(self, name: str, role_tag: RoleTag, sources, pattern: str, superclasses=()) -> None:
        self.classes[name] = ClassSpec(name, role_tag, set(superclasses))
        self.origins[name] = self._origin(sources, pattern)

    def new_relation(self, rel: RelSpec, sources, pattern: str) -> str:
        if any(r.id == rel.id for r in self.relations.values()):
            raise NameCollision(f"tuple class {rel.id!r} already exists")
        handle = self._new_handle(rel.name)
        self.relations[handle] = rel
        self.origins[handle] = self._origin(sources, pattern)
        return handle

    def resolve(self, ref: str) -> str:
        """Handle of the relation named by an ORM fact id or a tuple-class id."""
        status = self.fact_status.get(ref)
        if f"fact:{ref}" in self.relations and status == "lifted":
            return f"fact:{ref}"
        if status is not None and status != "lifted":
            raise UnknownElement(f"fact {ref!r} was already {status}")
        for handle, rel in self.relations.items():
            if rel.id == ref:
                return handle
        raise UnknownElement(f"unknown property {ref!r}")

    def consume(self, handle: str, pattern: str) -> None:
        if handle.startswith("fact:"):
            fact_id = handle[len("fact:"):]
            if self.fact_status.get(fact_id) == "lifted":
                self.fact_status[fact_id] = f"consumed by {self._tag(pattern)}"

    def replace_class(self, old: str, new: str, pattern: str) -> None:
        """Point every reference to ``old`` at ``new`` and delete ``old``."""
        for rel in self.relations.values():
            if rel.domain == old:
                rel.domain = new
            if rel.range == old:
                rel.range = new
        for cls in self.classes.values():
            if old in cls.superclasses:
                cls.superclasses.discard(old)
                if cls.name != new:
                    cls.superclasses.add(new)
        for sup in sorted(self.classes[old].superclasses):
            self.dropped.append(
                {"element": f"{old} <= {sup}", "invocation": self.invocation, "pattern": pattern}
            )
            fact_id = self.edge_origins.pop(f"{old} <= {sup}", None)
            if fact_id is not None and self.fact_status.get(fact_id) == "lifted":
                self.fact_status[fact_id] = f"dropped by {self._tag(pattern)}"
        del self.classes[old]
        self.origins.pop(old, None)

    # ---------------------------------------------------------------- output

    def to_ontology(self) -> OpOntology:
        ont = OpOntology()
        placed: set[str] = set()
        pending = sorted(self.classes)
        while pending:
            progressed = False
            for name in list(pending):
                cls = self.classes[name]
                if cls.superclasses <= placed:
                    ont.add_class(name, name, cls.role_tag, sorted(cls.superclasses))
                    placed.add(name)
                    pending.remove(name)
                    progressed = True
            if not progressed:
                raise KindMismatch(f"subclass cycle among {pending}")
        for rel in sorted(self.relations.values(), key=lambda r: r.id):
            ont.add_tuple_class(
                rel.id, rel.name, rel.domain, rel.range, rel.functional_in_time, rel.sequential, rel.extension
            )
        return ont

    def provenance(self) -> dict:
        elements = {}
        for name in self.classes:
            elements[name] = self.origins[name]
        for handle, rel in self.relations.items():
            elements[rel.id] = self.origins[handle]
        return {
            "elements": dict(sorted(elements.items())),
            "facts": dict(sorted(self.fact_status.items())),
            "dropped": list(self.dropped),
        }


def seed_model(schema: OrmSchema, rename: Mapping[str, str] | None = None) -> SchemaModel:
    """Lift an ORM schema directly.

    Non-lexical entities become ordinary classes, lexical ones value classes,
    facts candidate tuple classes and Is_A rows subclass edges.
    """
    rename = dict(rename or {})
    model = SchemaModel()

    def cname(entity: str) -> str:
        return rename.get(entity, entity)

    for e in schema.entities:
        name = cname(e.name)
        if name in model.classes:
            raise NameCollision(f"rename maps two entities onto {name!r}")
        tag = RoleTag.VALUE_CLASS if e.lexical else RoleTag.ORDINARY
        model.new_class(name, tag, [f"entity:{e.name}"], "lift")
    for edge in schema.subtypes:
        model.classes[cname(edge.sub)].superclasses.add(cname(edge.sup))
        model.edge_origins[f"{cname(edge.sub)} <= {cname(edge.sup)}"] = edge.id
        model.fact_status[edge.id] = "lifted"
    for fact in schema.facts:
        handle = f"fact:{fact.id}"
        model.relations[handle] = RelSpec(fact.role, cname(fact.subject), cname(fact.object))
        model.origins[handle] = model._origin([f"fact:{fact.id}"], "lift")
        model.fact_status[fact.id] = "lifted"
    return model


# ------------------------------------------------------------------ patterns


def apply_refine_by_extent(
    model: SchemaModel, source: str, whole: str, part: str, copy_name: str, copy_superclass: str
) -> SchemaModel:
    """Replace ``source`` by a whole composed of temporally sequential parts,
    each composed of copies that specialise ``copy_superclass``."""
    model = model.copy()
    pattern = "RefineByExtent"
    model.require_class(source)
    model.require_class(copy_superclass)
    if copy_superclass == source:
        raise NameCollision(f"{source!r} is being replaced and cannot be the copy superclass")
    model.require_fresh(whole, part, copy_name)
    sources = model.origins[source]["sources"]
    model.new_class(whole, RoleTag.ORDINARY, sources, pattern)
    model.new_class(part, RoleTag.ORDINARY, sources, pattern)
    model.new_class(copy_name, RoleTag.ORDINARY, sources, pattern, [copy_superclass])
    model.replace_class(source, whole, pattern)
    model.new_relation(RelSpec(IS_COMPOSED_OF, whole, part, sequential=True), sources, pattern)
    model.new_relation(RelSpec(IS_COMPOSED_OF, part, copy_name), sources, pattern)
    return model


def apply_reattach_property(model: SchemaModel, prop: str, new_domain: str, new_name: str) -> SchemaModel:
    model = model.copy()
    pattern = "ReattachProperty"
    handle = model.resolve(prop)
    model.require_class(new_domain)
    rel = model.relations[handle]
    moved = RelSpec(new_name, new_domain, rel.range, rel.functional_in_time, rel.sequential, rel.extension)
    if any(r.id == moved.id for h, r in model.relations.items() if h != handle):
        raise NameCollision(f"tuple class {moved.id!r} already exists")
    model.relations[handle] = moved
    model.origins[handle] = model._origin(model.origins[handle]["sources"], pattern)
    model.consume(handle, pattern)
    return model


def apply_temporalize_property(
    model: SchemaModel,
    fact: str,
    holder: str,
    state: str,
    event: str,
    chain: list[Mapping],
    instant_class: str = "TimeInstants",
) -> SchemaModel:
    """Replace a timeless property by states of ``holder`` plus the events
    that initiate and dissolve them.

    ``chain`` lists the tuple classes carrying the value. The first link leaves
    the state class and is functional in time; later links default to leaving
    the first link's range. A link may name an ORM fact it ``replaces``.
    """
    model = model.copy()
    pattern = "TemporalizeProperty"
    handle = model.resolve(fact)
    model.require_class(holder)
    model.require_fresh(state, event)
    sources = model.origins[handle]["sources"]
    replaced = []
    for link in chain:
        if "replaces" in link:
            replaced.append(model.resolve(link["replaces"]))
        model.require_class(link["range"])
        if "domain" in link:
            model.require_class(link["domain"])
    model.new_class(state, RoleTag.STATE_CLASS, sources, pattern)
    model.new_class(event, RoleTag.EVENT_CLASS, sources, pattern)
    if instant_class not in model.classes:
        model.new_class(instant_class, RoleTag.VALUE_CLASS, sources, pattern)
    model.new_relation(RelSpec(HAS_TEMPORAL_PART, holder, state), sources, pattern)
    model.new_relation(RelSpec(HAPPENS_AT, event, instant_class), sources, pattern)
    model.new_relation(RelSpec(INITIATES, event, state, extension=True), sources, pattern)
    model.new_relation(RelSpec(DISSOLVES, event, state, extension=True), sources, pattern)
    first_range = None
    for i, link in enumerate(chain):
        domain = link.get("domain", state if i == 0 else first_range)
        rel = RelSpec(link["name"], domain, link["range"], functional_in_time=(i == 0))
        link_sources = sources
        if "replaces" in link:
            old = replaced.pop(0)
            link_sources = model.origins[old]["sources"]
            model.consume(old, pattern)
            del model.relations[old]
        model.new_relation(rel, link_sources, pattern)
        first_range = first_range or link["range"]
    model.consume(handle, pattern)
    del model.relations[handle]
    return model


def apply_role_as_state(model: SchemaModel, role: str, broader: str, state: str, name_class: str) -> SchemaModel:
    """Model a role-like entity as a state of a broader class.

    ``broader`` is created unless it already exists as an ordinary class.
    """
    model = model.copy()
    pattern = "RoleAsState"
    if role not in model.classes:
        raise UnknownElement(f"unknown role entity {role!r}")
    sources = model.origins[role]["sources"]
    if broader in model.classes:
        if model.classes[broader].role_tag is not RoleTag.ORDINARY or broader == role:
            raise NameCollision(f"{broader!r} cannot serve as the broader class")
        model.require_fresh(state, name_class)
    else:
        model.require_fresh(broader, state, name_class)
        model.new_class(broader, RoleTag.ORDINARY, sources, pattern)
    model.new_class(state, RoleTag.STATE_CLASS, sources, pattern)
    model.new_class(name_class, RoleTag.VALUE_CLASS, sources, pattern)
    model.replace_class(role, broader, pattern)
    model.new_relation(RelSpec(HAS_TEMPORAL_PART, broader, state), sources, pattern)
    model.new_relation(RelSpec(IS_NAMED_BY, broader, name_class), sources, pattern)
    return model


# -------------------------------------------------------------------- driver


@dataclass(frozen=True)
class PatternInvocation:
    pattern: str
    params: Mapping

    def to_json(self) -> dict:
        return {"pattern": self.pattern, **self.params}


@dataclass
class DecisionScript:
    invocations: list[PatternInvocation] = field(default_factory=list)
    rename: dict[str, str] = field(default_factory=dict)
    answers: dict[str, ConceptProbe] | None = None

    @classmethod
    def from_document(cls, doc: Mapping, base_dir: Path | None = None) -> "DecisionScript":
        if not isinstance(doc, Mapping):
            raise MalformedDocument("decision script must be a JSON object")
        answers = doc.get("answers")
        if isinstance(answers, str):
            path = Path(answers)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            answers = load_answers(path)
        elif answers is not None:
            answers = load_answers(answers)
        invocations = []
        for i, inv in enumerate(doc.get("invocations", [])):
            if not isinstance(inv, Mapping) or inv.get("pattern") not in PATTERN_PARAMS:
                raise MalformedDocument(f"invocation #{i}: unknown pattern {inv.get('pattern')!r}")
            params = {k: v for k, v in inv.items() if k != "pattern"}
            missing = [p for p in PATTERN_PARAMS[inv["pattern"]] if p not in params]
            if missing:
                raise MalformedDocument(f"invocation #{i} ({inv['pattern']}): missing {missing}")
            invocations.append(PatternInvocation(inv["pattern"], params))
        return cls(invocations, dict(doc.get("rename", {})), answers)


def load_script(path: str | Path) -> DecisionScript:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: {exc}") from exc
    return DecisionScript.from_document(doc, path.parent)


def apply_invocation(model: SchemaModel, inv: PatternInvocation) -> SchemaModel:
    try:
        return _dispatch(model, inv, inv.params)
    except (KeyError, TypeError) as exc:
        raise MalformedDocument(f"{inv.pattern}: bad parameters ({exc!r})") from exc


def _dispatch(model: SchemaModel, inv: PatternInvocation, p: Mapping) -> SchemaModel:
    if inv.pattern == "RefineByExtent":
        return apply_refine_by_extent(model, p["source"], p["whole"], p["part"], p["copy"], p["copy_superclass"])
    if inv.pattern == "ReattachProperty":
        return apply_reattach_property(model, p["property"], p["domain"], p["name"])
    if inv.pattern == "TemporalizeProperty":
        return apply_temporalize_property(
            model, p["fact"], p["holder"], p["state"], p["event"], p["chain"], p.get("instant_class", "TimeInstants")
        )
    if inv.pattern == "RoleAsState":
        return apply_role_as_state(model, p["role"], p["broader"], p["state"], p["name_class"])
    raise MalformedDocument(f"unknown pattern {inv.pattern!r}")


@dataclass
class ReengineeringResult:
    ontology: OpOntology
    provenance: dict


def reengineer(schema: OrmSchema, script: DecisionScript) -> ReengineeringResult:
    model = seed_model(schema, script.rename)
    for i, inv in enumerate(script.invocations):
        model.invocation = i
        try:
            model = apply_invocation(model, inv)
        except PerduraError as exc:
            exc.invocation_index = i
            exc.args = (f"invocation #{i} ({inv.pattern}): {exc.args[0]}",)
            raise
    model.invocation = None
    ontology = model.to_ontology()
    provenance = model.provenance()
    provenance["invocations"] = [inv.to_json() for inv in script.invocations]
    if script.answers is not None:
        verdicts = []
        for name in sorted(model.classes):
            probe = script.answers.get(name)
            if probe is None:
                raise InsufficientAnswers(name, "has spatio-temporal extension?")
            verdict = classify(probe)
            if verdict.kind is not BoroKind.CLASS:
                raise KindMismatch(f"{name!r} is emitted as a class but BORO says {verdict.kind.value}")
            verdicts.append(verdict.to_json())
        provenance["boro"] = verdicts
    else:
        provenance["boro"] = None
    return ReengineeringResult(ontology, provenance)

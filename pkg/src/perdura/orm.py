"""ORM fact schemas: parsing, printing, validation, verbalization.

Line grammar (``#`` starts a comment)::

    entity <Name> lexical|nonlexical
    fact <Subject> <Role> <Object>          # role Is_A declares a subtype
    identifier <Entity> by <Lexical> [<Lexical> ...]
    constraint <kind> <Subject>.<Role>.<Object> [@0|@1] [n]

``kind`` is one of uniqueness, mandatory, asymmetry, intransitivity,
cardinality (which takes ``n >= 1``). ``@1`` puts the constraint on the
object's role; the default is the subject's.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .errors import (
    CyclicSubtype,
    DuplicateEntity,
    MalformedDocument,
    OrmSyntaxError,
    UndeclaredEntity,
)

IS_A = "Is_A"
CONSTRAINT_KINDS = ("uniqueness", "mandatory", "asymmetry", "intransitivity", "cardinality")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*$")


@dataclass(frozen=True)
class EntityType:
    name: str
    lexical: bool
    # more than one lexical entity makes a compound reference scheme
    reference_mode: tuple[str, ...] = ()


@dataclass(frozen=True)
class FactType:
    subject: str
    role: str
    object: str

    @property
    def id(self) -> str:
        return f"{self.subject}.{self.role}.{self.object}"


@dataclass(frozen=True)
class SubtypeEdge:
    sub: str
    sup: str

    @property
    def id(self) -> str:
        return f"{self.sub}.{IS_A}.{self.sup}"


@dataclass(frozen=True)
class OrmConstraint:
    kind: str
    target: str  # fact id
    position: int = 0
    n: int | None = None


@dataclass(frozen=True)
class Finding:
    kind: str
    element: str
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "element": self.element, "detail": self.detail}


@dataclass(frozen=True)
class OrmSchema:
    entities: tuple[EntityType, ...] = ()
    rows: tuple[FactType | SubtypeEdge, ...] = ()
    constraints: tuple[OrmConstraint, ...] = ()

    @property
    def facts(self) -> tuple[FactType, ...]:
        return tuple(r for r in self.rows if isinstance(r, FactType))

    @property
    def subtypes(self) -> tuple[SubtypeEdge, ...]:
        return tuple(r for r in self.rows if isinstance(r, SubtypeEdge))

    def entity(self, name: str) -> EntityType | None:
        for e in self.entities:
            if e.name == name:
                return e
        return None

    def fact(self, fact_id: str) -> FactType | None:
        for f in self.facts:
            if f.id == fact_id:
                return f
        return None

    @property
    def lexical(self) -> tuple[EntityType, ...]:
        return tuple(e for e in self.entities if e.lexical)

    @property
    def nonlexical(self) -> tuple[EntityType, ...]:
        return tuple(e for e in self.entities if not e.lexical)

    def to_document(self) -> dict:
        facts = []
        for r in self.rows:
            if isinstance(r, SubtypeEdge):
                facts.append({"subject": r.sub, "role": IS_A, "object": r.sup})
            else:
                facts.append({"subject": r.subject, "role": r.role, "object": r.object})
        return {
            "entities": [
                {"name": e.name, "lexical": e.lexical, "reference_mode": list(e.reference_mode)}
                for e in self.entities
            ],
            "facts": facts,
            "constraints": [
                {"kind": c.kind, "target": c.target, "position": c.position, "n": c.n}
                for c in self.constraints
            ],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "OrmSchema":
        if not isinstance(doc, dict) or "entities" not in doc:
            raise MalformedDocument("ORM document must be an object with an 'entities' array")
        try:
            entities = tuple(
                EntityType(e["name"], bool(e["lexical"]), tuple(e.get("reference_mode") or ()))
                for e in doc["entities"]
            )
            rows = tuple(
                SubtypeEdge(f["subject"], f["object"]) if f["role"] == IS_A
                else FactType(f["subject"], f["role"], f["object"])
                for f in doc.get("facts", [])
            )
            constraints = tuple(
                OrmConstraint(c["kind"], c["target"], int(c.get("position", 0)), c.get("n"))
                for c in doc.get("constraints", [])
            )
        except (KeyError, TypeError) as exc:
            raise MalformedDocument(f"bad ORM document: {exc!r}") from exc
        schema = cls(entities, rows, constraints)
        check_structure(schema)
        return schema


def check_structure(schema: OrmSchema) -> None:
    """Raise on undeclared or duplicate entities and subtype cycles."""
    seen = set()
    for e in schema.entities:
        if e.name in seen:
            raise DuplicateEntity(f"entity {e.name!r} declared twice")
        seen.add(e.name)
    for r in schema.rows:
        ends = (r.sub, r.sup) if isinstance(r, SubtypeEdge) else (r.subject, r.object)
        for name in ends:
            if name not in seen:
                raise UndeclaredEntity(f"{r.id}: undeclared entity {name!r}")
    _check_acyclic(schema.subtypes)


def _check_acyclic(edges: Iterable[SubtypeEdge]) -> None:
    graph: dict[str, set[str]] = {}
    for e in edges:
        graph.setdefault(e.sub, set()).add(e.sup)
    state: dict[str, int] = {}

    def visit(node, path):
        if state.get(node) == 1:
            raise CyclicSubtype("subtype cycle: " + " < ".join(path + [node]))
        if state.get(node) == 2:
            return
        state[node] = 1
        for nxt in sorted(graph.get(node, ())):
            visit(nxt, path + [node])
        state[node] = 2

    for node in sorted(graph):
        visit(node, [])


# ------------------------------------------------------------------- parser


def parse_orm(text: str) -> OrmSchema:
    entities: dict[str, EntityType] = {}
    order: list[str] = []
    rows: list[FactType | SubtypeEdge] = []
    idents: list[tuple[str, tuple[str, ...]]] = []
    constraints: list[OrmConstraint] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]
        if not tokens:
            continue
        word, col = tokens[0]

        def fail(msg, at=col):
            raise OrmSyntaxError(msg, lineno, at)

        def need_name(tok):
            if not _NAME.match(tok[0]):
                fail(f"bad name {tok[0]!r}", tok[1])
            return tok[0]

        def declared(tok):
            name = need_name(tok)
            if name not in entities:
                raise UndeclaredEntity(f"line {lineno}, col {tok[1]}: undeclared entity {name!r}")
            return name

        if word == "entity":
            if len(tokens) != 3 or tokens[2][0] not in ("lexical", "nonlexical"):
                fail("expected: entity <Name> lexical|nonlexical")
            name = need_name(tokens[1])
            if name in entities:
                raise DuplicateEntity(f"line {lineno}, col {tokens[1][1]}: entity {name!r} declared twice")
            entities[name] = EntityType(name, tokens[2][0] == "lexical")
            order.append(name)
        elif word == "fact":
            if len(tokens) != 4:
                fail("expected: fact <Subject> <Role> <Object>")
            subject = declared(tokens[1])
            role = need_name(tokens[2])
            obj = declared(tokens[3])
            if role == subject:
                fail("role label must differ from the subject", tokens[2][1])
            row = SubtypeEdge(subject, obj) if role == IS_A else FactType(subject, role, obj)
            if any(r.id == row.id for r in rows):
                fail(f"duplicate fact {row.id}")
            rows.append(row)
        elif word == "identifier":
            if len(tokens) < 4 or tokens[2][0] != "by":
                fail("expected: identifier <Entity> by <Lexical> ...")
            idents.append((declared(tokens[1]), tuple(declared(t) for t in tokens[3:])))
        elif word == "constraint":
            if len(tokens) < 3:
                fail("expected: constraint <kind> <Subject>.<Role>.<Object> [@pos] [n]")
            kind = tokens[1][0]
            if kind not in CONSTRAINT_KINDS:
                fail(f"unknown constraint kind {kind!r}", tokens[1][1])
            target, tcol = tokens[2]
            parts = target.split(".")
            if len(parts) != 3 or not all(_NAME.match(p) for p in parts):
                fail("constraint target must be <Subject>.<Role>.<Object>", tcol)
            rest = tokens[3:]
            position = 0
            if rest and rest[0][0].startswith("@"):
                if rest[0][0] not in ("@0", "@1"):
                    fail("role position must be @0 or @1", rest[0][1])
                position = int(rest[0][0][1])
                rest = rest[1:]
            n = None
            if kind == "cardinality":
                if len(rest) != 1 or not rest[0][0].isdigit() or int(rest[0][0]) < 1:
                    fail("cardinality needs an integer n >= 1", rest[0][1] if rest else tcol)
                n = int(rest[0][0])
            elif rest:
                fail(f"unexpected token {rest[0][0]!r}", rest[0][1])
            for p in (parts[0], parts[2]):
                if p not in entities:
                    raise UndeclaredEntity(f"line {lineno}, col {tcol}: undeclared entity {p!r}")
            constraints.append(OrmConstraint(kind, target, position, n))
        else:
            fail(f"unknown statement {word!r}")

    for entity, lexicals in idents:
        e = entities[entity]
        entities[entity] = EntityType(e.name, e.lexical, lexicals)
    schema = OrmSchema(tuple(entities[n] for n in order), tuple(rows), tuple(constraints))
    _check_acyclic(schema.subtypes)
    return schema


def print_orm(schema: OrmSchema) -> str:
    """Canonical DSL text; ``parse_orm(print_orm(s)) == s``."""
    out = [f"entity {e.name} {'lexical' if e.lexical else 'nonlexical'}" for e in schema.entities]
    for r in schema.rows:
        if isinstance(r, SubtypeEdge):
            out.append(f"fact {r.sub} {IS_A} {r.sup}")
        else:
            out.append(f"fact {r.subject} {r.role} {r.object}")
    for e in schema.entities:
        if e.reference_mode:
            out.append(f"identifier {e.name} by {' '.join(e.reference_mode)}")
    for c in schema.constraints:
        line = f"constraint {c.kind} {c.target}"
        if c.position:
            line += f" @{c.position}"
        if c.n is not None:
            line += f" {c.n}"
        out.append(line)
    return "".join(line + "\n" for line in out)


# --------------------------------------------------------------- validation


def _own_scheme(schema: OrmSchema, name: str) -> bool:
    ent = schema.entity(name)
    if ent.reference_mode:
        return True
    partners = [f.object for f in schema.facts if f.subject == name]
    return bool(partners) and all(schema.entity(p) is not None and schema.entity(p).lexical for p in partners)


def _identified(schema: OrmSchema, name: str) -> bool:
    """Whether a non-lexical entity has some reference scheme.

    Accepted: a declared reference mode; an implicit compound scheme when
    every fact it is the subject of points at a lexical entity; either of those on an
    ancestor; or being a pure supertype (no roles of its own) identified
    through its subtypes.
    """
    ancestors, frontier = set(), [name]
    while frontier:
        cur = frontier.pop()
        for edge in schema.subtypes:
            if edge.sub == cur and edge.sup not in ancestors:
                ancestors.add(edge.sup)
                frontier.append(edge.sup)
    if any(_own_scheme(schema, n) for n in {name} | ancestors if schema.entity(n)):
        return True
    has_roles = any(name in (f.subject, f.object) for f in schema.facts)
    return not has_roles and any(e.sup == name for e in schema.subtypes)


def validate(schema: OrmSchema) -> list[Finding]:
    findings: list[Finding] = []
    names = {e.name for e in schema.entities}
    for e in schema.entities:
        for ref in e.reference_mode:
            ref_entity = schema.entity(ref)
            if e.lexical:
                findings.append(Finding("IllegalReferenceMode", e.name, "lexical entities are their own identifiers"))
            elif ref_entity is None or not ref_entity.lexical:
                findings.append(Finding("DanglingReferenceMode", e.name, f"{ref!r} is not a lexical entity"))
            elif not any({f.subject, f.object} == {e.name, ref} for f in schema.facts):
                findings.append(Finding("DanglingReferenceMode", e.name, f"no fact links {e.name} and {ref}"))
    for e in schema.nonlexical:
        if not _identified(schema, e.name):
            findings.append(Finding("MissingIdentifier", e.name))
    fact_ids = {f.id for f in schema.facts}
    for c in schema.constraints:
        if c.target not in fact_ids:
            findings.append(Finding("DanglingConstraint", c.target, f"{c.kind} targets no fact"))
        elif c.kind == "cardinality" and (c.n is None or c.n < 1):
            findings.append(Finding("InvalidConstraint", c.target, "cardinality needs n >= 1"))
        elif c.position not in (0, 1):
            findings.append(Finding("InvalidConstraint", c.target, "role position must be 0 or 1"))
    for r in schema.rows:
        ends = (r.sub, r.sup) if isinstance(r, SubtypeEdge) else (r.subject, r.object)
        for n in ends:
            if n not in names:
                findings.append(Finding("UndeclaredEntity", r.id, n))
    return findings


# ------------------------------------------------------------ verbalization


def _role_phrase(role: str) -> str:
    words = re.findall(r"[A-Z]?[a-z0-9]+|[A-Z]+(?![a-z])", role.replace("_", " ")) or [role]
    words = [w.lower() for w in words]
    if len(words) > 1 and words[-1] == "by" and words[0].endswith(("ed", "en")):
        words.insert(0, "is")
    return " ".join(words)


def _constraint_sentence(c: OrmConstraint, fact: FactType | None) -> str:
    if fact is None:
        s, role, o = c.target.split(".")
        phrase = _role_phrase(role)
    else:
        s, o, phrase = fact.subject, fact.object, _role_phrase(fact.role)
    if c.kind in ("asymmetry", "intransitivity"):
        adjective = "asymmetric" if c.kind == "asymmetry" else "intransitive"
        return f"The relationship {s} {phrase} {o} is {adjective}."
    quantity = {"uniqueness": "at most one", "mandatory": "at least one", "cardinality": f"at most {c.n}"}[c.kind]
    if c.position == 0:
        return f"Each {s} {phrase} {quantity} {o}."
    return f"For each {o}, {quantity} {s} {phrase} that {o}."


def verbalize(schema: OrmSchema) -> list[str]:
    sentences = []
    for r in schema.rows:
        if isinstance(r, SubtypeEdge):
            sentences.append(f"Every {r.sub} is a {r.sup}.")
        else:
            sentences.append(f"{r.subject} {_role_phrase(r.role)} {r.object}.")
    for c in schema.constraints:
        sentences.append(_constraint_sentence(c, schema.fact(c.target)))
    return sentences

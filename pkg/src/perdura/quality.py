"""Construct-quality analysis of a schema against an intended conceptualization.

Four mismatch categories between ontological concepts and schema elements:

* overload   - one element stands for two or more concepts
* redundancy - one concept is represented by two or more elements
* excess     - an element stands for no concept
* deficit    - a concept has no element representing it

The reference conceptualization is explicit input. Besides the plain
``mapping`` (concept -> representing elements) it may list ``conflated``
links: an element that absorbs a concept without representing it. A
conflated link counts towards overload but not as representation, which is
what "the book entity covers books, editions and copies" needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple

from .errors import DanglingMapping, MalformedDocument
from .ontology import OpOntology
from .orm import OrmSchema
from .query import CompetencyQuestion, answerable

CATEGORIES = ("overload", "redundancy", "excess", "deficit")


@dataclass(frozen=True)
class ReferenceConceptualization:
    concepts: tuple[str, ...]
    mapping: Mapping[str, frozenset[str]]
    conflated: Mapping[str, frozenset[str]] = field(default_factory=dict)

    @classmethod
    def from_json(cls, doc) -> "ReferenceConceptualization":
        if not isinstance(doc, Mapping) or "concepts" not in doc:
            raise MalformedDocument("reference file must be an object with 'concepts'")
        concepts = tuple(doc["concepts"])
        if len(set(concepts)) != len(concepts):
            raise MalformedDocument("reference concept names must be unique")
        mapping = {k: frozenset(v) for k, v in doc.get("mapping", {}).items()}
        conflated = {k: frozenset(v) for k, v in doc.get("conflated", {}).items()}
        return cls(concepts, mapping, conflated)

    def to_json(self) -> dict:
        return {
            "concepts": list(self.concepts),
            "mapping": {k: sorted(v) for k, v in sorted(self.mapping.items())},
            "conflated": {k: sorted(v) for k, v in sorted(self.conflated.items())},
        }


def load_reference(path: str | Path) -> ReferenceConceptualization:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}: {exc}") from exc
    return ReferenceConceptualization.from_json(doc)


class DeficiencyFinding(NamedTuple):
    category: str
    subject: str
    related: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"category": self.category, "subject": self.subject, "related": list(self.related)}


def schema_elements(schema: OrmSchema | OpOntology | set) -> set[str]:
    """Elements subject to the analysis: entity types or classes."""
    if isinstance(schema, OrmSchema):
        return {e.name for e in schema.entities}
    if isinstance(schema, OpOntology):
        return set(schema.classes)
    return set(schema)


def detect_deficiencies(schema, ref: ReferenceConceptualization) -> list[DeficiencyFinding]:
    """Findings ordered by category, then subject."""
    elements = schema_elements(schema)
    concepts = set(ref.concepts)
    mapping = ref.mapping
    stands_for: dict[str, set[str]] = {}
    for table in (mapping, ref.conflated):
        for concept, targets in table.items():
            if concept not in concepts:
                raise DanglingMapping(f"mapping names unknown concept {concept!r}")
            if not targets <= elements:
                missing = min(targets - elements)
                raise DanglingMapping(f"concept {concept!r} maps to missing element {missing!r}")
            for el in targets:
                stands_for.setdefault(el, set()).add(concept)

    ordered_concepts = sorted(concepts)
    ordered_elements = sorted(elements)
    findings = [DeficiencyFinding("deficit", c) for c in ordered_concepts if not mapping.get(c)]
    findings += [DeficiencyFinding("excess", el) for el in ordered_elements if el not in stands_for]
    for el in ordered_elements:
        linked = stands_for.get(el)
        if linked and len(linked) > 1:
            findings.append(DeficiencyFinding("overload", el, tuple(sorted(linked))))
    for c in ordered_concepts:
        targets = mapping.get(c)
        if targets and len(targets) > 1:
            findings.append(DeficiencyFinding("redundancy", c, tuple(sorted(targets))))
    return findings


def cq_coverage(schema, cqs: list[CompetencyQuestion]) -> list[dict]:
    return [answerable(schema, cq).to_json() for cq in cqs]


# --------------------------------------------------------------- extensibility


def _class_records(model) -> dict[str, dict]:
    if isinstance(model, OpOntology):
        return {
            c.id: {"name": c.name, "role_tag": c.role_tag.value, "superclasses": sorted(c.superclasses)}
            for c in model.classes.values()
        }
    return {
        e.name: {"lexical": e.lexical, "reference_mode": list(e.reference_mode)} for e in model.entities
    }


def _relation_records(model) -> dict[str, dict]:
    if isinstance(model, OpOntology):
        return {tc.id: {k: v for k, v in tc.to_json().items() if k != "id"} for tc in model.tuple_classes.values()}
    records = {r.id: {"row": r.id} for r in model.rows}
    for c in model.constraints:
        records[f"constraint:{c.kind}:{c.target}@{c.position}"] = {"n": c.n}
    return records


def extensibility_diff(before, after) -> dict:
    """Schema-level change summary; instances are ignored.

    Change is non-invasive iff nothing was removed or modified.
    """
    summary = {}
    totals = {"added": 0, "removed": 0, "modified": 0}
    for part, records in (("classes", _class_records), ("tuple_classes", _relation_records)):
        a, b = records(before), records(after)
        added = sorted(set(b) - set(a))
        removed = sorted(set(a) - set(b))
        modified = sorted(k for k in set(a) & set(b) if a[k] != b[k])
        summary[part] = {"added": added, "removed": removed, "modified": modified}
        totals["added"] += len(added)
        totals["removed"] += len(removed)
        totals["modified"] += len(modified)
    summary.update(totals)
    summary["non_invasive"] = totals["removed"] == 0 and totals["modified"] == 0
    return summary


# ---------------------------------------------------------------------- report


@dataclass
class QualityReport:
    findings: dict[str, list[DeficiencyFinding]]
    cq_matrix: list[dict]
    extensibility: dict | None
    objectivity: bool
    trace: str | None = None
    uncovered: list[str] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not any(self.findings.values()) and all(row["answerable"] for row in self.cq_matrix)

    def to_json(self) -> dict:
        answered = sum(row["answerable"] for row in self.cq_matrix)
        return {
            "findings": {k: [f.to_json() for f in v] for k, v in self.findings.items()},
            "competency": {"answered": answered, "total": len(self.cq_matrix), "matrix": self.cq_matrix},
            "extensibility": self.extensibility,
            "objectivity": {"traced": self.objectivity, "trace": self.trace, "uncovered": self.uncovered},
        }

    def render_text(self) -> str:
        lines = []
        for cat in CATEGORIES:
            items = self.findings[cat]
            lines.append(f"{cat}: {len(items)}")
            for f in items:
                rel = f" <- {', '.join(f.related)}" if f.related else ""
                lines.append(f"  {f.subject}{rel}")
        answered = sum(row["answerable"] for row in self.cq_matrix)
        lines.append(f"competency questions: {answered}/{len(self.cq_matrix)} answerable")
        for row in self.cq_matrix:
            mark = "yes" if row["answerable"] else "no "
            tail = "" if row["answerable"] else "  missing: " + ", ".join(row["missing"])
            lines.append(f"  {row['id']:<6} {mark}{tail}")
        if self.extensibility is not None:
            e = self.extensibility
            lines.append(
                f"extensibility: added={e['added']} removed={e['removed']} modified={e['modified']} "
                f"non-invasive={str(e['non_invasive']).lower()}"
            )
        lines.append(f"objectivity: {'traced' if self.objectivity else 'untraced'}")
        return "\n".join(lines) + "\n"


def trace_coverage(schema, provenance: Mapping | None) -> list[str]:
    """Schema elements lacking a provenance entry or (for classes) a BORO verdict."""
    if provenance is None:
        return sorted(schema_elements(schema))
    elements = provenance.get("elements", {})
    classified = {v["concept"] for v in provenance.get("boro") or ()}
    wanted = set(schema_elements(schema))
    if isinstance(schema, OpOntology):
        wanted |= set(schema.tuple_classes)
    uncovered = {e for e in wanted if e not in elements}
    uncovered |= {c for c in schema_elements(schema) if c not in classified}
    return sorted(uncovered)


def report(
    schema,
    ref: ReferenceConceptualization,
    cqs: list[CompetencyQuestion] = (),
    provenance: Mapping | None = None,
    previous=None,
    trace_ref: str | None = None,
) -> QualityReport:
    found = detect_deficiencies(schema, ref)
    findings = {cat: [f for f in found if f.category == cat] for cat in CATEGORIES}
    uncovered = trace_coverage(schema, provenance)
    return QualityReport(
        findings=findings,
        cq_matrix=cq_coverage(schema, list(cqs)),
        extensibility=None if previous is None else extensibility_diff(previous, schema),
        objectivity=provenance is not None and not uncovered,
        trace=trace_ref if provenance is not None else None,
        uncovered=uncovered if provenance is not None else [],
    )

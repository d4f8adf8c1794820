#!/usr/bin/env python3
"""Extensibility drill: add copy-condition states to both models.

In the OP model the new conditions are two more state classes under the
existing copy-state class. In the ORM model the same requirement adds a
Status role to Book, and telling copies apart forces the identifier to change.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from perdura.documents import canonical_json, load_model
from perdura.ontology import RoleTag
from perdura.orm import EntityType, FactType, OrmSchema
from perdura.quality import extensibility_diff

ROOT = Path(__file__).resolve().parents[1]


@dataclass
class DrillConfig:
    op_schema: Path = ROOT / "tests" / "golden" / "bookstore_op.json"
    orm_schema: Path = ROOT / "fixtures" / "bookstore" / "bookstore.orm"
    state_parent: str = "BookCopyStates"
    new_states: list[str] = field(default_factory=lambda: ["NewStates", "UsedStates"])
    orm_entity: str = "Book"
    status_entity: str = "Status"
    out: Path | None = None


def extend_op(cfg: DrillConfig):
    before = load_model(cfg.op_schema)
    after = before.copy()
    for name in cfg.new_states:
        after.add_class(name, name, RoleTag.STATE_CLASS, [cfg.state_parent])
    return before, after


def extend_orm(cfg: DrillConfig):
    before = load_model(cfg.orm_schema)
    entities = []
    for e in before.entities:
        if e.name == cfg.orm_entity:
            e = EntityType(e.name, e.lexical, e.reference_mode + (cfg.status_entity,))
        entities.append(e)
    entities.append(EntityType(cfg.status_entity, True))
    rows = before.rows + (FactType(cfg.orm_entity, "Has", cfg.status_entity),)
    return before, OrmSchema(tuple(entities), rows, before.constraints)


def run(cfg: DrillConfig) -> dict:
    op_diff = extensibility_diff(*extend_op(cfg))
    orm_diff = extensibility_diff(*extend_orm(cfg))
    for label, d in (("OP", op_diff), ("ORM", orm_diff)):
        print(f"{label:<4} added={d['added']} removed={d['removed']} modified={d['modified']} "
              f"non-invasive={str(d['non_invasive']).lower()}")
        if d["classes"]["modified"]:
            print(f"     modified: {', '.join(d['classes']['modified'])}")
    summary = {"op": op_diff, "orm": orm_diff}
    if cfg.out:
        cfg.out.write_text(canonical_json(summary), encoding="utf-8")
    return summary


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", nargs="+", default=None, help="names of the new state classes")
    ap.add_argument("-o", "--out", type=Path)
    args = ap.parse_args()
    cfg = DrillConfig(out=args.out)
    if args.states:
        cfg.new_states = args.states
    run(cfg)


if __name__ == "__main__":
    main()

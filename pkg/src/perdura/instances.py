"""Loading instance data onto an OP schema."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from .errors import DanglingRef, MalformedDocument, SchemaMismatch, UnknownElement
from .extent import Extent
from .ontology import OpOntology, _topological, bind_event
from .temporal import TimeInterval


def load_instances(schema: OpOntology, instances: Mapping | str | Path) -> OpOntology:
    """Populate a copy of ``schema`` from an instance document.

    The document has ``individuals`` (each may list ``classes`` it belongs
    to), ``tuples`` (``tuple_class`` may be a tuple-class id or name) and
    ``bindings`` (``{"event", "initiates", "dissolves"}``). Every store
    invariant is checked as objects arrive.
    """
    if not isinstance(instances, Mapping):
        path = Path(instances)
        try:
            instances = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"{path}: {exc}") from exc
    ont = schema.copy()
    try:
        inds = list(instances.get("individuals", []))
        for ind in _topological(inds, lambda i: [i["whole"]] if i.get("whole") else []):
            ont.add_individual(
                ind["id"],
                ind.get("name"),
                Extent.from_json(ind.get("extent")),
                ind.get("kind", "ordinary"),
                ind.get("whole"),
                ind.get("instant"),
            )
            for class_id in ind.get("classes", []):
                ont.add_member(class_id, ind["id"])
        for t in instances.get("tuples", []):
            valid = t.get("valid")
            ont.add_tuple(
                t["tuple_class"], t["subject"], t["object"],
                None if valid is None else TimeInterval.from_json(valid),
            )
        for b in instances.get("bindings", []):
            bind_event(ont, b["event"], b.get("initiates"), b.get("dissolves"))
    except (DanglingRef, UnknownElement) as exc:
        raise SchemaMismatch(str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad instance document: {exc!r}") from exc
    return ont

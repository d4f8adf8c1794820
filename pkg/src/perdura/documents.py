"""Canonical JSON and file-format sniffing shared by the CLI and scripts."""

from __future__ import annotations

import json
from pathlib import Path

from .errors import MalformedDocument
from .ontology import OpOntology
from .orm import OrmSchema, parse_orm


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def read_json(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedDocument(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_model(path: str | Path) -> OrmSchema | OpOntology:
    """Load an ORM schema (``.orm`` text or JSON) or an OP ontology document."""
    path = Path(path)
    if path.suffix == ".orm":
        try:
            return parse_orm(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise MalformedDocument(f"cannot read {path}: {exc.strerror}") from exc
    doc = read_json(path)
    if isinstance(doc, dict) and "classes" in doc:
        return OpOntology.from_document(doc)
    if isinstance(doc, dict) and "entities" in doc:
        return OrmSchema.from_document(doc)
    raise MalformedDocument(f"{path}: neither an ORM schema nor an OP ontology document")


def load_orm(path: str | Path) -> OrmSchema:
    model = load_model(path)
    if not isinstance(model, OrmSchema):
        raise MalformedDocument(f"{path}: expected an ORM schema")
    return model


def load_op(path: str | Path) -> OpOntology:
    model = load_model(path)
    if not isinstance(model, OpOntology):
        raise MalformedDocument(f"{path}: expected an OP ontology document")
    return model


def model_document(model: OrmSchema | OpOntology) -> dict:
    return model.to_document()

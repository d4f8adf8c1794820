"""BORO classification: individual, class or tuple from two answers.

A concept with a spatio-temporal extension is an individual. Otherwise it is
a class when it can be instantiated and a tuple when it cannot. ``None``
stands for a not-yet-known answer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InsufficientAnswers, MalformedDocument, SessionComplete

EXTENT_QUESTION = "has spatio-temporal extension?"
INSTANTIABLE_QUESTION = "can it be instantiated?"


class BoroKind(str, Enum):
    INDIVIDUAL = "Individual"
    CLASS = "Class"
    TUPLE = "Tuple"


@dataclass(frozen=True)
class ConceptProbe:
    concept_name: str
    has_spatiotemporal_extent: bool | None = None
    instantiable: bool | None = None


@dataclass(frozen=True)
class BoroVerdict:
    concept_name: str
    kind: BoroKind
    trace: tuple[tuple[str, bool], ...]

    def to_json(self) -> dict:
        return {
            "concept": self.concept_name,
            "kind": self.kind.value,
            "trace": [{"question": q, "answer": a} for q, a in self.trace],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BoroVerdict":
        return cls(
            doc["concept"],
            BoroKind(doc["kind"]),
            tuple((step["question"], bool(step["answer"])) for step in doc["trace"]),
        )


def _decide(trace: tuple[tuple[str, bool], ...]) -> BoroKind | None:
    if not trace:
        return None
    if trace[0][1]:
        return BoroKind.INDIVIDUAL
    if len(trace) < 2:
        return None
    return BoroKind.CLASS if trace[1][1] else BoroKind.TUPLE


def classify(probe: ConceptProbe) -> BoroVerdict:
    if probe.has_spatiotemporal_extent is None:
        raise InsufficientAnswers(probe.concept_name, EXTENT_QUESTION)
    trace = ((EXTENT_QUESTION, bool(probe.has_spatiotemporal_extent)),)
    if not probe.has_spatiotemporal_extent:
        if probe.instantiable is None:
            raise InsufficientAnswers(probe.concept_name, INSTANTIABLE_QUESTION)
        trace += ((INSTANTIABLE_QUESTION, bool(probe.instantiable)),)
    return BoroVerdict(probe.concept_name, _decide(trace), trace)


@dataclass(frozen=True)
class WizardSession:
    """An immutable interactive classification in progress."""

    concept_name: str
    trace: tuple[tuple[str, bool], ...] = field(default=())

    @property
    def verdict(self) -> BoroVerdict | None:
        kind = _decide(self.trace)
        return None if kind is None else BoroVerdict(self.concept_name, kind, self.trace)

    @property
    def pending_question(self) -> str | None:
        if self.verdict is not None:
            return None
        return EXTENT_QUESTION if not self.trace else INSTANTIABLE_QUESTION


def wizard_step(session: WizardSession, answer: bool | None = None) -> tuple[WizardSession, str | BoroVerdict]:
    """Advance ``session`` by one answer.

    Returns the new session and either the next question or the verdict.
    An answer of ``None`` ("don't know yet") leaves the session where it is.
    """
    if session.verdict is not None:
        if answer is None:
            return session, session.verdict
        raise SessionComplete(f"{session.concept_name!r} is already classified")
    if answer is not None:
        session = WizardSession(session.concept_name, session.trace + ((session.pending_question, bool(answer)),))
    return session, session.verdict or session.pending_question


def replay(verdict: BoroVerdict) -> BoroVerdict:
    """Feed a verdict's trace back through the wizard."""
    session = WizardSession(verdict.concept_name)
    result = session.pending_question
    for question, answer in verdict.trace:
        if question != result:
            raise InsufficientAnswers(verdict.concept_name, result)
        session, result = wizard_step(session, answer)
    if not isinstance(result, BoroVerdict):
        raise InsufficientAnswers(verdict.concept_name, result)
    return result


def load_answers(source: str | Path | Mapping) -> dict[str, ConceptProbe]:
    """Read an answers file: ``{name: {"extent": bool, "instantiable": bool|null}}``."""
    if isinstance(source, Mapping):
        doc = source
    else:
        try:
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"{source}: {exc}") from exc
    if not isinstance(doc, Mapping):
        raise MalformedDocument("answers file must map concept names to answers")
    probes = {}
    for name, ans in doc.items():
        if not isinstance(ans, Mapping):
            raise MalformedDocument(f"answers for {name!r} must be an object")
        extent, inst = ans.get("extent"), ans.get("instantiable")
        for value in (extent, inst):
            if value is not None and not isinstance(value, bool):
                raise MalformedDocument(f"answers for {name!r} must be booleans or null")
        probes[name] = ConceptProbe(name, extent, inst)
    return probes


def classify_batch(names: Iterable[str], answers: str | Path | Mapping) -> list[BoroVerdict]:
    probes = answers if _is_probe_map(answers) else load_answers(answers)
    verdicts = []
    for name in names:
        probe = probes.get(name)
        if probe is None:
            raise InsufficientAnswers(name, EXTENT_QUESTION)
        verdicts.append(classify(probe))
    return verdicts


def _is_probe_map(obj) -> bool:
    return isinstance(obj, Mapping) and all(isinstance(v, ConceptProbe) for v in obj.values())

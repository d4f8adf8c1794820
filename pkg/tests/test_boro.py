import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from perdura.boro import (
    EXTENT_QUESTION,
    INSTANTIABLE_QUESTION,
    BoroKind,
    BoroVerdict,
    ConceptProbe,
    WizardSession,
    classify,
    classify_batch,
    load_answers,
    replay,
    wizard_step,
)
from perdura.errors import InsufficientAnswers, MalformedDocument, SessionComplete

from conftest import BOOKSTORE


@pytest.mark.parametrize(
    "probe, kind",
    [
        (ConceptProbe("John Smith", True, None), BoroKind.INDIVIDUAL),
        (ConceptProbe("People", False, True), BoroKind.CLASS),
        (ConceptProbe("is son of (Adam, John)", False, False), BoroKind.TUPLE),
    ],
)
def test_leaves(probe, kind):
    verdict = classify(probe)
    assert verdict.kind is kind
    assert len(verdict.trace) == (1 if kind is BoroKind.INDIVIDUAL else 2)


def test_every_total_assignment_has_one_kind():
    kinds = {}
    for extent, inst in itertools.product([True, False], repeat=2):
        kinds[extent, inst] = classify(ConceptProbe("c", extent, inst)).kind
    assert set(kinds.values()) == set(BoroKind)
    assert kinds[True, True] is kinds[True, False] is BoroKind.INDIVIDUAL


@given(st.sampled_from([True, False, None]), st.sampled_from([True, False, None]))
def test_classify_total_or_insufficient(extent, inst):
    probe = ConceptProbe("c", extent, inst)
    needs = extent is None or (extent is False and inst is None)
    if needs:
        with pytest.raises(InsufficientAnswers):
            classify(probe)
    else:
        verdict = classify(probe)
        assert replay(verdict) == verdict
        assert classify(probe) == verdict
        assert BoroVerdict.from_json(json.loads(json.dumps(verdict.to_json()))) == verdict


def test_insufficient_names_concept_and_question():
    with pytest.raises(InsufficientAnswers) as err:
        classify(ConceptProbe("Prices", False, None))
    assert err.value.concept_name == "Prices"
    assert err.value.question == INSTANTIABLE_QUESTION


def test_wizard_walk():
    s = WizardSession("Books")
    s, q = wizard_step(s)
    assert q == EXTENT_QUESTION
    s, q = wizard_step(s, None)
    assert q == EXTENT_QUESTION
    s, q = wizard_step(s, False)
    assert q == INSTANTIABLE_QUESTION
    s, verdict = wizard_step(s, True)
    assert verdict.kind is BoroKind.CLASS and len(verdict.trace) == 2
    with pytest.raises(SessionComplete):
        wizard_step(s, False)
    assert wizard_step(s)[1] == verdict


def test_batch_answers_match_golden_schema(op_schema):
    classes = sorted(op_schema.classes)
    verdicts = classify_batch(classes, BOOKSTORE / "bookstore_answers.json")
    assert [v.concept_name for v in verdicts] == classes
    assert {v.kind for v in verdicts} == {BoroKind.CLASS}


def test_batch_edges(tmp_path):
    assert classify_batch([], {}) == []
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"Books": {"extent": False, "instantiable": None}}))
    with pytest.raises(InsufficientAnswers) as err:
        classify_batch(["Books"], path)
    assert err.value.concept_name == "Books"
    with pytest.raises(InsufficientAnswers):
        classify_batch(["Missing"], path)
    path.write_text(json.dumps({"Books": {"extent": "no"}}))
    with pytest.raises(MalformedDocument):
        load_answers(path)


def test_batch_order_follows_input():
    answers = {"b": {"extent": True}, "a": {"extent": False, "instantiable": False}}
    out = classify_batch(["b", "a"], answers)
    assert [(v.concept_name, v.kind) for v in out] == [("b", BoroKind.INDIVIDUAL), ("a", BoroKind.TUPLE)]

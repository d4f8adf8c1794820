import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perdura.errors import InvariantViolation, MalformedCQ, NotFunctional, SchemaMismatch, UnknownElement
from perdura.extent import Extent
from perdura.instances import load_instances
from perdura.ontology import OpOntology
from perdura.orm import parse_orm
from perdura.query import (
    CompetencyQuestion,
    UnboundStateWarning,
    answerable,
    change_points,
    count_parts,
    history,
    load_cqs,
    related,
    state_initiation,
    value_at,
)
from perdura.temporal import TimeInterval, format_instant, parse_instant

from conftest import BOOKSTORE, GOLDEN


def money(ont, price):
    (num,) = related(ont, price, "valuedAt")
    (unit,) = related(ont, price, "hasUnit")
    return ont.individuals[num].name, ont.individuals[unit].name


def test_counts(populated):
    assert count_parts(populated, "java-htp", "isComposedOf", "BookEditions") == 2
    assert count_parts(populated, "ed6", "isComposedOf", "BookCopies") == 2
    assert count_parts(populated, "ed5", "isComposedOf", "BookCopies") == 0
    assert count_parts(populated, "java-htp", "isComposedOf", "BookCopies") == 2
    assert count_parts(populated, "Books", "isComposedOf", "BookEditions") == 2
    with pytest.raises(UnknownElement):
        count_parts(populated, "java-htp", "hasEditions", "BookEditions")


def test_counts_match_tuple_enumeration(populated):
    for book in populated.class_members("BookEditions"):
        direct = {t.object for t in populated.tuples if t.subject == book and t.tuple_class.endswith("isComposedOf.BookCopies")}
        assert count_parts(populated, book, "isComposedOf", "BookCopies") == len(direct)


def test_related(populated):
    assert related(populated, "ed5", "isWrittenBy") == {"john-smith", "jane-doe"}
    assert related(populated, "ed5", "hasIdentifier") == {"isbn-ed5"}
    assert related(populated, "shop-copy", "hasTemporalPart") == set()
    assert related(populated, "my-copy", "hasTemporalPart") == {"my-copy-50", "my-copy-25"}
    with pytest.raises(UnknownElement):
        related(populated, "nobody", "isWrittenBy")


def test_price_history(populated):
    entries = history(populated, "my-copy", "pricedAt")
    assert [(str(e.interval), money(populated, e.value)) for e in entries] == [
        ("[2005-12-20, 2009-02-20)", ("50", "£")),
        ("[2009-02-20, OPEN)", ("25", "£")),
    ]
    assert history(populated, "shop-copy", "pricedAt") == []
    events = [populated.individuals[e].instant for e in populated.class_members("PriceAssignments")]
    assert change_points(entries) == sorted(events)


def test_value_at(populated):
    assert money(populated, value_at(populated, "my-copy", "pricedAt", "2007-06-01")) == ("50", "£")
    assert money(populated, value_at(populated, "my-copy", "pricedAt", "2010-01-01")) == ("25", "£")
    assert value_at(populated, "my-copy", "pricedAt", "2005-12-19") is None
    assert value_at(populated, "my-copy", "pricedAt", "2009-02-19") == "price-50-gbp"
    assert value_at(populated, "my-copy", "pricedAt", "2009-02-20") == "price-25-gbp"
    with pytest.raises(NotFunctional):
        value_at(populated, "ed5", "isWrittenBy", "2007-06-01")


def test_value_at_agrees_with_history_scan(populated):
    entries = history(populated, "my-copy", "pricedAt")
    start = dt.date(2005, 11, 1)
    for n in range(0, 5000, 3):
        t = parse_instant(start + dt.timedelta(days=n))
        hits = [e.value for e in entries if e.interval.contains(t)]
        assert len(hits) <= 1
        assert value_at(populated, "my-copy", "pricedAt", t) == (hits[0] if hits else None)


def test_history_tiles(populated):
    entries = history(populated, "my-copy", "pricedAt")
    for a, b in zip(entries, entries[1:]):
        assert a.interval.end == b.interval.start


def test_initiation(populated):
    assert format_instant(state_initiation(populated, "john-smith", "Authorship")) == "2001-05-01"
    assert format_instant(state_initiation(populated, "jane-doe", "Authorship")) == "2002-01-15"
    ont = populated.copy()
    ont.add_individual("kim", extent=Extent.of({"body:kim"}, [TimeInterval("1990-01-01")]))
    ont.add_member("People", "kim")
    assert state_initiation(ont, "kim", "Authorship") is None
    ont.add_individual("kim-author", extent=Extent.of((), [TimeInterval("2011-01-01")]), kind="state", whole="kim")
    ont.add_member("Authorship", "kim-author")
    with pytest.warns(UnboundStateWarning):
        assert state_initiation(ont, "kim", "Authorship") is None


def test_cq_validation():
    with pytest.raises(MalformedCQ):
        CompetencyQuestion.from_json({"id": "Q", "description": "", "concepts": [], "chain": [], "temporal": False})
    with pytest.raises(MalformedCQ):
        CompetencyQuestion.from_json({"id": "Q", "description": "", "concepts": ["A"], "chain": ["hasName"], "temporal": True})
    with pytest.raises(MalformedCQ):
        load_cqs({"not": "a list"})


def test_matrix(orm_schema, op_schema, cqs):
    assert [answerable(orm_schema, q).answerable for q in cqs] == [False] * 7
    assert [answerable(op_schema, q).answerable for q in cqs] == [True] * 7
    by_id = {q.id: answerable(orm_schema, q) for q in cqs}
    assert "BookEditions" in by_id["Q1.1"].missing
    assert "temporal machinery" in by_id["Q2.1"].missing
    for verdict in by_id.values():
        assert {"BookEditions", "BookCopies", "temporal machinery"} & set(verdict.missing)


EXTRA_CLASSES = ["Shops", "Shelves", "Loans", "Reviews"]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(EXTRA_CLASSES), unique=True), st.lists(st.sampled_from(["stocks", "reviews", "isComposedOf"]), max_size=3))
def test_answerable_monotone(extra, rels):
    from perdura.documents import load_op

    base = load_op(GOLDEN / "bookstore_op.json")
    cqs = load_cqs(BOOKSTORE / "bookstore_cqs.json")
    before = [answerable(base, q).answerable for q in cqs]
    grown = base.copy()
    for c in extra:
        grown.add_class(c)
    for i, r in enumerate(rels):
        grown.add_tuple_class(f"x{i}.{r}", r, "Books", extra[0] if extra else "Products")
    after = [answerable(grown, q).answerable for q in cqs]
    assert all(a for a, b in zip(after, before) if b)


def test_orm_growth_monotone(orm_text, cqs):
    base = parse_orm(orm_text)
    grown = parse_orm(orm_text + "entity BookEditions nonlexical\nfact Book isComposedOf BookEditions\n")
    for q in cqs:
        if answerable(base, q).answerable:
            assert answerable(grown, q).answerable
    assert answerable(grown, cqs[0]).answerable


def test_instance_loading_errors(op_schema):
    with pytest.raises(SchemaMismatch):
        load_instances(op_schema, {"individuals": [{"id": "s", "kind": "state", "whole": "ghost", "classes": ["Authorship"]}]})
    overlapping = {
        "individuals": [
            {"id": "c", "classes": ["BookCopies"], "extent": {"spatial": ["c"], "temporal": [{"start": "2005-01-01", "end": None}]}},
            {"id": "p", "classes": ["Prices"]},
            {"id": "q", "classes": ["Prices"]},
            {"id": "s1", "kind": "state", "whole": "c", "classes": ["BookCopyStates"], "extent": {"temporal": [{"start": "2005-01-01", "end": "2007-01-01"}]}},
            {"id": "s2", "kind": "state", "whole": "c", "classes": ["BookCopyStates"], "extent": {"temporal": [{"start": "2006-01-01", "end": None}]}},
        ],
        "tuples": [
            {"tuple_class": "pricedAt", "subject": "s1", "object": "p"},
            {"tuple_class": "pricedAt", "subject": "s2", "object": "q"},
        ],
    }
    with pytest.raises(InvariantViolation) as err:
        load_instances(op_schema, overlapping)
    assert err.value.element_id in {"s1", "s2", "c"}


def test_edition_sequence_enforced(op_schema):
    doc = {
        "individuals": [
            {"id": "b", "classes": ["Books"], "extent": {"temporal": [{"start": "2000-01-01", "end": None}]}},
            {"id": "e2", "classes": ["BookEditions"], "extent": {"temporal": [{"start": "2005-01-01", "end": None}]}},
            {"id": "e1", "classes": ["BookEditions"], "extent": {"temporal": [{"start": "2002-01-01", "end": None}]}},
        ],
        "tuples": [
            {"tuple_class": "isComposedOf", "subject": "b", "object": "e2"},
            {"tuple_class": "isComposedOf", "subject": "b", "object": "e1"},
        ],
    }
    with pytest.raises(InvariantViolation):
        load_instances(op_schema, doc)


def test_populated_round_trip(populated):
    assert OpOntology.from_document(populated.to_document()) == populated

"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that the terminal summary prints.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import functools
import itertools
import json
import subprocess
import sys
import time
import timeit

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perdura.boro import BoroKind, ConceptProbe, classify, classify_batch, replay
from perdura.documents import canonical_json, load_model
from perdura.extent import Extent
from perdura.instances import load_instances
from perdura.ontology import OpOntology, RoleTag, class_extent, same_individual
from perdura.orm import OrmSchema, parse_orm, print_orm
from perdura.quality import detect_deficiencies, extensibility_diff
from perdura.query import answerable, change_points, history, related, value_at
from perdura.reengine import reengineer
from perdura.temporal import TimeInterval, format_instant

from conftest import ACCEPTANCE, BOOKSTORE, EXTENSIBILITY, GOLDEN, ROOT
from test_quality import all_mappings, oracle
from test_temporal import days_of, spans

RUNTIME_LIMIT_S = 1.0
OP_BOOKSTORE_CLASSES = {
    "Products", "Books", "BookEditions", "BookCopies", "BookCopyStates", "PriceAssignments", "Prices",
    "Numbers", "Currencies", "TimeInstants", "People", "PeopleNames", "Authorship", "Titles", "ISBNs",
}
OP_BOOKSTORE_TUPLE_CLASSES = {
    "hasName", "isWrittenBy", "hasIdentifier", "pricedAt", "valuedAt", "hasUnit", "happensAt",
    "hasTemporalPart", "isNamedBy", "isComposedOf",
}


def criterion(n, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            notes = kwargs["notes"]
            try:
                fn(*args, **kwargs)
            except BaseException as exc:
                ACCEPTANCE[n] = (title, False, f"{type(exc).__name__}: {exc}".splitlines()[0][:160])
                raise
            ACCEPTANCE[n] = (title, True, "; ".join(notes))

        return run

    return wrap


@pytest.fixture
def notes():
    return []


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


@criterion(1, "bookstore fact table: 7 rows, 3 non-lexical, 5 lexical, < 1 s")
def test_c1_table2(notes):
    text = (BOOKSTORE / "bookstore.orm").read_text()
    schema, elapsed = timed(parse_orm, text)
    assert len(schema.rows) == 7
    assert [e.name for e in schema.nonlexical] == ["Product", "Book", "Price"]
    assert [e.name for e in schema.lexical] == ["ISBN", "Title", "Author", "Value", "Currency"]
    assert elapsed < RUNTIME_LIMIT_S
    notes.append(f"parse {elapsed * 1000:.1f} ms")


@criterion(2, "re-engineering golden: 15 classes, 10 tuple classes, byte-identical, < 1 s")
def test_c2_golden(orm_schema, script, notes):
    result, elapsed = timed(reengineer, orm_schema, script)
    ont = result.ontology
    assert set(ont.classes) == OP_BOOKSTORE_CLASSES
    assert {tc.name for tc in ont.tuple_classes.values() if not tc.extension} == OP_BOOKSTORE_TUPLE_CLASSES
    assert {(c, s) for c, k in ont.classes.items() for s in k.superclasses} == {("BookCopies", "Products")}
    assert canonical_json(ont.to_document()) == (GOLDEN / "bookstore_op.json").read_text()
    assert elapsed < RUNTIME_LIMIT_S
    notes.append(f"reengineer {elapsed * 1000:.1f} ms")


@criterion(3, "competency matrix: ORM 0/7, OP 7/7, ORM gaps named")
def test_c3_matrix(orm_schema, op_schema, cqs, notes):
    orm = [answerable(orm_schema, q) for q in cqs]
    op = [answerable(op_schema, q) for q in cqs]
    assert len(cqs) == 7
    assert sum(a.answerable for a in orm) == 0
    assert sum(a.answerable for a in op) == 7
    markers = {"BookEditions", "BookCopies", "temporal machinery"}
    for a in orm:
        assert markers & set(a.missing), a
    assert all("temporal machinery" in a.missing for a, q in zip(orm, cqs) if q.temporal)
    notes.append("ORM 0/7, OP 7/7")


@criterion(4, "price history, value-at and change instants")
def test_c4_history(populated, notes):
    def money(price):
        (num,) = related(populated, price, "valuedAt")
        (unit,) = related(populated, price, "hasUnit")
        return populated.individuals[num].name + " " + populated.individuals[unit].name

    entries = history(populated, "my-copy", "pricedAt")
    got = [(e.interval, money(e.value)) for e in entries]
    assert got == [
        (TimeInterval("2005-12-20", "2009-02-20"), "50 £"),
        (TimeInterval("2009-02-20", None), "25 £"),
    ]
    assert money(value_at(populated, "my-copy", "pricedAt", "2007-06-01")) == "50 £"
    assert money(value_at(populated, "my-copy", "pricedAt", "2010-01-01")) == "25 £"
    instants = sorted(populated.individuals[e].instant for e in populated.class_members("PriceAssignments"))
    assert change_points(entries) == instants
    notes.append(", ".join(f"{iv} {m}" for iv, m in got))


@criterion(5, "quality detectors: ORM 1 overload + 2 deficit, OP clean, exhaustive 4x4 oracle, < 1 s")
def test_c5_quality(orm_schema, op_schema, ref_orm, ref_op, notes):
    orm = detect_deficiencies(orm_schema, ref_orm)
    assert [f.subject for f in orm if f.category == "overload"] == ["Book"]
    assert sorted(f.subject for f in orm if f.category == "deficit") == ["book-copies", "book-editions"]
    op = detect_deficiencies(op_schema, ref_op)
    assert not [f for f in op if f.category in ("overload", "deficit")]

    cases = list(all_mappings(4, 4))
    outputs = [detect_deficiencies(elements, ref) for _, elements, _, ref in cases]
    # timeit conventions: collector off, best of three sweeps
    def sweep():
        return [detect_deficiencies(elements, ref) for _, elements, _, ref in cases]

    elapsed = min(timeit.repeat(sweep, number=1, repeat=3))
    for (concepts, elements, pairs, _), out in zip(cases, outputs):
        assert {tuple(f) for f in out} == oracle(concepts, elements, pairs)
    assert elapsed < RUNTIME_LIMIT_S
    notes.append(f"{len(cases)} mappings, detector {elapsed:.2f} s")


@criterion(6, "extensibility drill: OP +2 states non-invasive, ORM status change invasive")
def test_c6_extensibility(op_schema, orm_schema, notes):
    grown = op_schema.copy()
    for name in ("NewStates", "UsedStates"):
        grown.add_class(name, name, RoleTag.STATE_CLASS, ["BookCopyStates"])
    d = extensibility_diff(op_schema, grown)
    assert (d["added"], d["removed"], d["modified"], d["non_invasive"]) == (2, 0, 0, True)
    assert extensibility_diff(op_schema, load_model(EXTENSIBILITY / "bookstore_op_conditions.json")) == d
    orm_d = extensibility_diff(orm_schema, load_model(EXTENSIBILITY / "bookstore_status.orm"))
    assert orm_d["non_invasive"] is False and orm_d["modified"] >= 1
    notes.append(f"OP added=2 non-invasive; ORM modified={orm_d['modified']} invasive")


POOL = [
    Extent.of({"a"}, [TimeInterval("2000-01-01", None)]),
    Extent.of({"a"}, [TimeInterval("2000-01-01", "2003-01-01"), TimeInterval("2003-01-01", None)]),
    Extent.of({"a"}, [TimeInterval("2001-01-01", None)]),
    Extent.of({"b"}, [TimeInterval("2000-01-01", None)]),
    Extent.of({"a", "b"}, [TimeInterval("2000-01-01", "2002-01-01")]),
]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(POOL), min_size=1, max_size=20))
def _equivalence(extents):
    ont = OpOntology()
    for i, e in enumerate(extents):
        ont.add_individual(f"i{i}", extent=e)
    inds = list(ont.individuals.values())
    for a in inds:
        assert same_individual(a, a)
    for a, b in itertools.product(inds, repeat=2):
        assert same_individual(a, b) == same_individual(b, a)
        if same_individual(a, b):
            assert all(same_individual(a, c) == same_individual(b, c) for c in inds)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(spans(), min_size=1, max_size=3), max_size=8))
def _class_extent_oracle(member_spans):
    ont = OpOntology()
    ont.add_class("C")
    for i, ivs in enumerate(member_spans):
        ont.add_individual(f"m{i}", extent=Extent.of({"r"}, ivs))
        ont.add_member("C", f"m{i}")
    expected = set()
    for ivs in member_spans:
        expected |= days_of(ivs, 10_000)
    assert days_of(class_extent(ont, "C").temporal, 10_000) == expected


@criterion(7, "extensional identity: equivalence on <=20 individuals, employee/author, day-union oracle")
def test_c7_identity(notes):
    _equivalence()
    _class_extent_oracle()
    ont = OpOntology()
    life = Extent.of({"body:js"}, [TimeInterval("1970-03-02", None)])
    ont.add_individual("employee-0042", extent=life)
    ont.add_individual("author-17", extent=Extent.of({"body:js"}, [TimeInterval("1970-03-02", "1999-01-01"), TimeInterval("1999-01-01", None)]))
    assert same_individual(ont.individuals["employee-0042"], ont.individuals["author-17"])
    notes.append("hypothesis suites green; tolerance exact")


@criterion(8, "BORO exhaustiveness, replay, bookstore batch kinds")
def test_c8_boro(op_schema, notes):
    kinds = []
    for extent, inst in itertools.product([True, False], repeat=2):
        v = classify(ConceptProbe("c", extent, inst))
        assert v.kind in set(BoroKind)
        assert replay(v) == v
        kinds.append(v.kind)
    assert set(kinds) == set(BoroKind)
    verdicts = classify_batch(sorted(op_schema.classes), BOOKSTORE / "bookstore_answers.json")
    assert all(v.kind is BoroKind.CLASS for v in verdicts)
    assert len(verdicts) == len(OP_BOOKSTORE_CLASSES)
    notes.append("4 assignments -> " + ",".join(k.value for k in kinds))


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "perdura.cli", *argv], capture_output=True, check=False).stdout


@criterion(9, "round-trips lossless; CLI byte-deterministic")
def test_c9_round_trips(notes):
    orm_files = sorted(ROOT.glob("fixtures/**/*.orm"))
    for path in orm_files:
        schema = parse_orm(path.read_text())
        assert parse_orm(print_orm(schema)) == schema
        assert OrmSchema.from_document(json.loads(canonical_json(schema.to_document()))) == schema
    op_files = [GOLDEN / "bookstore_op.json", GOLDEN / "bookstore_populated.json", EXTENSIBILITY / "bookstore_op_conditions.json"]
    for path in op_files:
        text = path.read_text()
        assert canonical_json(OpOntology.from_document(json.loads(text)).to_document()) == text
    populated = load_instances(load_model(GOLDEN / "bookstore_op.json"), BOOKSTORE / "bookstore_instances.json")
    assert canonical_json(populated.to_document()) == (GOLDEN / "bookstore_populated.json").read_text()

    orm, op, pop = str(BOOKSTORE / "bookstore.orm"), str(GOLDEN / "bookstore_op.json"), str(GOLDEN / "bookstore_populated.json")
    commands = [
        ("parse-orm", orm),
        ("verbalize", orm),
        ("reengineer", orm, "--script", str(BOOKSTORE / "bookstore_script.json")),
        ("load", op, str(BOOKSTORE / "bookstore_instances.json")),
        ("query", pop, "history", "my-copy", "pricedAt"),
        ("lint", orm, "--reference", str(BOOKSTORE / "reference_orm.json"), "--cqs", str(BOOKSTORE / "bookstore_cqs.json")),
        ("diff", op, str(EXTENSIBILITY / "bookstore_op_conditions.json")),
        ("export-triples", pop),
        ("classify", "--batch", str(BOOKSTORE / "bookstore_answers.json"), "Books"),
    ]
    for argv in commands:
        first, second = _cli(*argv), _cli(*argv)
        assert first and first == second, argv
    notes.append(f"{len(orm_files)} .orm, {len(op_files)} OP documents, {len(commands)} CLI verbs x2")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

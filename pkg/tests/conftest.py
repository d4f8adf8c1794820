from pathlib import Path

import pytest

from perdura.documents import load_op
from perdura.instances import load_instances
from perdura.orm import parse_orm
from perdura.query import load_cqs
from perdura.quality import load_reference
from perdura.reengine import load_script, reengineer

ROOT = Path(__file__).resolve().parents[1]
BOOKSTORE = ROOT / "fixtures" / "bookstore"
EXTENSIBILITY = ROOT / "fixtures" / "extensibility"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def orm_text():
    return (BOOKSTORE / "bookstore.orm").read_text(encoding="utf-8")


@pytest.fixture
def orm_schema(orm_text):
    return parse_orm(orm_text)


@pytest.fixture
def script():
    return load_script(BOOKSTORE / "bookstore_script.json")


@pytest.fixture
def reengineered(orm_schema, script):
    return reengineer(orm_schema, script)


@pytest.fixture
def op_schema():
    return load_op(GOLDEN / "bookstore_op.json")


@pytest.fixture
def populated(op_schema):
    return load_instances(op_schema, BOOKSTORE / "bookstore_instances.json")


@pytest.fixture(scope="session")
def cqs():
    return load_cqs(BOOKSTORE / "bookstore_cqs.json")


@pytest.fixture(scope="session")
def ref_orm():
    return load_reference(BOOKSTORE / "reference_orm.json")


@pytest.fixture(scope="session")
def ref_op():
    return load_reference(BOOKSTORE / "reference_op.json")


# criterion number -> (title, passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[n]
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {n} [{mark}] {title}" + (f" :: {detail}" if detail else ""))

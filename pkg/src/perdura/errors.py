"""Exception hierarchy.

Every error carries a short ``code`` (the class name) used by the CLI
diagnostic prefix ``error[CODE]:``.
"""


class PerduraError(Exception):
    """Base class for all toolkit errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class InputError(PerduraError):
    """Malformed input document; maps to CLI exit code 3."""


class MalformedDocument(InputError):
    pass


class OrmSyntaxError(InputError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col

    @property
    def code(self) -> str:
        return "SyntaxError"


class UndeclaredEntity(InputError):
    pass


class DuplicateEntity(InputError):
    pass


class CyclicSubtype(InputError):
    pass


# store / op-core
class DanglingRef(PerduraError):
    pass


class SchemaMismatch(DanglingRef):
    pass


class InvariantViolation(PerduraError):
    def __init__(self, message: str, element_id: str | None = None):
        super().__init__(f"{element_id}: {message}" if element_id else message)
        self.element_id = element_id


class DuplicateId(InvariantViolation):
    pass


class UnknownElement(PerduraError):
    pass


class UnknownClass(UnknownElement):
    pass


class UnknownIndividual(UnknownElement):
    pass


class InstantMismatch(PerduraError):
    pass


class KindMismatch(PerduraError):
    pass


# boro
class InsufficientAnswers(PerduraError):
    def __init__(self, concept_name: str, question: str):
        super().__init__(f"{concept_name!r}: no answer for {question!r}")
        self.concept_name = concept_name
        self.question = question


class SessionComplete(PerduraError):
    pass


# reengine
class NameCollision(PerduraError):
    pass


# query / quality
class NotFunctional(PerduraError):
    pass


class MalformedCQ(InputError):
    pass


class DanglingMapping(PerduraError):
    pass

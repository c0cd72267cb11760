"""Exception hierarchy for the inqml engine.

Validation verdicts are returned as values; these exceptions are reserved for
malformed input and violated preconditions.
"""

from __future__ import annotations


class InqmlError(Exception):
    """Base class for every error raised by the toolkit."""


class FormulaSyntaxError(InqmlError, ValueError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class UnknownPropositionError(InqmlError, ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown proposition '{name}'")


class SignatureError(InqmlError, ValueError):
    pass


class SignatureMismatchError(InqmlError, ValueError):
    pass


class ModelError(InqmlError, ValueError):
    """A model or relational structure is structurally malformed."""


class CapExceededError(InqmlError, RuntimeError):
    pass


class UnboundVariableError(InqmlError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable '{name}'")

    def __str__(self) -> str:
        return self.args[0]


class FreeVariableError(InqmlError, ValueError):
    pass


class ShapeError(InqmlError, ValueError):
    pass


class DocumentError(InqmlError, ValueError):
    pass

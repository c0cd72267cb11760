"""Text → core AST. Derived connectives are desugared while the tree is built."""

from __future__ import annotations

import logging
from functools import lru_cache

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from inqml.core.errors import FormulaSyntaxError, InqmlError, UnknownPropositionError
from inqml.core.formula import (
    BOT,
    And,
    Atom,
    Box,
    BoxPlus,
    Formula,
    Implies,
    InqDisj,
    Signature,
    classical_or,
    diamond,
    neg,
    top,
    whether,
)

log = logging.getLogger("formula_parser")

# Precedence, tightest first: unary, &, vv, \/, -> (right-associative).
INQML_GRAMMAR = r"""
    ?start: implication

    ?implication: cl_disj
                | cl_disj "->" implication      -> implies

    ?cl_disj: inq_disj
            | cl_disj "\\/" inq_disj         -> classical_or

    ?inq_disj: conj
             | inq_disj "vv" conj            -> inq_disj

    ?conj: unary
         | conj "&" unary                    -> conj

    ?unary: "~" unary                        -> neg
          | "?" unary                        -> whether
          | "[]" unary                       -> box
          | "[+]" unary                      -> box_plus
          | "<>" unary                       -> diamond
          | primary

    ?primary: "bot"                          -> bottom
            | "top"                          -> top
            | IDENT                          -> prop
            | "(" implication ")"

    IDENT: /[a-zA-Z][a-zA-Z0-9_]*/

    %import common.WS
    %ignore WS
"""


class _Desugar(Transformer):
    def __init__(self, signature: Signature | None):
        super().__init__()
        self.signature = signature

    def prop(self, items: list[Token]) -> Formula:
        name = str(items[0])
        if self.signature is not None and name not in self.signature:
            raise UnknownPropositionError(name)
        return Atom(name)

    def bottom(self, _items) -> Formula:
        return BOT

    def top(self, _items) -> Formula:
        return top()

    def implies(self, items) -> Formula:
        return Implies(items[0], items[1])

    def classical_or(self, items) -> Formula:
        return classical_or(items[0], items[1])

    def inq_disj(self, items) -> Formula:
        return InqDisj(items[0], items[1])

    def conj(self, items) -> Formula:
        return And(items[0], items[1])

    def neg(self, items) -> Formula:
        return neg(items[0])

    def whether(self, items) -> Formula:
        return whether(items[0])

    def box(self, items) -> Formula:
        return Box(items[0])

    def box_plus(self, items) -> Formula:
        return BoxPlus(items[0])

    def diamond(self, items) -> Formula:
        return diamond(items[0])


@lru_cache(maxsize=1)
def _lark() -> Lark:
    return Lark(INQML_GRAMMAR, parser="lalr", maybe_placeholders=False)


def parse(text: str, signature: Signature | None = None) -> Formula:
    """Parse INQML text into a desugared core formula.

    With a signature, every proposition name must be declared in it.
    """
    try:
        tree = _lark().parse(text)
    except UnexpectedEOF as exc:
        raise FormulaSyntaxError("unexpected end of input", len(text), text) from exc
    except UnexpectedCharacters as exc:
        raise FormulaSyntaxError(f"unexpected character {text[exc.pos_in_stream]!r}", exc.pos_in_stream, text) from exc
    except UnexpectedInput as exc:
        token = getattr(exc, "token", None)
        shown = f" {str(token)!r}" if token is not None and str(token) else ""
        position = getattr(exc, "pos_in_stream", None)
        raise FormulaSyntaxError(f"unexpected token{shown}", position, text) from exc

    try:
        formula = _Desugar(signature).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, InqmlError):
            raise exc.orig_exc from None
        raise
    log.debug(f"Parsed {text!r}")
    return formula

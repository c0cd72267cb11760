"""INQML abstract syntax over a finite proposition signature.

Only the seven core constructors exist as node types; negation, classical
disjunction, diamond, top and the question mark are smart constructors that
build core trees directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from inqml.core import mutations
from inqml.core.errors import SignatureError

KEYWORDS = frozenset({"bot", "top", "vv"})
IDENT_PATTERN = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


# ============================================================================
# CORE CONSTRUCTORS
# ============================================================================

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class InqDisj:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box:
    body: Formula


@dataclass(frozen=True)
class BoxPlus:
    body: Formula


Formula = Union[Atom, Bottom, And, Implies, InqDisj, Box, BoxPlus]

BOT = Bottom()


# ============================================================================
# DERIVED CONNECTIVES (desugared on construction)
# ============================================================================

def neg(phi: Formula) -> Formula:
    return Implies(phi, BOT)


def top() -> Formula:
    return Implies(BOT, BOT)


def classical_or(left: Formula, right: Formula) -> Formula:
    return neg(And(neg(left), neg(right)))


def diamond(phi: Formula) -> Formula:
    return neg(Box(neg(phi)))


def whether(phi: Formula) -> Formula:
    return InqDisj(phi, neg(phi))


def conjoin(parts: list[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is top."""
    if not parts:
        return top()
    out = parts[0]
    for part in parts[1:]:
        out = And(out, part)
    return out


def inq_join(parts: list[Formula]) -> Formula:
    """Left-nested inquisitive disjunction; the empty disjunction is bot."""
    if not parts:
        return BOT
    out = parts[0]
    for part in parts[1:]:
        out = InqDisj(out, part)
    return out


# ============================================================================
# SIGNATURE
# ============================================================================

@dataclass(frozen=True)
class Signature:
    props: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.props)) != len(self.props):
            raise SignatureError(f"duplicate proposition names in {list(self.props)}")
        for name in self.props:
            if not IDENT_PATTERN.match(name) or name in KEYWORDS:
                raise SignatureError(f"'{name}' is not a valid proposition name")

    @classmethod
    def of(cls, *names: str) -> Signature:
        return cls(tuple(names))

    def __contains__(self, name: object) -> bool:
        return name in self.props

    def __len__(self) -> int:
        return len(self.props)


# ============================================================================
# SYNTACTIC MEASURES
# ============================================================================

def flatness_grade(phi: Formula) -> int:
    match phi:
        case Atom() | Bottom() | Box() | BoxPlus():
            return 0
        case And(left, right):
            return max(flatness_grade(left), flatness_grade(right))
        case Implies(left, right):
            if mutations.is_active(mutations.Mutation.FLAT_IMPLIES):
                return flatness_grade(left)
            return flatness_grade(right)
        case InqDisj(left, right):
            bump = 0 if mutations.is_active(mutations.Mutation.FLAT_DISJ_NO_PLUS_ONE) else 1
            return flatness_grade(left) + flatness_grade(right) + bump
    raise TypeError(f"not a formula: {phi!r}")


def modal_depth(phi: Formula) -> int:
    match phi:
        case Atom() | Bottom():
            return 0
        case And(left, right) | Implies(left, right) | InqDisj(left, right):
            return max(modal_depth(left), modal_depth(right))
        case Box(body) | BoxPlus(body):
            return modal_depth(body) + 1
    raise TypeError(f"not a formula: {phi!r}")


def depth(phi: Formula) -> int:
    """Connective plus modal nesting depth; atoms and bot have depth 0."""
    match phi:
        case Atom() | Bottom():
            return 0
        case And(left, right) | Implies(left, right) | InqDisj(left, right):
            return 1 + max(depth(left), depth(right))
        case Box(body) | BoxPlus(body):
            return 1 + depth(body)
    raise TypeError(f"not a formula: {phi!r}")


def children(phi: Formula) -> tuple[Formula, ...]:
    match phi:
        case And(left, right) | Implies(left, right) | InqDisj(left, right):
            return (left, right)
        case Box(body) | BoxPlus(body):
            return (body,)
    return ()


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk, the formula itself first."""
    yield phi
    for child in children(phi):
        yield from subformulas(child)


def size(phi: Formula) -> int:
    return sum(1 for _ in subformulas(phi))


def count_inq_disj(phi: Formula) -> int:
    return sum(1 for sub in subformulas(phi) if isinstance(sub, InqDisj))


def atoms(phi: Formula) -> frozenset[str]:
    return frozenset(sub.name for sub in subformulas(phi) if isinstance(sub, Atom))


# ============================================================================
# PRINTING
# ============================================================================

# Binding strength, loosest first. ClassicalOr never appears in core trees.
PREC_IMPLIES = 1
PREC_INQ_DISJ = 3
PREC_AND = 4
PREC_UNARY = 5
PREC_ATOM = 6


def _prec(phi: Formula) -> int:
    match phi:
        case Atom() | Bottom():
            return PREC_ATOM
        case Box() | BoxPlus():
            return PREC_UNARY
        case And():
            return PREC_AND
        case InqDisj():
            return PREC_INQ_DISJ
        case Implies():
            return PREC_IMPLIES
    raise TypeError(f"not a formula: {phi!r}")


def _wrap(phi: Formula, needs_parens: bool) -> str:
    text = to_text(phi)
    return f"({text})" if needs_parens else text


def to_text(phi: Formula) -> str:
    """Canonical ASCII rendering with minimal parentheses; parse(to_text(φ)) == φ."""
    match phi:
        case Atom(name):
            return name
        case Bottom():
            return "bot"
        case Box(body):
            return f"[] {_wrap(body, _prec(body) < PREC_UNARY)}"
        case BoxPlus(body):
            return f"[+] {_wrap(body, _prec(body) < PREC_UNARY)}"
        case And(left, right):
            return f"{_wrap(left, _prec(left) < PREC_AND)} & {_wrap(right, _prec(right) <= PREC_AND)}"
        case InqDisj(left, right):
            return (
                f"{_wrap(left, _prec(left) < PREC_INQ_DISJ)} vv "
                f"{_wrap(right, _prec(right) <= PREC_INQ_DISJ)}"
            )
        case Implies(left, right):
            # right-associative
            return (
                f"{_wrap(left, _prec(left) <= PREC_IMPLIES)} -> "
                f"{_wrap(right, _prec(right) < PREC_IMPLIES)}"
            )
    raise TypeError(f"not a formula: {phi!r}")

"""Support semantics M, s ⊨ φ over models and pseudo-models.

Two strategies:
  naive: the recursive clauses, implication enumerating every t ⊆ s;
  graded: checks every t ⊆ s with |t| ≤ flat(φ)+1 with the naive checker.
The two are kept independent so each can serve as the other's oracle.
"""

from __future__ import annotations

import logging
from enum import Enum

from inqml.core import bits, mutations
from inqml.core.bits import InfoState
from inqml.core.errors import ModelError, UnknownPropositionError
from inqml.core.formula import (
    And,
    Atom,
    Bottom,
    Box,
    BoxPlus,
    Formula,
    Implies,
    InqDisj,
    atoms,
    classical_or,
    diamond,
    flatness_grade,
    to_text,
)
from inqml.core.model import InqModel, check_cap, inquisitive_closure, kripke_successors

log = logging.getLogger("support")


class Strategy(str, Enum):
    NAIVE = "naive"
    GRADED = "graded"


class SupportChecker:
    """Evaluates support for one model, memoizing (subformula, state) pairs.

    A checker is query-local: build one per model and drop it afterwards.
    """

    def __init__(self, model: InqModel, trace: list[str] | None = None):
        self.model = model
        self.sigma_of = kripke_successors(model)
        self._memo: dict[tuple[int, InfoState], bool] = {}
        self._keep: list[Formula] = []
        self._trace = trace
        self._indent = 0

    def check_signature(self, phi: Formula) -> None:
        for name in atoms(phi):
            if name not in self.model.props:
                raise UnknownPropositionError(name)

    def supports(self, state: InfoState, phi: Formula) -> bool:
        key = (id(phi), state)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        self._keep.append(phi)
        if self._trace is not None:
            self._indent += 1
        result = self._clause(state, phi)
        if self._trace is not None:
            self._indent -= 1
            self._trace.append(
                f"{'  ' * self._indent}{self.model.format_state(state)} "
                f"{'⊨' if result else '⊭'} {to_text(phi)}"
            )
        self._memo[key] = result
        return result

    def _clause(self, s: InfoState, phi: Formula) -> bool:
        match phi:
            case Atom(name):
                return bits.is_subset(s, self.model.extension(name))
            case Bottom():
                return s == bits.EMPTY
            case And(left, right):
                return self.supports(s, left) and self.supports(s, right)
            case Implies(left, right):
                strict = mutations.is_active(mutations.Mutation.STRICT_IMPLICATION)
                candidates = bits.proper_subsets(s) if strict else bits.subsets(s)
                return all(
                    not self.supports(t, left) or self.supports(t, right) for t in candidates
                )
            case InqDisj(left, right):
                return self.supports(s, left) or self.supports(s, right)
            case Box(body):
                return all(self.supports(self.sigma_of[w], body) for w in bits.members(s))
            case BoxPlus(body):
                return all(
                    self.supports(t, body) for w in bits.members(s) for t in self.model.sigma[w]
                )
        raise TypeError(f"not a formula: {phi!r}")


def _check_state(model: InqModel, state: InfoState) -> None:
    if not 0 <= state < 1 << model.n_worlds:
        raise ModelError(f"state {state:#b} is wider than |W| = {model.n_worlds}")
    check_cap(model.n_worlds)


def supports(model: InqModel, state: InfoState, phi: Formula, trace: list[str] | None = None) -> bool:
    """Exact support relation, all seven clauses, non-strict t ⊆ s in implication."""
    _check_state(model, state)
    checker = SupportChecker(model, trace)
    checker.check_signature(phi)
    return checker.supports(state, phi)


def supports_graded(model: InqModel, state: InfoState, phi: Formula) -> bool:
    """Support via graded flatness: all t ⊆ s with 1 ≤ |t| ≤ flat(φ)+1."""
    _check_state(model, state)
    checker = SupportChecker(model)
    checker.check_signature(phi)
    bound = flatness_grade(phi) + 1
    return all(checker.supports(t, phi) for t in bits.subsets_up_to(state, bound))


def evaluate(model: InqModel, state: InfoState, phi: Formula, strategy: Strategy = Strategy.NAIVE) -> bool:
    if strategy is Strategy.GRADED:
        return supports_graded(model, state, phi)
    return supports(model, state, phi)


# ============================================================================
# SEMANTIC SANITY VERIFIERS (oracles: must always return True)
# ============================================================================

def check_persistency(model: InqModel, state: InfoState, phi: Formula) -> bool:
    _check_state(model, state)
    checker = SupportChecker(model)
    if not checker.supports(state, phi):
        return True
    return all(checker.supports(t, phi) for t in bits.subsets(state))


def check_ex_falso(model: InqModel, phi: Formula) -> bool:
    return supports(model, bits.EMPTY, phi)


def check_closure_invariance(model: InqModel, state: InfoState, phi: Formula) -> bool:
    closed = inquisitive_closure(model)
    return supports(model, state, phi) == supports(closed, state, phi)


def check_strategy_agreement(model: InqModel, state: InfoState, phi: Formula) -> bool:
    return supports(model, state, phi) == supports_graded(model, state, phi)


def check_kripke_sanity(model: InqModel, left: Formula, right: Formula) -> bool:
    """On singletons, ∨ and ◇ behave like their Kripke counterparts."""
    checker = SupportChecker(model)
    for w in model.worlds:
        single = 1 << w
        expected_or = checker.supports(single, left) or checker.supports(single, right)
        if checker.supports(single, classical_or(left, right)) != expected_or:
            return False
        successors = checker.sigma_of[w]
        expected_diamond = any(checker.supports(1 << v, left) for v in bits.members(successors))
        if checker.supports(single, diamond(left)) != expected_diamond:
            return False
    return True

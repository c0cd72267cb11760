"""Standard translation of INQML into two-sorted FO, and the ↓ / CNF constructions.

Fresh variables come from one counter per sort held by the translator, so
nested translation instances never capture each other's variables.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import count

from inqml.core import fo, mutations
from inqml.core.bits import InfoState
from inqml.core.errors import FreeVariableError, ShapeError
from inqml.core.formula import (
    Atom,
    Bottom,
    Box,
    BoxPlus,
    Formula,
    Implies,
    InqDisj,
    conjoin,
    flatness_grade,
    inq_join,
)
from inqml.core.formula import And as FAnd
from inqml.core.model import InqModel
from inqml.core.relational import Policy, RelStruct, encode
from inqml.core.support import supports

log = logging.getLogger("translator")

DEFAULT_LAMBDA = "L"
DEFAULT_WORLD_VAR = "x"


# ============================================================================
# STANDARD TRANSLATION
# ============================================================================

class StandardTranslator:
    """Builds φ*(λ) and ST(φ, x̄) with globally fresh bound variables.

    Names: wrapper tuples x1, x2, …; inner tuples y1, y2, …; states m1, m2, ….
    """

    def __init__(self) -> None:
        self._x = count(1)
        self._y = count(1)
        self._m = count(1)

    def _fresh(self, counter: count, prefix: str, n: int) -> tuple[str, ...]:
        return tuple(f"{prefix}{next(counter)}" for _ in range(n))

    def star(self, phi: Formula, lam: str = DEFAULT_LAMBDA) -> fo.FOFormula:
        """φ*(λ) := ∀x̄ (⋀ x_k ∈ λ → ST(φ, x̄)), |x̄| = flat(φ)+1."""
        xs = self._fresh(self._x, "x", flatness_grade(phi) + 1)
        guard = fo.conj([fo.MemAtom(x, lam) for x in xs])
        return fo.ForallWorld(xs, fo.Implies(guard, self.st(phi, xs)))

    def st(self, phi: Formula, xs: tuple[str, ...]) -> fo.FOFormula:
        match phi:
            case Atom(name):
                return fo.conj([fo.PropAtom(name, x) for x in xs])
            case Bottom():
                return fo.conj([fo.Not(fo.EqAtom(x, x)) for x in xs])
            case FAnd(left, right):
                return fo.And((self.st(left, xs), self.st(right, xs)))
            case InqDisj(left, right):
                return fo.Or((self.st(left, xs), self.st(right, xs)))
            case Implies(left, right):
                ys = self._fresh(self._y, "y", len(xs))
                guard = fo.conj([fo.disj([fo.EqAtom(y, x) for x in xs]) for y in ys])
                return fo.ForallWorld(ys, fo.Implies(guard, fo.Implies(self.st(left, ys), self.st(right, ys))))
            case Box(body):
                return fo.conj([self._box_conjunct(body, x) for x in xs])
            case BoxPlus(body):
                conjuncts = []
                for x in xs:
                    (mu,) = self._fresh(self._m, "m", 1)
                    conjuncts.append(fo.ForallState((mu,), fo.Implies(fo.EAtom(x, mu), self.star(body, mu))))
                return fo.conj(conjuncts)
        raise TypeError(f"not a formula: {phi!r}")

    def _box_conjunct(self, body: Formula, x: str) -> fo.FOFormula:
        n = flatness_grade(body) + 1
        ys = self._fresh(self._y, "y", n)
        mus = self._fresh(self._m, "m", n)
        swapped = mutations.is_active(mutations.Mutation.BOX_GUARD_SWAP)
        guards = []
        for y, mu in zip(ys, mus):
            if swapped:
                guards.append(fo.And((fo.EAtom(y, mu), fo.MemAtom(x, mu))))
            else:
                guards.append(fo.And((fo.EAtom(x, mu), fo.MemAtom(y, mu))))
        return fo.ForallWorld(ys, fo.ForallState(mus, fo.Implies(fo.conj(guards), self.st(body, ys))))


def standard_translate(phi: Formula, lam: str = DEFAULT_LAMBDA) -> fo.FOFormula:
    return StandardTranslator().star(phi, lam)


def world_translate(phi: Formula, x: str = DEFAULT_WORLD_VAR) -> fo.FOFormula:
    """φ*(x) := ST(φ, x), for world-pointed evaluation."""
    return StandardTranslator().st(phi, (x,))


@dataclass(frozen=True)
class TranslationStats:
    flatness: int
    tuple_length: int
    world_vars: int
    state_vars: int
    nodes: int


def translation_stats(phi: Formula, psi: fo.FOFormula, *, world: bool = False) -> TranslationStats:
    """Sizes of a translation; the state wrapper binds flat(φ)+1 world variables."""
    tuple_length = 1 if world else len(psi.vars)
    return TranslationStats(
        flatness=flatness_grade(phi),
        tuple_length=tuple_length,
        world_vars=fo.count_quantified(psi, fo.WORLD),
        state_vars=fo.count_quantified(psi, fo.STATE),
        nodes=sum(1 for _ in fo.walk(psi)),
    )


# ============================================================================
# FRAGMENT ORACLES
# ============================================================================

def check_fragment(model: InqModel, state: InfoState, phi: Formula, policy: Policy = Policy.MINIMAL) -> bool:
    """M, s ⊨ φ  iff  encode(M, s), λ ↦ s ⊨ φ*(λ)."""
    rel = encode(model, state, policy)
    return supports(model, state, phi) == eval_star(rel, phi)


def eval_star(rel: RelStruct, phi: Formula, point: int | None = None) -> bool:
    """φ*(λ) at λ ↦ `point` (the structure's distinguished state by default)."""
    index = rel.point if point is None else point
    assignment = fo.Assignment(states={DEFAULT_LAMBDA: index})
    return fo.eval_fo(rel, assignment, standard_translate(phi))


def check_world_fragment(model: InqModel, w: int, phi: Formula) -> bool:
    rel = encode(model, 1 << w, Policy.MINIMAL)
    truth = fo.eval_fo(rel, fo.Assignment(worlds={DEFAULT_WORLD_VAR: w}), world_translate(phi))
    return supports(model, 1 << w, phi) == truth


# ============================================================================
# ↓-RELATIVIZATION
# ============================================================================

def _fresh_name(taken: frozenset[str], prefix: str) -> str:
    for i in count(1):
        name = f"{prefix}{i}"
        if name not in taken:
            return name
    raise AssertionError("unreachable")


def down_relativize(psi: fo.FOFormula, lam: str = DEFAULT_LAMBDA, *, nonempty: bool = False) -> fo.FOFormula:
    """ψ↓(λ) := ∀μ (μ ⊆ λ → ψ(μ)).

    With `nonempty`, μ only ranges over non-empty represented subsets; the
    persistent-CNF rewrite is sound for that reading.
    """
    worlds, states = fo.free_vars_by_sort(psi)
    if worlds or states != {lam}:
        raise FreeVariableError(
            f"expected exactly the free state variable {lam}, found "
            f"worlds {sorted(worlds)} and states {sorted(states)}"
        )
    taken = fo.all_vars(psi) | {lam}
    mu = _fresh_name(taken, "n")
    guard: fo.FOFormula = fo.StateSubset(mu, lam)
    if nonempty:
        z = _fresh_name(taken | {mu}, "z")
        guard = fo.And((guard, fo.ExistsWorld((z,), fo.MemAtom(z, mu))))
    return fo.ForallState((mu,), fo.Implies(guard, fo.rename_free(psi, lam, mu)))


def is_persistent_on(rel: RelStruct, psi: fo.FOFormula, lam: str = DEFAULT_LAMBDA) -> bool:
    """ψ(λ) is preserved from every represented state to its represented subsets."""
    evaluator = fo.FOEvaluator(rel)
    truth = [evaluator.evaluate(psi, {lam: i}) for i in range(len(rel.states))]
    for i, big in enumerate(rel.states):
        if not truth[i]:
            continue
        for j, small in enumerate(rel.states):
            if small & ~big == 0 and not truth[j]:
                return False
    return True


# ============================================================================
# BOOLEAN COMBINATIONS OF TRANSLATIONS (CNF)
# ============================================================================

@dataclass(frozen=True)
class Literal:
    """φ*(λ) when positive, ¬φ*(λ) otherwise."""

    formula: Formula
    positive: bool = True


Clause = tuple[Literal, ...]


def _check_cnf(clauses: list[Clause] | tuple[Clause, ...]) -> None:
    for i, clause in enumerate(clauses):
        if not isinstance(clause, tuple | list):
            raise ShapeError(f"clause {i} is not a sequence of literals")
        for literal in clause:
            if not isinstance(literal, Literal):
                raise ShapeError(f"clause {i} contains {literal!r}, expected a Literal")
            if not isinstance(literal.formula, Atom | Bottom | FAnd | Implies | InqDisj | Box | BoxPlus):
                raise ShapeError(f"clause {i} has a literal that is not an INQML formula")


def cnf_to_fo(clauses: list[Clause] | tuple[Clause, ...], lam: str = DEFAULT_LAMBDA) -> fo.FOFormula:
    """⋀_clauses ⋁_literals (¬)φ*(λ); empty CNF is true, an empty clause false."""
    _check_cnf(clauses)
    translator = StandardTranslator()
    rendered = []
    for clause in clauses:
        literals = []
        for literal in clause:
            star = translator.star(literal.formula, lam)
            literals.append(star if literal.positive else fo.Not(star))
        rendered.append(fo.disj(literals) if literals else fo.FALSE)
    return fo.conj(rendered) if rendered else fo.TRUE


def rewrite_persistent_bc(clauses: list[Clause] | tuple[Clause, ...]) -> Formula:
    """⋀_clauses (⋀ negatives → ⩒ positives).

    Empty negatives give the antecedent bot → bot, empty positives the
    consequent bot. The empty CNF rewrites to bot → bot.
    """
    _check_cnf(clauses)
    implications = []
    for clause in clauses:
        negatives = [lit.formula for lit in clause if not lit.positive]
        positives = [lit.formula for lit in clause if lit.positive]
        implications.append(Implies(conjoin(negatives), inq_join(positives)))
    result = conjoin(implications)
    log.debug(f"Rewrote {len(clauses)} clauses into one implication chain")
    return result

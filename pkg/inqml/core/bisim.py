"""Two-phase inquisitive bisimulation on finite (pseudo-)models.

World pairs are related level by level; a relation is stored as one bitmask
row per left world (columns are right worlds). State pairs are compared by
the flat lifting of the world relation at the same level. Both models are
replaced by their inquisitive closures before anything is compared.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Literal, Union

from inqml.core import bits
from inqml.core.bits import InfoState
from inqml.core.errors import ModelError, SignatureMismatchError
from inqml.core.formula import Formula, modal_depth, to_text
from inqml.core.model import InqModel, inquisitive_closure
from inqml.core.support import SupportChecker

log = logging.getLogger("bisim")

OMEGA = "omega"
Side = Literal["left", "right"]


# ============================================================================
# GAME VOCABULARY
# ============================================================================

@dataclass(frozen=True)
class StatePair:
    left: InfoState
    right: InfoState


@dataclass(frozen=True)
class WorldPair:
    left: int
    right: int


GamePosition = Union[StatePair, WorldPair]


@dataclass(frozen=True)
class Move:
    """One spoiler move and the defender's best reply.

    kind "world": challenge a world of the current state pair;
    kind "state": challenge a state in Σ↓ of the current world pair;
    kind "atoms": the current world pair disagrees on a proposition.
    """

    kind: Literal["world", "state", "atoms"]
    side: Side | None
    challenge: tuple[str, ...]
    response: tuple[str, ...] | None
    detail: str | None = None

    def as_dict(self) -> dict[str, object]:
        out: dict[str, object] = {"kind": self.kind, "challenge": list(self.challenge)}
        if self.side is not None:
            out["side"] = self.side
        out["response"] = None if self.response is None else list(self.response)
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class BisimResult:
    level: int | str
    equivalent: bool
    witness: tuple[Move, ...] | None
    stabilized_at: int | None = None

    def as_dict(self) -> dict[str, object]:
        return {
            "level": self.level,
            "equivalent": self.equivalent,
            "witness": None if self.witness is None else [m.as_dict() for m in self.witness],
            "stabilized_at": self.stabilized_at,
        }


# ============================================================================
# REFINEMENT
# ============================================================================

def check_signatures(left: InqModel, right: InqModel) -> None:
    if sorted(left.props) != sorted(right.props):
        raise SignatureMismatchError(f"signatures differ: {sorted(left.props)} vs {sorted(right.props)}")


class Refinement:
    """World relations Z_0 ⊇ Z_1 ⊇ … between two closed models, computed lazily."""

    def __init__(self, left: InqModel, right: InqModel):
        check_signatures(left, right)
        self.left = inquisitive_closure(left)
        self.right = inquisitive_closure(right)
        base = []
        for w in self.left.worlds:
            kind = self.left.atomic_type(w)
            base.append(bits.mask_of(v for v in self.right.worlds if self.right.atomic_type(v) == kind))
        self.tables: list[tuple[InfoState, ...]] = [tuple(base)]
        self.stabilized_at: int | None = None

    # -- lifting --------------------------------------------------------------

    def columns(self, level: int) -> tuple[InfoState, ...]:
        rows = self.table(level)
        return tuple(
            bits.mask_of(w for w in self.left.worlds if rows[w] >> v & 1) for v in self.right.worlds
        )

    def lift(self, level: int, s: InfoState, t: InfoState) -> bool:
        """Flat lifting: ∀w∈s ∃v∈t Z(w,v) and ∀v∈t ∃w∈s Z(w,v)."""
        rows = self.table(level)
        if any(rows[w] & t == 0 for w in bits.members(s)):
            return False
        image = 0
        for w in bits.members(s):
            image |= rows[w]
        return bits.is_subset(t, image)

    def _step(self, level: int) -> tuple[InfoState, ...]:
        base = self.tables[0]
        out = []
        for w in self.left.worlds:
            row = 0
            for v in bits.members(base[w]):
                forth = all(
                    any(self.lift(level, a, b) for b in self.right.sigma[v]) for a in self.left.sigma[w]
                )
                back = forth and all(
                    any(self.lift(level, a, b) for a in self.left.sigma[w]) for b in self.right.sigma[v]
                )
                if back:
                    row |= 1 << v
            out.append(row)
        return tuple(out)

    def table(self, level: int) -> tuple[InfoState, ...]:
        if level < 0:
            raise ValueError("bisimulation levels start at 0")
        while len(self.tables) <= level:
            if self.stabilized_at is not None:
                return self.tables[self.stabilized_at]
            nxt = self._step(len(self.tables) - 1)
            if nxt == self.tables[-1]:
                self.stabilized_at = len(self.tables) - 1
                log.debug(f"World relation stable at level {self.stabilized_at}")
                return nxt
            self.tables.append(nxt)
        return self.tables[level]

    def stabilize(self) -> int:
        level = 0
        while self.stabilized_at is None:
            level += 1
            self.table(level)
        return self.stabilized_at

    # -- levels of individual pairs ---------------------------------------------

    def world_level(self, w: int, v: int, ceiling: int) -> int:
        """Largest k ≤ ceiling with Z_k(w, v), or -1 if the atoms differ."""
        k = -1
        while k < ceiling and self.table(k + 1)[w] >> v & 1:
            k += 1
        return k

    def state_level(self, s: InfoState, t: InfoState, ceiling: int) -> int:
        k = -1
        while k < ceiling and self.lift(k + 1, s, t):
            k += 1
        return k

    # -- spoiler strategy ---------------------------------------------------------

    def state_witness(self, s: InfoState, t: InfoState, level: int) -> list[Move]:
        """Moves by which the spoiler refutes s ~_level t (which must fail)."""
        rows, cols = self.table(level), self.columns(level)
        for w in bits.members(s):
            if rows[w] & t == 0:
                return self._world_challenge("left", w, t, level)
        for v in bits.members(t):
            if cols[v] & s == 0:
                return self._world_challenge("right", v, s, level)
        raise AssertionError("state pair is equivalent at this level")

    def _world_challenge(self, side: Side, w: int, answers: InfoState, level: int) -> list[Move]:
        mine, theirs = (self.left, self.right) if side == "left" else (self.right, self.left)
        if answers == 0:
            return [Move("world", side, (mine.world_names[w],), None, "no world to answer with")]

        def pair(v: int) -> tuple[int, int]:
            return (w, v) if side == "left" else (v, w)

        best = max(bits.members(answers), key=lambda v: (self.world_level(*pair(v), level), -v))
        move = Move("world", side, (mine.world_names[w],), (theirs.world_names[best],))
        return [move, *self.world_witness(*pair(best), level)]

    def world_witness(self, w: int, v: int, level: int) -> list[Move]:
        """Moves refuting Z_level(w, v), starting at the first level that fails."""
        failing = self.world_level(w, v, level) + 1
        if failing == 0:
            differ = [
                p for p in sorted(self.left.props)
                if bool(self.left.extension(p) >> w & 1) != bool(self.right.extension(p) >> v & 1)
            ]
            names = (self.left.world_names[w], self.right.world_names[v])
            return [Move("atoms", None, names, None, "differ on " + ", ".join(differ))]
        below = failing - 1
        for a in self.left.sigma[w]:
            if not any(self.lift(below, a, b) for b in self.right.sigma[v]):
                return self._state_challenge("left", a, self.right.sigma[v], below, self.left, self.right)
        for b in self.right.sigma[v]:
            if not any(self.lift(below, a, b) for a in self.left.sigma[w]):
                return self._state_challenge("right", b, self.left.sigma[w], below, self.right, self.left)
        raise AssertionError("world pair survives this level")

    def _state_challenge(
        self,
        side: Side,
        state: InfoState,
        answers: tuple[InfoState, ...],
        level: int,
        mine: InqModel,
        theirs: InqModel,
    ) -> list[Move]:
        def pair(t: InfoState) -> tuple[InfoState, InfoState]:
            return (state, t) if side == "left" else (t, state)

        best = max(answers, key=lambda t: (self.state_level(*pair(t), level), -t))
        move = Move("state", side, tuple(mine.state_names(state)), tuple(theirs.state_names(best)))
        return [move, *self.state_witness(*pair(best), level)]


# ============================================================================
# OPERATIONS
# ============================================================================

def _check_point(model: InqModel, state: InfoState) -> None:
    if not 0 <= state < 1 << model.n_worlds:
        raise ModelError(f"state {state:#b} is wider than |W| = {model.n_worlds}")


def n_bisim(left: InqModel, s: InfoState, right: InqModel, t: InfoState, n: int) -> BisimResult:
    """M, s ~_n M', t. World points are passed as singletons."""
    if n < 0:
        raise ValueError("n must be non-negative")
    _check_point(left, s)
    _check_point(right, t)
    refinement = Refinement(left, right)
    equivalent = refinement.lift(n, s, t)
    witness = None if equivalent else tuple(refinement.state_witness(s, t, n))
    return BisimResult(n, equivalent, witness, refinement.stabilized_at)


def full_bisim(left: InqModel, s: InfoState, right: InqModel, t: InfoState) -> BisimResult:
    """The stabilized relation, which on finite models is ~_ω."""
    _check_point(left, s)
    _check_point(right, t)
    refinement = Refinement(left, right)
    stable = refinement.stabilize()
    equivalent = refinement.lift(stable, s, t)
    witness = None if equivalent else tuple(refinement.state_witness(s, t, stable))
    log.debug(f"Full bisimulation: stable at {stable}, equivalent={equivalent}")
    return BisimResult(OMEGA, equivalent, witness, stable)


def world_equivalence(left: InqModel, right: InqModel) -> tuple[InfoState, ...]:
    """Rows of the stabilized world relation, i.e. INQML-equivalence of worlds."""
    refinement = Refinement(left, right)
    return refinement.table(refinement.stabilize())


def bulk_equiv(left: InqModel, s: InfoState, right: InqModel, t: InfoState) -> bool:
    """Every w ∈ s has an ≡-partner in t and vice versa."""
    _check_point(left, s)
    _check_point(right, t)
    rows = world_equivalence(left, right)
    if any(rows[w] & t == 0 for w in bits.members(s)):
        return False
    image = 0
    for w in bits.members(s):
        image |= rows[w]
    return bits.is_subset(t, image)


def world_partition(model: InqModel) -> list[list[str]]:
    """Classes of INQML-equivalent worlds of one model, in world order."""
    rows = world_equivalence(model, model)
    seen = 0
    classes = []
    for w in model.worlds:
        if seen >> w & 1:
            continue
        seen |= rows[w]
        classes.append(model.state_names(rows[w]))
    return classes


# ============================================================================
# EHRENFEUCHT–FRAÏSSÉ HARNESS
# ============================================================================

@dataclass
class EFReport:
    level: int
    equivalent: bool
    sampled: int = 0
    skipped: int = 0
    disagreements: list[str] = field(default_factory=list)
    witness: tuple[Move, ...] | None = None

    @property
    def sound(self) -> bool:
        """Equivalent pairs must agree on every sampled formula."""
        return not self.equivalent or not self.disagreements

    def as_dict(self) -> dict[str, object]:
        return {
            "level": self.level,
            "equivalent": self.equivalent,
            "sampled": self.sampled,
            "skipped": self.skipped,
            "disagreements": list(self.disagreements),
            "witness": None if self.witness is None else [m.as_dict() for m in self.witness],
        }


def ef_check(
    left: InqModel,
    s: InfoState,
    right: InqModel,
    t: InfoState,
    n: int,
    sampler: Iterable[Formula],
) -> EFReport:
    """Compare ~_n with support agreement on formulas of modal depth ≤ n."""
    verdict = n_bisim(left, s, right, t, n)
    report = EFReport(n, verdict.equivalent, witness=verdict.witness)
    left_checker, right_checker = SupportChecker(left), SupportChecker(right)
    for phi in sampler:
        if modal_depth(phi) > n:
            report.skipped += 1
            continue
        report.sampled += 1
        if left_checker.supports(s, phi) != right_checker.supports(t, phi):
            report.disagreements.append(to_text(phi))
    if report.skipped:
        log.warning(f"EF sampler produced {report.skipped} formulas deeper than {n}; ignored")
    if not report.sound:
        log.error(f"EF disagreement on an equivalent pair: {report.disagreements[:3]}")
    return report

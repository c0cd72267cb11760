"""Two-sorted relational (pseudo-)models (W, S, ε, E, P).

ε is implicit: S is a list of bitsets and x ε λ is bit membership. Extensional
duplicates are removed by `RelStruct.build`; a struct constructed directly (for
instance from a JSON document) may still carry them, which `validate_relational`
reports as a violation of extensionality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

from inqml.config import get_settings
from inqml.core import bits
from inqml.core.bits import InfoState
from inqml.core.errors import CapExceededError, ModelError
from inqml.core.model import InqModel, Level, check_cap, inquisitive_closure

log = logging.getLogger("relational")


class Policy(str, Enum):
    MINIMAL = "minimal"
    SUBSETS = "subsets"
    FULL = "full"


class RelLevel(str, Enum):
    MODEL = "model"
    PSEUDO = "pseudo"
    INVALID = "invalid"


@dataclass(frozen=True)
class RelVerdict:
    level: RelLevel
    condition: str | None = None
    witness: dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.level is not RelLevel.INVALID


LEVEL_FOR_KIND = {Level.PROPER: RelLevel.MODEL, Level.PSEUDO: RelLevel.PSEUDO, Level.INVALID: RelLevel.INVALID}


@dataclass(frozen=True)
class RelStruct:
    world_names: tuple[str, ...]
    states: tuple[InfoState, ...]
    E: tuple[frozenset[int], ...]
    props: tuple[str, ...]
    valuation: tuple[InfoState, ...]
    point: int | None = None

    def __post_init__(self) -> None:
        n = len(self.world_names)
        if n == 0:
            raise ModelError("a relational structure needs at least one world")
        if len(self.E) != n:
            raise ModelError(f"E lists {len(self.E)} worlds, expected {n}")
        limit = 1 << n
        for state in self.states:
            if not 0 <= state < limit:
                raise ModelError(f"state {state:#b} is wider than |W| = {n}")
        for w, indices in enumerate(self.E):
            for index in indices:
                if not 0 <= index < len(self.states):
                    raise ModelError(f"E[{self.world_names[w]}] refers to missing state #{index}")
        if self.point is not None and not 0 <= self.point < len(self.states):
            raise ModelError(f"distinguished state #{self.point} is not in S")
        if len(self.props) != len(self.valuation):
            raise ModelError("props and valuation have different lengths")

    @classmethod
    def build(
        cls,
        world_names: tuple[str, ...],
        states: set[InfoState] | list[InfoState],
        assignment: tuple[tuple[InfoState, ...], ...],
        props: tuple[str, ...],
        valuation: tuple[InfoState, ...],
        point: InfoState | None = None,
    ) -> RelStruct:
        """Deduplicate and sort S, then express Σ(w) as index sets E[w]."""
        limit = get_settings().effective_state_limit
        ordered = tuple(sorted(set(states)))
        if len(ordered) > limit:
            raise CapExceededError(f"|S| = {len(ordered)} exceeds the state limit {limit}")
        index = {state: i for i, state in enumerate(ordered)}
        E = tuple(frozenset(index[t] for t in family) for family in assignment)
        return cls(
            tuple(world_names),
            ordered,
            E,
            tuple(props),
            tuple(valuation),
            None if point is None else index[point],
        )

    @property
    def n_worlds(self) -> int:
        return len(self.world_names)

    @property
    def point_state(self) -> InfoState | None:
        return None if self.point is None else self.states[self.point]

    def index_of(self, state: InfoState) -> int | None:
        try:
            return self.states.index(state)
        except ValueError:
            return None

    def successors(self, w: int) -> tuple[InfoState, ...]:
        return tuple(self.states[i] for i in sorted(self.E[w]))


# ============================================================================
# VALIDATION
# ============================================================================

def validate_relational(rel: RelStruct) -> RelVerdict:
    """model iff Def (i)+(ii)+(iii); pseudo iff (i)+(ii); invalid otherwise."""
    seen: dict[InfoState, int] = {}
    for i, state in enumerate(rel.states):
        if state in seen:
            return RelVerdict(
                RelLevel.INVALID,
                "extensionality",
                {"s": seen[state], "t": i, "extension": [rel.world_names[w] for w in bits.members(state)]},
            )
        seen[state] = i

    for w, indices in enumerate(rel.E):
        if not indices:
            return RelVerdict(RelLevel.INVALID, "non-emptiness", {"w": rel.world_names[w]})

    for w, indices in enumerate(rel.E):
        present = {rel.states[i] for i in indices}
        for i in sorted(indices):
            # largest missing subset first, so witnesses are as informative as possible
            for a in sorted(bits.subsets(rel.states[i]), key=lambda t: (-bits.size(t), t)):
                if a not in present:
                    return RelVerdict(
                        RelLevel.PSEUDO,
                        "downward-closure",
                        {
                            "w": rel.world_names[w],
                            "s": i,
                            "a": [rel.world_names[v] for v in bits.members(a)],
                        },
                    )
    return RelVerdict(RelLevel.MODEL)


# ============================================================================
# ENCODING / DECODING
# ============================================================================

def encode(model: InqModel, state: InfoState, policy: Policy = Policy.MINIMAL) -> RelStruct:
    """Relational representation of (M, s) whose second sort follows `policy`.

    minimal: {s} ∪ ⋃Σ(w);  subsets: additionally every subset of s;  full: P(W).
    """
    if not 0 <= state < 1 << model.n_worlds:
        raise ModelError("point is wider than the model")
    universe: set[InfoState] = {state}
    for family in model.sigma:
        universe.update(family)
    if policy is Policy.SUBSETS:
        universe.update(bits.subsets(state))
    elif policy is Policy.FULL:
        check_cap(model.n_worlds)
        universe = set(range(1 << model.n_worlds))
    rel = RelStruct.build(model.world_names, universe, model.sigma, model.props, model.valuation, state)
    log.debug(f"Encoded {model.n_worlds} worlds under {policy.value}: |S| = {len(rel.states)}")
    return rel


def decode(rel: RelStruct) -> tuple[InqModel, InfoState | None]:
    """M(Mod): Σ(w) = { s̲ : s ∈ E[w] }. States outside every E[w] are dropped."""
    sigma = tuple(tuple(sorted(rel.states[i] for i in indices)) for indices in rel.E)
    model = InqModel(rel.world_names, sigma, rel.props, rel.valuation)
    return model, rel.point_state


def decode_model(rel: RelStruct) -> InqModel:
    return decode(rel)[0]


def state_closure(rel: RelStruct) -> RelStruct:
    """(Mod, s)↓: encode M(Mod)↓ and represent every subset of the point."""
    if rel.point is None:
        raise ModelError("state closure needs a distinguished state")
    model, point = decode(rel)
    closed = inquisitive_closure(model)
    universe: set[InfoState] = set(bits.subsets(point))
    for family in closed.sigma:
        universe.update(family)
    return RelStruct.build(closed.world_names, universe, closed.sigma, closed.props, closed.valuation, point)


def represented_subsets(rel: RelStruct, state: InfoState) -> list[int]:
    """Indices of all members of S that are subsets of `state`."""
    return [i for i, t in enumerate(rel.states) if bits.is_subset(t, state)]

"""Finite inquisitive models and pseudo-models.

Worlds are dense indices 0..n-1 with a name table; information states are
bitsets over them (see `inqml.core.bits`). Σ(w) is stored duplicate-free and
sorted by numeric bitset value, so structural equality is model equality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from inqml.config import get_settings
from inqml.core import bits, mutations
from inqml.core.bits import InfoState
from inqml.core.errors import CapExceededError, ModelError
from inqml.core.formula import Signature

log = logging.getLogger("inq_model")

DEFAULT_PROP_NAMES = ("p", "q", "r", "s", "t", "u")


class Level(str, Enum):
    PROPER = "proper"
    PSEUDO = "pseudo"
    INVALID = "invalid"


@dataclass(frozen=True)
class Verdict:
    level: Level
    world: int | None = None
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.level is not Level.INVALID

    def describe(self, model: InqModel | None = None) -> str:
        if self.level is not Level.INVALID:
            return self.level.value
        where = ""
        if self.world is not None:
            where = model.world_names[self.world] if model is not None else f"world {self.world}"
        return f"invalid({where}, {self.reason})"


def check_cap(n_worlds: int) -> None:
    cap = get_settings().cap
    if n_worlds > cap:
        raise CapExceededError(f"|W| = {n_worlds} exceeds the configured cap of {cap} (INQML_CAP)")


@dataclass(frozen=True)
class InqModel:
    world_names: tuple[str, ...]
    sigma: tuple[tuple[InfoState, ...], ...]
    props: tuple[str, ...]
    valuation: tuple[InfoState, ...]

    def __post_init__(self) -> None:
        n = len(self.world_names)
        if n == 0:
            raise ModelError("a model needs at least one world")
        if len(set(self.world_names)) != n:
            raise ModelError(f"duplicate world names in {list(self.world_names)}")
        if len(self.sigma) != n:
            raise ModelError(f"sigma lists {len(self.sigma)} worlds, expected {n}")
        if len(self.valuation) != len(self.props):
            raise ModelError("valuation and props have different lengths")
        Signature(self.props)
        limit = 1 << n
        for w, states in enumerate(self.sigma):
            for state in states:
                if not 0 <= state < limit:
                    raise ModelError(f"state {state:#b} of {self.world_names[w]} is wider than |W| = {n}")
        for name, extension in zip(self.props, self.valuation):
            if not 0 <= extension < limit:
                raise ModelError(f"V({name}) is wider than |W| = {n}")

    @classmethod
    def build(
        cls,
        world_names: list[str] | tuple[str, ...],
        sigma: list[list[InfoState]] | tuple[tuple[InfoState, ...], ...],
        valuation: dict[str, InfoState],
    ) -> InqModel:
        """Canonicalize (dedupe + sort each Σ(w)) and construct."""
        canonical = tuple(tuple(sorted(set(states))) for states in sigma)
        props = tuple(valuation)
        return cls(tuple(world_names), canonical, props, tuple(valuation[p] for p in props))

    @property
    def n_worlds(self) -> int:
        return len(self.world_names)

    @property
    def signature(self) -> Signature:
        return Signature(self.props)

    @property
    def worlds(self) -> range:
        return range(self.n_worlds)

    @cached_property
    def kind(self) -> Level:
        return validate(self).level

    def extension(self, prop: str) -> InfoState:
        try:
            return self.valuation[self.props.index(prop)]
        except ValueError:
            raise ModelError(f"proposition '{prop}' is not interpreted by this model") from None

    def world_index(self, name: str) -> int:
        try:
            return self.world_names.index(name)
        except ValueError:
            raise ModelError(f"unknown world '{name}'") from None

    def state_of(self, names: list[str] | tuple[str, ...]) -> InfoState:
        return bits.mask_of(self.world_index(name) for name in names)

    def state_names(self, state: InfoState) -> list[str]:
        return [self.world_names[i] for i in bits.members(state)]

    def format_state(self, state: InfoState) -> str:
        return "{" + ", ".join(self.state_names(state)) + "}"

    def atomic_type(self, w: int) -> tuple[bool, ...]:
        """Truth values of the props at w, in sorted prop-name order."""
        return tuple(bool(self.extension(p) >> w & 1) for p in sorted(self.props))


# ============================================================================
# OPERATIONS
# ============================================================================

def is_downward_closed(states: tuple[InfoState, ...]) -> bool:
    present = set(states)
    return all(t in present for s in states for t in bits.subsets(s))


def validate(model: InqModel) -> Verdict:
    """proper iff every Σ(w) is non-empty and downward closed; pseudo iff non-empty."""
    for w, states in enumerate(model.sigma):
        if not states:
            return Verdict(Level.INVALID, w, "empty-assignment")
    for states in model.sigma:
        if not is_downward_closed(states):
            return Verdict(Level.PSEUDO)
    return Verdict(Level.PROPER)


def _down_closure(states: tuple[InfoState, ...]) -> tuple[InfoState, ...]:
    closed: set[InfoState] = set()
    for s in states:
        closed.update(bits.subsets(s))
    if mutations.is_active(mutations.Mutation.CLOSURE_DROPS_EMPTY):
        closed.discard(bits.EMPTY)
    return tuple(sorted(closed))


def inquisitive_closure(model: InqModel) -> InqModel:
    """M↓: close every Σ(w) under subsets. Idempotent; Σ↓(w) ⊇ Σ(w)."""
    check_cap(model.n_worlds)
    sigma = tuple(_down_closure(states) for states in model.sigma)
    if sigma == model.sigma:
        return model
    return InqModel(model.world_names, sigma, model.props, model.valuation)


def kripke_sigma(model: InqModel, w: int) -> InfoState:
    """σ(w) = ⋃Σ(w), the associated Kripke successor set."""
    if not 0 <= w < model.n_worlds:
        raise ModelError(f"world index {w} out of range")
    union = 0
    for state in model.sigma[w]:
        union |= state
    return union


def kripke_successors(model: InqModel) -> tuple[InfoState, ...]:
    return tuple(kripke_sigma(model, w) for w in model.worlds)


def prop_names(n_props: int) -> tuple[str, ...]:
    if n_props <= len(DEFAULT_PROP_NAMES):
        return DEFAULT_PROP_NAMES[:n_props]
    return DEFAULT_PROP_NAMES + tuple(f"p{i}" for i in range(len(DEFAULT_PROP_NAMES), n_props))


def world_names(n_worlds: int) -> tuple[str, ...]:
    return tuple(f"w{i}" for i in range(n_worlds))


def random_pseudo_model(
    seed: int | np.random.Generator,
    n_worlds: int,
    n_props: int,
    max_states_per_world: int,
    proper_probability: float = 0.0,
) -> InqModel:
    """Deterministic random pseudo-model; with `proper_probability` it is post-closed."""
    if n_worlds < 1 or max_states_per_world < 1:
        raise ModelError("need n_worlds >= 1 and max_states_per_world >= 1")
    check_cap(n_worlds)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    limit = 1 << n_worlds
    sigma = []
    for _ in range(n_worlds):
        k = int(rng.integers(1, max_states_per_world + 1))
        sigma.append([int(x) for x in rng.integers(0, limit, size=k)])
    names = prop_names(n_props)
    valuation = {name: int(rng.integers(0, limit)) for name in names}
    model = InqModel.build(world_names(n_worlds), sigma, valuation)
    if proper_probability > 0 and rng.random() < proper_probability:
        model = inquisitive_closure(model)
    return model


@dataclass(frozen=True)
class PointedModel:
    """A model with a distinguished state; world points are stored as singletons."""

    model: InqModel
    state: InfoState

    def __post_init__(self) -> None:
        if not 0 <= self.state < 1 << self.model.n_worlds:
            raise ModelError("point is wider than the model")

    @classmethod
    def at_world(cls, model: InqModel, w: int) -> PointedModel:
        return cls(model, 1 << w)

    @property
    def is_world_pointed(self) -> bool:
        return bits.size(self.state) == 1

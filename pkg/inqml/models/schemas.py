from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from inqml.core import bits
from inqml.core.bits import InfoState
from inqml.core.model import InqModel
from inqml.core.mutations import Mutation
from inqml.core.relational import Policy, RelStruct

CheckName = Literal["fragment", "graded", "persistency", "closure", "ef", "rewrite", "roundtrip"]
ALL_CHECKS: tuple[str, ...] = ("fragment", "graded", "persistency", "closure", "ef", "rewrite", "roundtrip")


def _mask(names: list[str], index: dict[str, int], what: str) -> InfoState:
    missing = [n for n in names if n not in index]
    if missing:
        raise ValueError(f"{what} mentions unknown worlds {missing}")
    return bits.mask_of(index[n] for n in names)


def _names(model_worlds: tuple[str, ...], state: InfoState) -> list[str]:
    return [model_worlds[i] for i in bits.members(state)]


# ============================================================================
# MODEL FILES
# ============================================================================

class ModelDocument(BaseModel):
    """`{"worlds": [...], "valuation": {p: [...]}, "sigma": {w: [[...], ...]}}` plus an optional point."""

    worlds: list[str]
    valuation: dict[str, list[str]] = Field(default_factory=dict)
    sigma: dict[str, list[list[str]]] = Field(default_factory=dict)
    state: Optional[list[str]] = None
    world: Optional[str] = None

    @model_validator(mode="after")
    def _references(self) -> ModelDocument:
        if not self.worlds:
            raise ValueError("a model needs at least one world")
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("world names must be unique")
        known = set(self.worlds)
        for w, states in self.sigma.items():
            if w not in known:
                raise ValueError(f"sigma assigns states to unknown world '{w}'")
            for state in states:
                if not set(state) <= known:
                    raise ValueError(f"sigma[{w}] mentions unknown worlds {sorted(set(state) - known)}")
        for p, extension in self.valuation.items():
            if not set(extension) <= known:
                raise ValueError(f"valuation[{p}] mentions unknown worlds {sorted(set(extension) - known)}")
        if self.state is not None and self.world is not None:
            raise ValueError("give either 'state' or 'world', not both")
        if self.world is not None and self.world not in known:
            raise ValueError(f"point world '{self.world}' is not a world")
        if self.state is not None and not set(self.state) <= known:
            raise ValueError(f"point state mentions unknown worlds {sorted(set(self.state) - known)}")
        return self

    def to_model(self) -> InqModel:
        """Worlds without a sigma entry get Σ(w) = ∅, which validates as invalid."""
        index = {w: i for i, w in enumerate(self.worlds)}
        sigma = [[_mask(s, index, "sigma") for s in self.sigma.get(w, [])] for w in self.worlds]
        valuation = {p: _mask(ext, index, "valuation") for p, ext in self.valuation.items()}
        return InqModel.build(self.worlds, sigma, valuation)

    def point(self) -> Optional[InfoState]:
        index = {w: i for i, w in enumerate(self.worlds)}
        if self.world is not None:
            return 1 << index[self.world]
        if self.state is not None:
            return _mask(self.state, index, "state")
        return None

    @classmethod
    def from_model(cls, model: InqModel, state: Optional[InfoState] = None) -> ModelDocument:
        return cls(
            worlds=list(model.world_names),
            valuation={p: _names(model.world_names, ext) for p, ext in zip(model.props, model.valuation)},
            sigma={
                model.world_names[w]: [_names(model.world_names, s) for s in family]
                for w, family in enumerate(model.sigma)
            },
            state=None if state is None else _names(model.world_names, state),
        )


class RelationalDocument(BaseModel):
    """`{"worlds": [...], "states": [[...]], "E": {w: [i, ...]}, "props": {p: [...]}, "point": i}`"""

    worlds: list[str]
    states: list[list[str]]
    E: dict[str, list[int]] = Field(default_factory=dict)
    props: dict[str, list[str]] = Field(default_factory=dict)
    point: Optional[int] = None

    @model_validator(mode="after")
    def _references(self) -> RelationalDocument:
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("world names must be unique")
        known = set(self.worlds)
        for i, state in enumerate(self.states):
            if not set(state) <= known:
                raise ValueError(f"states[{i}] mentions unknown worlds {sorted(set(state) - known)}")
        for w, indices in self.E.items():
            if w not in known:
                raise ValueError(f"E lists unknown world '{w}'")
            bad = [i for i in indices if not 0 <= i < len(self.states)]
            if bad:
                raise ValueError(f"E[{w}] refers to missing states {bad}")
        if self.point is not None and not 0 <= self.point < len(self.states):
            raise ValueError(f"point {self.point} is not a state index")
        return self

    def to_struct(self) -> RelStruct:
        """Kept verbatim: duplicate extensions survive so validation can report them."""
        index = {w: i for i, w in enumerate(self.worlds)}
        props = tuple(self.props)
        return RelStruct(
            tuple(self.worlds),
            tuple(_mask(s, index, "states") for s in self.states),
            tuple(frozenset(self.E.get(w, [])) for w in self.worlds),
            props,
            tuple(_mask(self.props[p], index, "props") for p in props),
            self.point,
        )

    @classmethod
    def from_struct(cls, rel: RelStruct) -> RelationalDocument:
        return cls(
            worlds=list(rel.world_names),
            states=[_names(rel.world_names, s) for s in rel.states],
            E={rel.world_names[w]: sorted(indices) for w, indices in enumerate(rel.E)},
            props={p: _names(rel.world_names, ext) for p, ext in zip(rel.props, rel.valuation)},
            point=rel.point,
        )


# ============================================================================
# FUZZING
# ============================================================================

class FuzzConfig(BaseModel):
    seed: int = Field(default=0, ge=0)
    trials: int = Field(default=1000, ge=1)
    max_worlds: int = Field(default=5, ge=1, le=8)
    n_props: int = Field(default=3, ge=1, le=6)
    max_formula_depth: int = Field(default=3, ge=0, le=6)
    # Bounds the FO tuple length, hence the cost of evaluating translations
    max_flatness: int = Field(default=3, ge=0, le=5)
    max_states_per_world: int = Field(default=3, ge=1)
    proper_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    policies: list[Policy] = Field(default_factory=lambda: list(Policy))
    checks: list[CheckName] = Field(default_factory=lambda: ["fragment", "graded", "persistency", "closure"])
    ef_samples: int = Field(default=500, ge=1)
    ef_max_level: int = Field(default=3, ge=0, le=4)
    ef_max_worlds: int = Field(default=3, ge=1, le=5)
    mutation: Optional[Mutation] = None
    jobs: int = Field(default=1, ge=1)
    shrink: bool = True
    # failures per check that get shrunk into bundles; the rest are only counted
    max_bundles: int = Field(default=5, ge=0)

    @model_validator(mode="after")
    def _non_empty(self) -> FuzzConfig:
        if not self.policies:
            raise ValueError("at least one encoding policy is required")
        if not self.checks:
            raise ValueError("at least one check is required")
        return self


class LiteralDocument(BaseModel):
    formula: str
    positive: bool = True


class CounterexampleBundle(BaseModel):
    """Everything needed to replay one failing trial."""

    check: CheckName
    seed: int
    trial: int
    mutation: Optional[Mutation] = None
    model: ModelDocument
    state: list[str]
    formula: Optional[str] = None
    extra_formula: Optional[str] = None
    policy: Optional[Policy] = None
    other_model: Optional[ModelDocument] = None
    other_state: Optional[list[str]] = None
    level: Optional[int] = None
    cnf: Optional[list[list[LiteralDocument]]] = None
    verdicts: dict[str, object] = Field(default_factory=dict)
    shrink_steps: int = 0


class CheckSummary(BaseModel):
    trials: int = 0
    failures: int = 0
    notes: dict[str, int] = Field(default_factory=dict)


class FuzzReport(BaseModel):
    config: FuzzConfig
    checks: dict[str, CheckSummary]
    bundles: list[CounterexampleBundle] = Field(default_factory=list)

    @property
    def trials(self) -> int:
        return sum(summary.trials for summary in self.checks.values())

    @property
    def failures(self) -> int:
        return sum(summary.failures for summary in self.checks.values())

    def headline(self) -> str:
        return f"{self.failures} failures / {self.trials} trials"

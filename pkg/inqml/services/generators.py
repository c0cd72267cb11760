"""Seeded random formulas, states, models, model pairs and CNF inputs.

Every generator takes a numpy Generator; callers derive one per trial so runs
are reproducible and independent of trial order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from inqml.core import bits
from inqml.core.bits import InfoState
from inqml.core.formula import BOT, And, Atom, Box, BoxPlus, Formula, Implies, InqDisj, flatness_grade, top
from inqml.core.model import InqModel, random_pseudo_model, world_names
from inqml.core.translate import Clause, Literal

log = logging.getLogger("generators")

PAIR_KINDS = ("iso", "double", "perturb", "random")


def _pick(rng: np.random.Generator, options):
    return options[int(rng.integers(len(options)))]


# ============================================================================
# FORMULAS
# ============================================================================

def random_formula(
    rng: np.random.Generator,
    props: tuple[str, ...],
    depth: int,
    *,
    max_flatness: int | None = None,
    max_modal: int | None = None,
) -> Formula:
    """Random core formula with depth ≤ `depth`.

    An inquisitive disjunction that would push the flatness grade over
    `max_flatness` is built as a conjunction instead.
    """
    if not props:
        raise ValueError("need at least one proposition")

    def leaf() -> Formula:
        return BOT if rng.random() < 0.1 else Atom(_pick(rng, props))

    def gen(d: int, modal_left: int) -> Formula:
        if d == 0 or rng.random() < 0.2:
            return leaf()
        kinds = ["and", "implies", "inq_disj", "neg"]
        if modal_left > 0:
            kinds += ["box", "box_plus"]
        kind = _pick(rng, kinds)
        if kind == "box":
            return Box(gen(d - 1, modal_left - 1))
        if kind == "box_plus":
            return BoxPlus(gen(d - 1, modal_left - 1))
        if kind == "neg":
            return Implies(gen(d - 1, modal_left), BOT)
        left, right = gen(d - 1, modal_left), gen(d - 1, modal_left)
        if kind == "and":
            return And(left, right)
        if kind == "implies":
            return Implies(left, right)
        if max_flatness is not None and flatness_grade(left) + flatness_grade(right) + 1 > max_flatness:
            return And(left, right)
        return InqDisj(left, right)

    return gen(depth, depth if max_modal is None else max_modal)


def random_inquisitive_implication(
    rng: np.random.Generator,
    props: tuple[str, ...],
    depth: int,
    *,
    max_modal: int | None = None,
) -> Formula:
    """ψ → (χ ⩒ χ') with flat ψ, χ, χ', so the whole formula has grade exactly 1.

    The consequent is ?χ most of the time. At a state where χ varies, such a
    formula holds at every singleton and fails at the state itself.
    """
    body = max(depth - 2, 0)

    def flat(d: int) -> Formula:
        return random_formula(rng, props, d, max_flatness=0, max_modal=max_modal)

    antecedent = top() if rng.random() < 0.5 else flat(body)
    if rng.random() < 0.7:
        chi = flat(max(depth - 3, 0))
        consequent = InqDisj(chi, Implies(chi, BOT))
    else:
        consequent = InqDisj(flat(body), flat(body))
    return Implies(antecedent, consequent)


def random_state(rng: np.random.Generator, n_worlds: int, *, nonempty: bool = False, min_size: int = 0) -> InfoState:
    """Uniform over the states of at least `min_size` worlds (capped at n_worlds)."""
    low = 1 if nonempty else 0
    min_size = min(min_size, n_worlds)
    while True:
        state = int(rng.integers(low, 1 << n_worlds))
        if bits.size(state) >= min_size:
            return state


def random_model(
    rng: np.random.Generator,
    max_worlds: int,
    n_props: int,
    max_states_per_world: int = 3,
    proper_probability: float = 0.5,
) -> InqModel:
    n_worlds = int(rng.integers(1, max_worlds + 1))
    return random_pseudo_model(rng, n_worlds, n_props, max_states_per_world, proper_probability)


# ============================================================================
# MODEL PAIRS
# ============================================================================

def relabel(model: InqModel, mapping: list[int]) -> InqModel:
    """Move world i to position mapping[i]; names travel with their worlds."""
    n = model.n_worlds
    names = [""] * n
    sigma: list[tuple[InfoState, ...]] = [()] * n
    for w in model.worlds:
        names[mapping[w]] = model.world_names[w]
        sigma[mapping[w]] = tuple(bits.permute(s, mapping) for s in model.sigma[w])
    valuation = {p: bits.permute(ext, mapping) for p, ext in zip(model.props, model.valuation)}
    return InqModel.build(names, sigma, valuation)


def disjoint_union(left: InqModel, right: InqModel) -> InqModel:
    """Worlds of `right` come after those of `left`; names are regenerated."""
    if sorted(left.props) != sorted(right.props):
        raise ValueError("disjoint union needs a common signature")
    shift = left.n_worlds
    sigma = [list(family) for family in left.sigma]
    sigma += [[s << shift for s in family] for family in right.sigma]
    valuation = {p: left.extension(p) | right.extension(p) << shift for p in left.props}
    return InqModel.build(world_names(left.n_worlds + right.n_worlds), sigma, valuation)


def perturb(rng: np.random.Generator, model: InqModel) -> InqModel:
    """Flip one valuation bit, or one world inside one state of some Σ(w)."""
    w = int(rng.integers(model.n_worlds))
    valuation = dict(zip(model.props, model.valuation))
    sigma = [list(family) for family in model.sigma]
    if rng.random() < 0.5:
        p = _pick(rng, model.props)
        valuation[p] ^= 1 << w
    else:
        owner = int(rng.integers(model.n_worlds))
        family = sigma[owner]
        i = int(rng.integers(len(family)))
        family[i] ^= 1 << w
    return InqModel.build(model.world_names, sigma, valuation)


@dataclass(frozen=True)
class ModelPair:
    kind: str
    left: InqModel
    left_state: InfoState
    right: InqModel
    right_state: InfoState


def random_pair(
    rng: np.random.Generator,
    max_worlds: int,
    n_props: int,
    max_states_per_world: int = 3,
    kind: str | None = None,
) -> ModelPair:
    """Pairs over one signature: relabelings, doubled copies, one-bit perturbations, independent models."""
    kind = kind or _pick(rng, PAIR_KINDS)
    left = random_model(rng, max_worlds, n_props, max_states_per_world, proper_probability=0.5)
    s = random_state(rng, left.n_worlds)
    if kind == "iso":
        mapping = [int(i) for i in rng.permutation(left.n_worlds)]
        return ModelPair(kind, left, s, relabel(left, mapping), bits.permute(s, mapping))
    if kind == "double":
        union = disjoint_union(left, left)
        return ModelPair(kind, union, s, union, s << left.n_worlds)
    if kind == "perturb":
        return ModelPair(kind, left, s, perturb(rng, left), s)
    if kind == "random":
        right = random_model(rng, max_worlds, n_props, max_states_per_world, proper_probability=0.5)
        return ModelPair(kind, left, s, right, random_state(rng, right.n_worlds))
    raise ValueError(f"unknown pair kind '{kind}'")


# ============================================================================
# CNF INPUTS
# ============================================================================

def random_cnf(
    rng: np.random.Generator,
    props: tuple[str, ...],
    *,
    n_base: int = 3,
    max_clauses: int = 3,
    max_literals: int = 3,
    depth: int = 2,
) -> tuple[Clause, ...]:
    """Clauses over at most `n_base` random base formulas of flatness ≤ 1.

    At most two literals per clause are positive, so the rewritten
    consequent keeps a small flatness grade.
    """
    base = [
        random_formula(rng, props, depth, max_flatness=1, max_modal=1)
        for _ in range(int(rng.integers(1, n_base + 1)))
    ]
    clauses = []
    for _ in range(int(rng.integers(1, max_clauses + 1))):
        literals = []
        positives = 0
        for _ in range(int(rng.integers(1, max_literals + 1))):
            positive = bool(rng.random() < 0.5) and positives < 2
            positives += positive
            literals.append(Literal(_pick(rng, base), positive))
        clauses.append(tuple(literals))
    return tuple(clauses)

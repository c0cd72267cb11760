"""Hypothesis strategies for formulas and (pseudo-)models."""

from __future__ import annotations

from hypothesis import strategies as st

from inqml.core.formula import BOT, And, Atom, Box, BoxPlus, Implies, InqDisj
from inqml.core.model import InqModel, world_names

PROPS = ("p", "q")


def formulas(props: tuple[str, ...] = PROPS, max_leaves: int = 6):
    leaves = st.sampled_from([Atom(p) for p in props] + [BOT])
    return st.recursive(
        leaves,
        lambda kids: st.one_of(
            st.builds(And, kids, kids),
            st.builds(Implies, kids, kids),
            st.builds(InqDisj, kids, kids),
            st.builds(Box, kids),
            st.builds(BoxPlus, kids),
        ),
        max_leaves=max_leaves,
    )


@st.composite
def models(draw, max_worlds: int = 3, props: tuple[str, ...] = PROPS) -> InqModel:
    """Random pseudo-models; every Σ(w) is non-empty, so none is invalid."""
    n = draw(st.integers(min_value=1, max_value=max_worlds))
    limit = 1 << n
    sigma = [draw(st.lists(st.integers(0, limit - 1), min_size=1, max_size=3)) for _ in range(n)]
    valuation = {p: draw(st.integers(0, limit - 1)) for p in props}
    return InqModel.build(world_names(n), sigma, valuation)


@st.composite
def pointed_models(draw, max_worlds: int = 3, props: tuple[str, ...] = PROPS) -> tuple[InqModel, int]:
    model = draw(models(max_worlds, props))
    state = draw(st.integers(0, (1 << model.n_worlds) - 1))
    return model, state

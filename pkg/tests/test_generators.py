import numpy as np
import pytest

from inqml.core import bits
from inqml.core.bisim import full_bisim
from inqml.core.formula import Implies, InqDisj, depth, flatness_grade, modal_depth
from inqml.core.model import InqModel, Level
from inqml.core.mutations import Mutation, injected
from inqml.core.translate import Literal
from inqml.services.generators import (
    PAIR_KINDS,
    disjoint_union,
    perturb,
    random_cnf,
    random_formula,
    random_inquisitive_implication,
    random_model,
    random_pair,
    random_state,
    relabel,
)

PROPS = ("p", "q", "r")


def test_formulas_respect_bounds():
    rng = np.random.default_rng(3)
    for _ in range(200):
        phi = random_formula(rng, PROPS, 4, max_flatness=2, max_modal=1)
        assert flatness_grade(phi) <= 2
        assert modal_depth(phi) <= 1


def test_inquisitive_implications_have_grade_one():
    rng = np.random.default_rng(8)
    for _ in range(100):
        phi = random_inquisitive_implication(rng, PROPS, 3)
        assert isinstance(phi, Implies)
        assert isinstance(phi.right, InqDisj)
        assert flatness_grade(phi.left) == 0
        assert flatness_grade(phi) == 1
        assert depth(phi) <= 3
        with injected(Mutation.FLAT_IMPLIES):
            assert flatness_grade(phi) == 0
        with injected(Mutation.FLAT_DISJ_NO_PLUS_ONE):
            assert flatness_grade(phi) == 0


def test_states_respect_min_size():
    rng = np.random.default_rng(0)
    assert all(bits.size(random_state(rng, 3, min_size=2)) >= 2 for _ in range(50))
    assert random_state(rng, 1, min_size=2) == 1


def test_formulas_are_reproducible():
    first = [random_formula(np.random.default_rng(11), PROPS, 3) for _ in range(5)]
    second = [random_formula(np.random.default_rng(11), PROPS, 3) for _ in range(5)]
    assert first == second


def test_formula_needs_props():
    with pytest.raises(ValueError):
        random_formula(np.random.default_rng(0), (), 2)


def test_random_state_bounds():
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert 1 <= random_state(rng, 3, nonempty=True) < 8


def test_random_models_are_never_invalid():
    rng = np.random.default_rng(5)
    for _ in range(50):
        model = random_model(rng, 4, 2)
        assert 1 <= model.n_worlds <= 4
        assert model.kind is not Level.INVALID


def test_relabel_and_union(m0):
    swapped = relabel(m0, [1, 0])
    assert swapped.world_names == ("w1", "w0")
    assert swapped.extension("p") == 0b10
    union = disjoint_union(m0, m0)
    assert union.n_worlds == 4
    assert union.extension("p") == 0b0101
    assert union.sigma[2] == (0, 0b0100)


def test_union_needs_common_signature(m0):
    with pytest.raises(ValueError):
        disjoint_union(m0, InqModel.build(["a"], [[0]], {"q": 0}))


def test_perturb_changes_one_bit(m0):
    rng = np.random.default_rng(1)
    for _ in range(20):
        changed = perturb(rng, m0)
        flips = sum(bin(a ^ b).count("1") for a, b in zip(m0.valuation, changed.valuation))
        assert changed.world_names == m0.world_names
        assert flips <= 1


@pytest.mark.parametrize("kind", ["iso", "double"])
def test_structural_pairs_are_bisimilar(kind):
    rng = np.random.default_rng(17)
    for _ in range(10):
        pair = random_pair(rng, 3, 2, kind=kind)
        assert pair.kind == kind
        assert full_bisim(pair.left, pair.left_state, pair.right, pair.right_state).equivalent


def test_every_pair_kind_is_drawn():
    rng = np.random.default_rng(2)
    kinds = {random_pair(rng, 3, 2).kind for _ in range(60)}
    assert kinds == set(PAIR_KINDS)


def test_unknown_pair_kind():
    with pytest.raises(ValueError):
        random_pair(np.random.default_rng(0), 3, 2, kind="mirror")


def test_cnf_shape():
    rng = np.random.default_rng(9)
    for _ in range(30):
        cnf = random_cnf(rng, ("p", "q"))
        assert cnf
        for clause in cnf:
            assert clause
            assert all(isinstance(lit, Literal) for lit in clause)
            assert sum(lit.positive for lit in clause) <= 2
            assert all(flatness_grade(lit.formula) <= 1 for lit in clause)

import pytest

from inqml.core import fo
from inqml.core.errors import ModelError, UnboundVariableError
from inqml.core.relational import encode, state_closure
from tests.conftest import BOTH, W0, W1

ALL_P = fo.ForallWorld(("x",), fo.Implies(fo.MemAtom("x", "L"), fo.PropAtom("p", "x")))


def test_universal_guarded_atom(m0):
    rel = encode(m0, W0)
    assert fo.eval_fo(rel, fo.state_assignment(rel), ALL_P)
    rel = encode(m0, BOTH)
    assert not fo.eval_fo(rel, fo.state_assignment(rel), ALL_P)


def test_equality_is_reflexive(m0):
    rel = encode(m0, BOTH)
    for w in range(2):
        assert fo.eval_fo(rel, fo.Assignment(worlds={"x": w}), fo.EqAtom("x", "x"))


def test_state_quantifiers_range_over_represented_states(p0):
    rel = encode(p0, W1)
    # S = {{w1}, {w0,w1}}: no represented state is empty
    some_empty = fo.ExistsState(("m",), fo.Not(fo.ExistsWorld(("y",), fo.MemAtom("y", "m"))))
    assert not fo.eval_fo(rel, fo.Assignment(), some_empty)
    closed = state_closure(rel)
    assert fo.eval_fo(closed, fo.Assignment(), some_empty)


def test_successor_atoms(p0):
    rel = encode(p0, W1)
    # w0 sees a state containing w0
    phi = fo.ExistsState(("m",), fo.And((fo.EAtom("x", "m"), fo.MemAtom("x", "m"))))
    assert fo.eval_fo(rel, fo.Assignment(worlds={"x": 0}), phi)
    assert fo.eval_fo(rel, fo.Assignment(worlds={"x": 1}), phi)
    only_w0 = fo.ExistsState(("m",), fo.And((fo.EAtom("x", "m"), fo.Not(fo.MemAtom("x", "m")))))
    assert not fo.eval_fo(rel, fo.Assignment(worlds={"x": 0}), only_w0)


def test_state_subset_unfolds(m0):
    rel = encode(m0, BOTH)
    lam = rel.states.index(BOTH)
    subs = fo.ForallState(("m",), fo.Implies(fo.StateSubset("m", "L"), fo.ExistsWorld(("z",), fo.Or(()))))
    # every represented state is a subset of {w0, w1} and the body is false
    assert not fo.eval_fo(rel, fo.Assignment(states={"L": lam}), subs)
    assert fo.subset_indices(rel, rel.states.index(W0)) == [rel.states.index(0), rel.states.index(W0)]


def test_truth_constants(m0):
    rel = encode(m0, W0)
    assert fo.eval_fo(rel, fo.Assignment(), fo.TRUE)
    assert not fo.eval_fo(rel, fo.Assignment(), fo.FALSE)


def test_unbound_variable(m0):
    rel = encode(m0, W0)
    with pytest.raises(UnboundVariableError) as exc:
        fo.eval_fo(rel, fo.Assignment(), fo.PropAtom("p", "x"))
    assert exc.value.name == "x"


def test_assignment_is_checked(m0):
    rel = encode(m0, W0)
    with pytest.raises(ModelError):
        fo.eval_fo(rel, fo.Assignment(worlds={"x": 5}), fo.TRUE)
    with pytest.raises(ModelError):
        fo.eval_fo(rel, fo.Assignment(states={"L": 9}), fo.TRUE)
    with pytest.raises(ModelError):
        fo.eval_fo(rel, fo.Assignment(worlds={"v": 0}, states={"v": 0}), fo.TRUE)


def test_shadowed_binding_is_restored(m0):
    rel = encode(m0, BOTH)
    # x is w1 outside; the inner block rebinds x and must hand it back
    inner = fo.ExistsWorld(("x",), fo.PropAtom("p", "x"))
    phi = fo.And((inner, fo.Not(fo.PropAtom("p", "x"))))
    assert fo.eval_fo(rel, fo.Assignment(worlds={"x": 1}), phi)


def test_guard_only_variables_are_existential(m0):
    rel = encode(m0, BOTH)
    # ∀x ∀y (x ∈ L ∧ y = x → P x): y only feeds the guard
    phi = fo.ForallWorld(
        ("x", "y"),
        fo.Implies(fo.And((fo.MemAtom("x", "L"), fo.EqAtom("y", "x"))), fo.PropAtom("p", "x")),
    )
    assert not fo.eval_fo(rel, fo.state_assignment(rel), phi)
    narrow = encode(m0, W0)
    assert fo.eval_fo(narrow, fo.state_assignment(narrow), phi)


def test_free_variables():
    phi = fo.ForallState(("m",), fo.Implies(fo.EAtom("x", "m"), fo.StateSubset("m", "L")))
    assert fo.free_vars_by_sort(phi) == (frozenset({"x"}), frozenset({"L"}))
    assert fo.all_vars(phi) == {"m", "x", "L"}
    assert fo.count_quantified(phi, fo.STATE) == 1
    assert fo.count_quantified(phi, fo.WORLD) == 0


def test_rename_free_respects_binders():
    phi = fo.And((fo.MemAtom("x", "L"), fo.ForallState(("L",), fo.MemAtom("x", "L"))))
    renamed = fo.rename_free(phi, "L", "M")
    assert renamed == fo.And((fo.MemAtom("x", "M"), fo.ForallState(("L",), fo.MemAtom("x", "L"))))


@pytest.mark.parametrize(
    "node, text",
    [
        (ALL_P, "forall x. (x in L -> P(x))"),
        (fo.Not(fo.EqAtom("x", "x")), "~(x = x)"),
        (fo.Not(fo.PropAtom("p", "x")), "~P(x)"),
        (fo.Or((fo.EAtom("x", "m"), fo.And((fo.MemAtom("y", "m"), fo.EqAtom("y", "x"))))), "E(x, m) | (y in m & y = x)"),
        (fo.StateSubset("m", "L"), "m sub L"),
        (fo.ExistsState(("m1", "m2"), fo.TRUE), "exists m1 m2. (true)"),
        (fo.Implies(fo.FALSE, fo.TRUE), "false -> true"),
    ],
)
def test_printer(node, text):
    assert fo.to_text(node) == text

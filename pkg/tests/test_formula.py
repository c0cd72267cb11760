import pytest
from hypothesis import given, settings

from inqml.core.errors import SignatureError
from inqml.core.formula import (
    BOT,
    And,
    Atom,
    Box,
    Implies,
    InqDisj,
    Signature,
    atoms,
    conjoin,
    count_inq_disj,
    depth,
    flatness_grade,
    inq_join,
    modal_depth,
    neg,
    size,
    to_text,
    top,
    whether,
)
from inqml.core.mutations import Mutation, injected
from inqml.core.parser import parse
from tests.strategies import formulas

p, q, r = Atom("p"), Atom("q"), Atom("r")


@pytest.mark.parametrize(
    "text, grade",
    [
        ("p", 0),
        ("bot", 0),
        ("?p", 1),
        ("p vv q vv r", 2),
        ("?p & ?q", 1),
        ("p -> (q vv r)", 1),
        ("(q vv r) -> p", 0),
        ("[] (p vv q)", 0),
        ("[+] ?p", 0),
        ("~(p vv q)", 0),
        ("?p vv ?q", 3),
    ],
)
def test_flatness_grade(text, grade):
    assert flatness_grade(parse(text)) == grade


def test_flat_implies_mutation_reads_antecedent():
    with injected(Mutation.FLAT_IMPLIES):
        assert flatness_grade(parse("(q vv r) -> p")) == 1
        assert flatness_grade(parse("p -> (q vv r)")) == 0
    assert flatness_grade(parse("p -> (q vv r)")) == 1


def test_flat_disj_mutation_drops_increment():
    with injected(Mutation.FLAT_DISJ_NO_PLUS_ONE):
        assert flatness_grade(parse("p vv q vv r")) == 0
    assert flatness_grade(parse("p vv q vv r")) == 2


def test_unknown_mutation_name_is_rejected():
    with pytest.raises(ValueError):
        with injected("no-such-bug"):
            pass


@pytest.mark.parametrize(
    "text, modal, connective",
    [("p", 0, 0), ("[] [+] p", 2, 2), ("<> p", 1, 3), ("[] p & q", 1, 2), ("?p", 0, 2)],
)
def test_depth_measures(text, modal, connective):
    phi = parse(text)
    assert modal_depth(phi) == modal
    assert depth(phi) == connective


def test_size_and_atoms():
    phi = parse("?p & [] q")
    assert size(phi) == 8
    assert atoms(phi) == {"p", "q"}
    assert count_inq_disj(phi) == 1


def test_empty_joins():
    assert conjoin([]) == top() == Implies(BOT, BOT)
    assert inq_join([]) == BOT
    assert conjoin([p, q, r]) == And(And(p, q), r)
    assert inq_join([p, q]) == InqDisj(p, q)


@pytest.mark.parametrize(
    "phi, text",
    [
        (whether(p), "p vv (p -> bot)"),
        (Implies(Implies(p, q), r), "(p -> q) -> r"),
        (Implies(p, Implies(q, r)), "p -> q -> r"),
        (And(p, And(q, r)), "p & (q & r)"),
        (And(InqDisj(p, q), r), "(p vv q) & r"),
        (Box(And(p, q)), "[] (p & q)"),
        (Box(Box(p)), "[] [] p"),
        (neg(Box(neg(p))), "[] (p -> bot) -> bot"),
    ],
)
def test_to_text_parenthesizes_minimally(phi, text):
    assert to_text(phi) == text


@given(formulas(("p", "q", "r"), max_leaves=10))
@settings(max_examples=200, deadline=None)
def test_print_parse_roundtrip(phi):
    assert parse(to_text(phi)) == phi


@pytest.mark.parametrize("names", [("p", "p"), ("vv",), ("bot",), ("1p",), ("",)])
def test_signature_rejects_bad_names(names):
    with pytest.raises(SignatureError):
        Signature(names)


def test_signature_membership():
    sig = Signature.of("p", "q")
    assert "p" in sig
    assert "r" not in sig
    assert len(sig) == 2

import logging

import pytest

from inqml.core import bits
from inqml.core.formula import BOT, And, Atom, Box, Implies, flatness_grade
from inqml.core.model import InqModel, Level
from inqml.core.mutations import Mutation, injected
from inqml.core.parser import parse
from inqml.core.relational import Policy
from inqml.core.translate import Literal
from inqml.models.schemas import ALL_CHECKS, CounterexampleBundle, FuzzConfig
from inqml.services.fuzzing import (
    Case,
    _same_class,
    case_from_bundle,
    case_to_bundle,
    evaluate_case,
    generate_case,
    replay,
    restrict,
    run_fuzz,
    run_trial,
    shrink,
    shrink_candidates,
    trial_rng,
)
from inqml.services.io import dumps, load_bundle
from tests.conftest import BOTH, W0, W1

SMALL = dict(trials=4, max_worlds=3, n_props=2, max_formula_depth=2, max_flatness=2, ef_samples=20, ef_max_level=2)


def _box_model() -> InqModel:
    # w0 -> w1 and w1 -> w1; p holds only at w1
    return InqModel.build(["w0", "w1"], [[0, W1], [0, W1]], {"p": W1})


def seeded_failures(m0):
    """One case per mutation that the named check must reject."""
    return {
        Mutation.FLAT_IMPLIES: Case("graded", m0, BOTH, parse("top -> ?p")),
        Mutation.FLAT_DISJ_NO_PLUS_ONE: Case("graded", m0, BOTH, parse("?p")),
        Mutation.STRICT_IMPLICATION: Case("fragment", m0, W0, parse("~p"), policy=Policy.MINIMAL),
        Mutation.CLOSURE_DROPS_EMPTY: Case("fragment", m0, W0, parse("p"), policy=Policy.MINIMAL),
        Mutation.BOX_GUARD_SWAP: Case("fragment", _box_model(), W1, Box(Atom("p")), policy=Policy.MINIMAL),
    }


@pytest.mark.parametrize("mutation", list(Mutation))
def test_every_mutation_is_caught(m0, mutation):
    case = seeded_failures(m0)[mutation]
    ok, _ = evaluate_case(case)
    assert ok
    with injected(mutation):
        ok, verdicts = evaluate_case(case)
    assert not ok, verdicts


def test_closure_mutation_shows_in_verdicts(m0):
    with injected(Mutation.CLOSURE_DROPS_EMPTY):
        _, verdicts = evaluate_case(Case("fragment", m0, W0, parse("p"), policy=Policy.MINIMAL))
    assert verdicts["closure_level"] == "pseudo"
    assert verdicts["supports"] == verdicts["translation"]


@pytest.mark.parametrize(
    "case",
    [
        Case("persistency", InqModel.build(["a", "b"], [[0b11], [0]], {"p": 0b01}), 0b11, parse("?p"), parse("[] p")),
        Case("closure", InqModel.build(["a", "b"], [[0b11], [0b10]], {"p": 0b01}), 0b01, parse("[+] p")),
        Case("roundtrip", InqModel.build(["a", "b"], [[0b11], [0b10]], {"p": 0b01}), 0b11, parse("p -> [] ?p"), policy=Policy.FULL),
        Case(
            "rewrite",
            InqModel.build(["a", "b"], [[0, 0b01], [0, 0b10]], {"p": 0b01}),
            0b11,
            policy=Policy.SUBSETS,
            cnf=((Literal(Atom("p"), False), Literal(parse("?p"))), (Literal(BOT),)),
        ),
    ],
)
def test_checks_pass_on_fixed_cases(case):
    ok, verdicts = evaluate_case(case)
    assert ok, verdicts


def test_ef_check_case(m0):
    case = Case("ef", m0, W0, other_model=m0, other_state=W1, level=1)
    ok, verdicts = evaluate_case(case)
    assert ok
    assert verdicts["equivalent"] is False


def test_trial_rng_depends_on_every_coordinate():
    draw = lambda *key: int(trial_rng(*key).integers(1 << 30))
    assert draw(1, "fragment", 0) == draw(1, "fragment", 0)
    assert len({draw(1, "fragment", 0), draw(2, "fragment", 0), draw(1, "graded", 0), draw(1, "fragment", 1)}) == 4


@pytest.mark.parametrize("check", ALL_CHECKS)
def test_generated_cases_are_reproducible(check):
    config = FuzzConfig(seed=5, **SMALL)
    first, sample = generate_case(config, check, 3)
    second, _ = generate_case(config, check, 3)
    assert first == second
    assert first.check == check
    assert first.model.kind is not Level.INVALID
    if check == "ef":
        assert len(sample) == config.ef_samples
        assert first.other_model is not None
    if check == "rewrite":
        assert first.state != 0
        assert first.cnf


@pytest.mark.parametrize("check", ALL_CHECKS)
def test_unmutated_trials_pass(check):
    config = FuzzConfig(seed=11, **SMALL)
    for trial in range(config.trials):
        result = run_trial(config, check, trial)
        assert result.ok, result.verdicts


def test_run_fuzz_is_deterministic():
    config = FuzzConfig(seed=2, checks=list(ALL_CHECKS), **SMALL)
    first = run_fuzz(config)
    second = run_fuzz(config)
    assert dumps(first) == dumps(second)
    assert first.failures == 0
    assert first.trials == 4 * len(ALL_CHECKS)
    assert first.headline() == f"0 failures / {first.trials} trials"
    assert first.bundles == []


def test_restrict_keeps_named_worlds(m0):
    sub = restrict(m0, [1])
    assert sub.world_names == ("w1",)
    assert sub.sigma == ((0, 1),)
    assert sub.extension("p") == 0


def test_shrinking_keeps_the_failure_and_the_model_class(m0):
    big = InqModel.build(
        ["w0", "w1", "w2"],
        [[0, 0b001], [0, 0b010], [0, 0b100]],
        {"p": 0b001},
    )
    case = Case("graded", big, 0b111, And(parse("?p"), parse("p -> p")))
    with injected(Mutation.FLAT_DISJ_NO_PLUS_ONE):
        ok, _ = evaluate_case(case)
        assert not ok
        small, steps = shrink(case)
        assert steps > 0
        ok, _ = evaluate_case(small)
        assert not ok
    assert small.model.kind is Level.PROPER
    assert small.model.n_worlds == 2
    assert small.formula == parse("?p")
    assert all(candidate.check == "graded" for candidate in shrink_candidates(small))


def test_bundle_roundtrip_and_replay(m0, tmp_path):
    case = seeded_failures(m0)[Mutation.STRICT_IMPLICATION]
    config = FuzzConfig(seed=4, mutation=Mutation.STRICT_IMPLICATION, **SMALL)
    with injected(config.mutation):
        _, verdicts = evaluate_case(case)
    bundle = case_to_bundle(case, config, 7, verdicts, 0)
    path = tmp_path / "bundle.json"
    path.write_bytes(dumps(bundle))
    loaded = load_bundle(path)
    assert case_from_bundle(loaded) == case
    assert replay(loaded).failed
    fixed = CounterexampleBundle.model_validate({**loaded.model_dump(), "mutation": None})
    assert not replay(fixed).failed


def test_mutated_fuzz_run_reports_bundles():
    # without ∅ the closure is never proper, so every fragment trial fails
    config = FuzzConfig(
        seed=0,
        trials=5,
        max_worlds=2,
        n_props=1,
        max_formula_depth=2,
        checks=["fragment"],
        mutation=Mutation.CLOSURE_DROPS_EMPTY,
        max_bundles=2,
    )
    report = run_fuzz(config)
    assert report.failures == 5
    assert report.checks["fragment"].failures == 5
    assert len(report.bundles) == 2
    for bundle in report.bundles:
        assert bundle.mutation is Mutation.CLOSURE_DROPS_EMPTY
        assert replay(bundle).failed


@pytest.mark.parametrize("seed", [1, 42])
@pytest.mark.parametrize("mutation", list(Mutation))
def test_fuzz_catches_every_mutation_within_the_trial_budget(mutation, seed):
    config = FuzzConfig(
        seed=seed,
        trials=1000,
        checks=["fragment", "graded"],
        mutation=mutation,
        shrink=False,
        max_bundles=0,
    )
    report = run_fuzz(config)
    assert report.failures > 0, {check: s.failures for check, s in report.checks.items()}


def test_grade_sensitive_checks_draw_inquisitive_implications():
    config = FuzzConfig(seed=0, trials=200, max_worlds=3, n_props=2)
    drawn = [generate_case(config, "graded", trial)[0] for trial in range(config.trials)]
    shaped = [
        case for case in drawn
        if isinstance(case.formula, Implies) and flatness_grade(case.formula.left) < flatness_grade(case.formula)
    ]
    assert len([case for case in shaped if bits.size(case.state) >= 2]) >= 15


def test_mutation_warning_is_logged_once_per_run(caplog):
    config = FuzzConfig(
        seed=0,
        trials=3,
        max_worlds=2,
        n_props=1,
        max_formula_depth=2,
        checks=["fragment"],
        mutation=Mutation.CLOSURE_DROPS_EMPTY,
        max_bundles=2,
    )
    with caplog.at_level(logging.WARNING):
        report = run_fuzz(config)
    assert report.failures == 3
    warnings = [
        r for r in caplog.records
        if r.levelno == logging.WARNING and "closure-drops-empty" in r.getMessage()
    ]
    assert len(warnings) == 1


def test_shrinking_never_leaves_the_valid_models(m0, p0):
    invalid = InqModel.build(["w0", "w1"], [[0], []], {"p": 0})
    assert _same_class(p0, m0)
    assert _same_class(p0, p0)
    assert not _same_class(m0, p0)
    assert not _same_class(p0, invalid)
    assert not _same_class(m0, invalid)

"""Randomized differential testing of every oracle, with shrinking and replay.

Each trial owns a numpy Generator seeded from (seed, check, trial index), so a
trial can be regenerated anywhere: in a worker process, while shrinking, or
from the command line. Failures are report content, never exceptions.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from inqml.core import bits, fo
from inqml.core.bisim import bulk_equiv, ef_check, full_bisim
from inqml.core.bits import InfoState
from inqml.core.formula import Formula, children, modal_depth, to_text
from inqml.core.model import InqModel, Level, inquisitive_closure, kripke_successors, prop_names, validate
from inqml.core.mutations import injected
from inqml.core.parser import parse
from inqml.core.relational import (
    LEVEL_FOR_KIND,
    Policy,
    decode,
    decode_model,
    encode,
    state_closure,
    validate_relational,
)
from inqml.core.support import (
    check_closure_invariance,
    check_ex_falso,
    check_kripke_sanity,
    check_persistency,
    supports,
    supports_graded,
)
from inqml.core.translate import (
    DEFAULT_LAMBDA,
    Clause,
    Literal,
    check_world_fragment,
    cnf_to_fo,
    down_relativize,
    eval_star,
    is_persistent_on,
    rewrite_persistent_bc,
)
from inqml.models.schemas import (
    ALL_CHECKS,
    CheckSummary,
    CounterexampleBundle,
    FuzzConfig,
    FuzzReport,
    LiteralDocument,
    ModelDocument,
)
from inqml.services.ef_search import find_distinguishing
from inqml.services.generators import (
    random_cnf,
    random_formula,
    random_inquisitive_implication,
    random_model,
    random_pair,
    random_state,
)

log = logging.getLogger("fuzz_harness")

# Canonical search is only attempted on pairs this small
SEARCH_MAX_LEVEL = 2
SEARCH_MAX_PROPS = 2
SEARCH_MAX_WORLDS = 3

# Share of fragment and graded trials drawn as ψ → ?χ over states of two or more worlds
INQUISITIVE_IMPLICATION_RATE = 0.25
GRADE_SENSITIVE_CHECKS = ("fragment", "graded")


@dataclass(frozen=True)
class Case:
    """One fully determined trial input."""

    check: str
    model: InqModel
    state: InfoState
    formula: Formula | None = None
    extra_formula: Formula | None = None
    policy: Policy | None = None
    other_model: InqModel | None = None
    other_state: InfoState | None = None
    level: int | None = None
    cnf: tuple[Clause, ...] | None = None


@dataclass
class TrialResult:
    check: str
    trial: int
    ok: bool
    verdicts: dict[str, object] = field(default_factory=dict)
    notes: tuple[str, ...] = ()


def trial_rng(seed: int, check: str, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, ALL_CHECKS.index(check), trial]))


# ============================================================================
# GENERATION
# ============================================================================

def _wants_inquisitive_implication(config: FuzzConfig, rng: np.random.Generator) -> bool:
    if config.max_formula_depth < 2 or config.max_flatness < 1:
        return False
    return bool(rng.random() < INQUISITIVE_IMPLICATION_RATE)


def generate_case(config: FuzzConfig, check: str, trial: int) -> tuple[Case, tuple[Formula, ...]]:
    """The trial's case, plus the EF formula sample for `ef` trials."""
    rng = trial_rng(config.seed, check, trial)
    props = prop_names(config.n_props)
    policy = config.policies[trial % len(config.policies)]

    if check == "ef":
        pair = random_pair(rng, config.ef_max_worlds, config.n_props, config.max_states_per_world)
        level = int(rng.integers(0, config.ef_max_level + 1))
        sample = tuple(
            random_formula(rng, props, config.max_formula_depth, max_flatness=config.max_flatness, max_modal=level)
            for _ in range(config.ef_samples)
        )
        case = Case(
            check, pair.left, pair.left_state,
            other_model=pair.right, other_state=pair.right_state, level=level,
        )
        return case, sample

    model = random_model(
        rng, config.max_worlds, config.n_props, config.max_states_per_world, config.proper_probability
    )
    if check == "rewrite":
        state = random_state(rng, model.n_worlds, nonempty=True)
        return Case(check, model, state, policy=policy, cnf=random_cnf(rng, props)), ()

    if check in GRADE_SENSITIVE_CHECKS and _wants_inquisitive_implication(config, rng):
        state = random_state(rng, model.n_worlds, min_size=2)
        formula = random_inquisitive_implication(rng, props, config.max_formula_depth)
        return Case(check, model, state, formula, None, policy), ()

    state = random_state(rng, model.n_worlds)
    formula = random_formula(rng, props, config.max_formula_depth, max_flatness=config.max_flatness)
    extra = None
    if check == "persistency":
        extra = random_formula(rng, props, config.max_formula_depth, max_flatness=config.max_flatness)
    return Case(check, model, state, formula, extra, policy), ()


# ============================================================================
# EVALUATION
# ============================================================================

def _eval_fragment(case: Case) -> tuple[bool, dict[str, object]]:
    model, s, phi = case.model, case.state, case.formula
    rel = encode(model, s, case.policy or Policy.MINIMAL)
    support = supports(model, s, phi)
    translated = eval_star(rel, phi)
    # the minimal encoding must sit at the level matching the model kind
    encoded_level = validate_relational(encode(model, s, Policy.MINIMAL)).level
    expected_level = LEVEL_FOR_KIND[model.kind]
    closed_level = validate(inquisitive_closure(model)).level
    closed_translated = eval_star(state_closure(rel), phi)
    world_ok = all(check_world_fragment(model, w, phi) for w in list(bits.members(s))[:1])
    verdicts = {
        "supports": support,
        "translation": translated,
        "closure_translation": closed_translated,
        "encoding_level": encoded_level.value,
        "expected_level": expected_level.value,
        "closure_level": closed_level.value,
        "world_variant": world_ok,
    }
    ok = (
        support == translated == closed_translated
        and encoded_level is expected_level
        and closed_level is Level.PROPER
        and world_ok
    )
    return ok, verdicts


def _eval_graded(case: Case) -> tuple[bool, dict[str, object]]:
    naive = supports(case.model, case.state, case.formula)
    graded = supports_graded(case.model, case.state, case.formula)
    return naive == graded, {"naive": naive, "graded": graded}


def _eval_persistency(case: Case) -> tuple[bool, dict[str, object]]:
    verdicts = {
        "persistency": check_persistency(case.model, case.state, case.formula),
        "ex_falso": check_ex_falso(case.model, case.formula),
        "kripke": check_kripke_sanity(case.model, case.formula, case.extra_formula or case.formula),
    }
    return all(verdicts.values()), verdicts


def _eval_closure(case: Case) -> tuple[bool, dict[str, object]]:
    model = case.model
    closed = inquisitive_closure(model)
    rel = state_closure(encode(model, case.state, case.policy or Policy.MINIMAL))
    verdicts = {
        "support_invariant": check_closure_invariance(model, case.state, case.formula),
        "closure_idempotent": inquisitive_closure(closed) == closed,
        "state_closure_idempotent": state_closure(rel) == rel,
        "kripke_preserved": kripke_successors(model) == kripke_successors(closed),
    }
    return all(verdicts.values()), verdicts


def _eval_roundtrip(case: Case) -> tuple[bool, dict[str, object]]:
    text = to_text(case.formula)
    decoded = decode(encode(case.model, case.state, case.policy or Policy.MINIMAL))
    verdicts = {
        "parse_print": parse(text) == case.formula,
        "decode_encode": decoded == (case.model, case.state),
    }
    return all(verdicts.values()), verdicts


def _eval_rewrite(case: Case) -> tuple[bool, dict[str, object]]:
    rel = state_closure(encode(case.model, case.state, case.policy or Policy.MINIMAL))
    assignment = fo.Assignment(states={DEFAULT_LAMBDA: rel.point})
    psi = cnf_to_fo(case.cnf)
    rewritten = rewrite_persistent_bc(case.cnf)

    relativized = fo.eval_fo(rel, assignment, down_relativize(psi, nonempty=True))
    translated = eval_star(rel, rewritten)
    support = supports(decode_model(rel), case.state, rewritten)
    persistent = is_persistent_on(rel, psi)
    plain = fo.eval_fo(rel, assignment, psi)

    half = len(case.cnf) // 2
    if half:
        left, right = cnf_to_fo(case.cnf[:half]), cnf_to_fo(case.cnf[half:])
    else:
        left = right = psi
    joint = fo.eval_fo(rel, assignment, down_relativize(fo.And((left, right))))
    split = fo.eval_fo(rel, assignment, fo.And((down_relativize(left), down_relativize(right))))

    verdicts = {
        "relativized": relativized,
        "rewrite_translation": translated,
        "rewrite_support": support,
        "persistent": persistent,
        "plain": plain,
        "conjunction_joint": joint,
        "conjunction_split": split,
    }
    ok = relativized == translated == support and (not persistent or plain == translated) and joint == split
    return ok, verdicts


def _eval_ef(case: Case, sample: tuple[Formula, ...] = ()) -> tuple[bool, dict[str, object]]:
    left, s, right, t = case.model, case.state, case.other_model, case.other_state
    formulas = sample if case.formula is None else (case.formula,)
    report = ef_check(left, s, right, t, case.level, formulas)
    bulk = bulk_equiv(left, s, right, t)
    full = full_bisim(left, s, right, t).equivalent
    verdicts = {
        "equivalent": report.equivalent,
        "disagreements": report.disagreements[:5],
        "bulk": bulk,
        "full": full,
    }
    return report.sound and (not bulk or full), verdicts


EVALUATORS = {
    "fragment": _eval_fragment,
    "graded": _eval_graded,
    "persistency": _eval_persistency,
    "closure": _eval_closure,
    "roundtrip": _eval_roundtrip,
    "rewrite": _eval_rewrite,
    "ef": _eval_ef,
}


def evaluate_case(case: Case) -> tuple[bool, dict[str, object]]:
    return EVALUATORS[case.check](case)


def _fails(case: Case) -> bool:
    try:
        ok, _ = evaluate_case(case)
    except Exception:
        return True
    return not ok


def _search_note(case: Case) -> str | None:
    left, right = case.model, case.other_model
    if (
        case.level > SEARCH_MAX_LEVEL
        or len(left.props) > SEARCH_MAX_PROPS
        or max(left.n_worlds, right.n_worlds) > SEARCH_MAX_WORLDS
    ):
        return None
    result = find_distinguishing(left, case.state, right, case.other_state, case.level)
    if result.found:
        return "search-found"
    log.warning(
        f"No canonical distinguishing formula at depth {case.level} "
        f"(family of {result.family_size}, saturated={result.saturated})"
    )
    return "search-residue"


def run_trial(config: FuzzConfig, check: str, trial: int) -> TrialResult:
    with injected(config.mutation):
        case, sample = generate_case(config, check, trial)
        notes: list[str] = []
        try:
            if check == "ef":
                ok, verdicts = _eval_ef(case, sample)
                notes.append("equivalent" if verdicts["equivalent"] else "inequivalent")
                if not verdicts["equivalent"]:
                    note = _search_note(case)
                    if note:
                        notes.append(note)
            else:
                ok, verdicts = evaluate_case(case)
        except Exception as exc:
            log.debug(f"{check} trial {trial} raised {exc!r}")
            ok, verdicts = False, {"error": f"{type(exc).__name__}: {exc}"}
        if check not in ("ef", "rewrite") and case.model.kind is Level.PSEUDO:
            notes.append("pseudo")
    if not ok:
        log.debug(f"✗ {check} trial {trial}: {verdicts}")
    return TrialResult(check, trial, ok, verdicts, tuple(notes))


def _run_trial_task(args: tuple[dict, str, int]) -> TrialResult:
    raw, check, trial = args
    return run_trial(FuzzConfig.model_validate(raw), check, trial)


# ============================================================================
# SHRINKING
# ============================================================================

def restrict(model: InqModel, keep: list[int]) -> InqModel:
    """The submodel on the worlds in `keep`, every state intersected with them."""
    sigma = [[bits.project(s, keep) for s in model.sigma[w]] for w in keep]
    valuation = {p: bits.project(ext, keep) for p, ext in zip(model.props, model.valuation)}
    return InqModel.build([model.world_names[w] for w in keep], sigma, valuation)


def _shrink_cnf(cnf: tuple[Clause, ...]) -> Iterator[tuple[Clause, ...]]:
    if len(cnf) > 1:
        for i in range(len(cnf)):
            yield cnf[:i] + cnf[i + 1:]
    for i, clause in enumerate(cnf):
        if len(clause) > 1:
            for j in range(len(clause)):
                yield cnf[:i] + (clause[:j] + clause[j + 1:],) + cnf[i + 1:]
        for j, literal in enumerate(clause):
            for child in children(literal.formula):
                smaller = replace(literal, formula=child)
                yield cnf[:i] + (clause[:j] + (smaller,) + clause[j + 1:],) + cnf[i + 1:]


def shrink_candidates(case: Case) -> Iterator[Case]:
    """Smaller variants: fewer worlds, fewer states, smaller formulas, smaller points."""
    needs_point = case.check == "rewrite"
    if case.check != "ef":
        model = case.model
        if model.n_worlds > 1:
            for w in model.worlds:
                keep = [v for v in model.worlds if v != w]
                state = bits.project(case.state, keep)
                if needs_point and not state:
                    continue
                yield replace(case, model=restrict(model, keep), state=state)
        for w, family in enumerate(model.sigma):
            if len(family) > 1:
                for dropped in family:
                    sigma = [list(f) for f in model.sigma]
                    sigma[w].remove(dropped)
                    yield replace(case, model=InqModel.build(model.world_names, sigma, dict(zip(model.props, model.valuation))))
        for w in bits.members(case.state):
            smaller = case.state & ~(1 << w)
            if not (needs_point and not smaller):
                yield replace(case, state=smaller)
    if case.formula is not None:
        for child in children(case.formula):
            if case.level is None or modal_depth(child) <= case.level:
                yield replace(case, formula=child)
    if case.extra_formula is not None:
        for child in children(case.extra_formula):
            yield replace(case, extra_formula=child)
    if case.cnf is not None:
        for cnf in _shrink_cnf(case.cnf):
            yield replace(case, cnf=cnf)


def _same_class(before: InqModel, after: InqModel) -> bool:
    """Never shrink into an invalid model, and keep proper models proper."""
    if after.kind is Level.INVALID:
        return False
    return before.kind is not Level.PROPER or after.kind is Level.PROPER


def shrink(case: Case, budget: int = 200) -> tuple[Case, int]:
    """Greedy shrinking; the result still fails."""
    steps = 0
    improved = True
    while improved and steps < budget:
        improved = False
        for candidate in shrink_candidates(case):
            if _same_class(case.model, candidate.model) and _fails(candidate):
                case = candidate
                steps += 1
                improved = True
                break
    return case, steps


def _ef_failing_formula(case: Case, sample: tuple[Formula, ...]) -> Case:
    """Pin an EF failure to one disagreeing sampled formula, if there is one."""
    for phi in sample:
        pinned = replace(case, formula=phi)
        if _fails(pinned):
            return pinned
    return case


# ============================================================================
# BUNDLES AND REPLAY
# ============================================================================

def case_to_bundle(
    case: Case, config: FuzzConfig, trial: int, verdicts: dict[str, object], steps: int
) -> CounterexampleBundle:
    def names(model: InqModel, state: InfoState) -> list[str]:
        return model.state_names(state)

    cnf = None
    if case.cnf is not None:
        cnf = [[LiteralDocument(formula=to_text(lit.formula), positive=lit.positive) for lit in clause] for clause in case.cnf]
    return CounterexampleBundle(
        check=case.check,
        seed=config.seed,
        trial=trial,
        mutation=config.mutation,
        model=ModelDocument.from_model(case.model),
        state=names(case.model, case.state),
        formula=None if case.formula is None else to_text(case.formula),
        extra_formula=None if case.extra_formula is None else to_text(case.extra_formula),
        policy=case.policy,
        other_model=None if case.other_model is None else ModelDocument.from_model(case.other_model),
        other_state=None if case.other_model is None else names(case.other_model, case.other_state),
        level=case.level,
        cnf=cnf,
        verdicts=verdicts,
        shrink_steps=steps,
    )


def case_from_bundle(bundle: CounterexampleBundle) -> Case:
    model = bundle.model.to_model()
    other = None if bundle.other_model is None else bundle.other_model.to_model()
    cnf = None
    if bundle.cnf is not None:
        cnf = tuple(tuple(Literal(parse(lit.formula), lit.positive) for lit in clause) for clause in bundle.cnf)
    return Case(
        check=bundle.check,
        model=model,
        state=model.state_of(bundle.state),
        formula=None if bundle.formula is None else parse(bundle.formula),
        extra_formula=None if bundle.extra_formula is None else parse(bundle.extra_formula),
        policy=bundle.policy,
        other_model=other,
        other_state=None if other is None else other.state_of(bundle.other_state or []),
        level=bundle.level,
        cnf=cnf,
    )


@dataclass(frozen=True)
class ReplayOutcome:
    failed: bool
    verdicts: dict[str, object]


def replay(bundle: CounterexampleBundle) -> ReplayOutcome:
    """Re-run a bundle's check under the bundle's mutation."""
    case = case_from_bundle(bundle)
    with injected(bundle.mutation):
        try:
            ok, verdicts = evaluate_case(case)
        except Exception as exc:
            ok, verdicts = False, {"error": f"{type(exc).__name__}: {exc}"}
    return ReplayOutcome(not ok, verdicts)


# ============================================================================
# DRIVER
# ============================================================================

def _bundle_for(config: FuzzConfig, result: TrialResult) -> CounterexampleBundle:
    with injected(config.mutation):
        case, sample = generate_case(config, result.check, result.trial)
        if case.check == "ef":
            case = _ef_failing_formula(case, sample)
        steps = 0
        if config.shrink and _fails(case):
            case, steps = shrink(case)
        try:
            _, verdicts = evaluate_case(case)
        except Exception as exc:
            verdicts = {"error": f"{type(exc).__name__}: {exc}"}
    if steps:
        log.info(f"✓ Shrunk {result.check} trial {result.trial} in {steps} steps")
    return case_to_bundle(case, config, result.trial, verdicts, steps)


def run_fuzz(config: FuzzConfig) -> FuzzReport:
    tasks = [(check, trial) for check in config.checks for trial in range(config.trials)]
    log.info(f"Fuzzing {len(tasks)} trials over checks {', '.join(config.checks)} (seed {config.seed})")
    if config.mutation is not None:
        log.warning(f"Mutation injected for this run: {config.mutation.value}")

    if config.jobs > 1:
        raw = config.model_dump(mode="json")
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(
                pool.map(_run_trial_task, [(raw, c, t) for c, t in tasks], chunksize=max(1, len(tasks) // (4 * config.jobs)))
            )
    else:
        results = [run_trial(config, c, t) for c, t in tasks]
    results.sort(key=lambda r: (config.checks.index(r.check), r.trial))

    summaries = {check: CheckSummary() for check in config.checks}
    bundles: list[CounterexampleBundle] = []
    for result in results:
        summary = summaries[result.check]
        summary.trials += 1
        for note in result.notes:
            summary.notes[note] = summary.notes.get(note, 0) + 1
        if result.ok:
            continue
        summary.failures += 1
        if summary.failures <= config.max_bundles:
            bundles.append(_bundle_for(config, result))

    report = FuzzReport(config=config, checks=summaries, bundles=bundles)
    log.info(f"✓ {report.headline()}")
    return report

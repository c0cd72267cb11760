"""Two-sorted first-order logic over relational (pseudo-)models.

World variables range over W, state variables over the represented states S
(never over P(W)). Variable names are assumed to be sort-consistent: the
translator never reuses a name across sorts.
"""

from __future__ import annotations

import logging
from contextlib import closing
from dataclasses import dataclass, field
from typing import Iterator, Union

from inqml.core import bits
from inqml.core.errors import ModelError, UnboundVariableError, UnknownPropositionError
from inqml.core.relational import RelStruct

log = logging.getLogger("fo_eval")

WORLD = "world"
STATE = "state"

# Bound variable used when μ ⊆ λ is unfolded to ∀y(y ∈ μ → y ∈ λ)
SUBSET_WITNESS = "_y"


# ============================================================================
# AST
# ============================================================================

@dataclass(frozen=True)
class MemAtom:
    """x ∈ λ"""
    x: str
    lam: str


@dataclass(frozen=True)
class EAtom:
    """E x λ"""
    x: str
    lam: str


@dataclass(frozen=True)
class PropAtom:
    prop: str
    x: str


@dataclass(frozen=True)
class EqAtom:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    body: FOFormula


@dataclass(frozen=True)
class And:
    parts: tuple[FOFormula, ...]


@dataclass(frozen=True)
class Or:
    parts: tuple[FOFormula, ...]


@dataclass(frozen=True)
class Implies:
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class ForallWorld:
    vars: tuple[str, ...]
    body: FOFormula


@dataclass(frozen=True)
class ExistsWorld:
    vars: tuple[str, ...]
    body: FOFormula


@dataclass(frozen=True)
class ForallState:
    vars: tuple[str, ...]
    body: FOFormula


@dataclass(frozen=True)
class ExistsState:
    vars: tuple[str, ...]
    body: FOFormula


@dataclass(frozen=True)
class StateSubset:
    """μ ⊆ λ, shorthand for ∀y(y ∈ μ → y ∈ λ)."""
    mu: str
    lam: str

    def expand(self, witness: str = SUBSET_WITNESS) -> FOFormula:
        return ForallWorld((witness,), Implies(MemAtom(witness, self.mu), MemAtom(witness, self.lam)))


FOFormula = Union[
    MemAtom, EAtom, PropAtom, EqAtom, Not, And, Or, Implies,
    ForallWorld, ExistsWorld, ForallState, ExistsState, StateSubset,
]

Quantifier = (ForallWorld, ExistsWorld, ForallState, ExistsState)

TRUE = And(())
FALSE = Or(())


def conj(parts: list[FOFormula] | tuple[FOFormula, ...]) -> FOFormula:
    """Conjunction without the one-element wrapper."""
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: list[FOFormula] | tuple[FOFormula, ...]) -> FOFormula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def _sort_of(node: FOFormula) -> str:
    return WORLD if isinstance(node, (ForallWorld, ExistsWorld)) else STATE


# ============================================================================
# VARIABLES
# ============================================================================

def free_vars_by_sort(node: FOFormula) -> tuple[frozenset[str], frozenset[str]]:
    """(free world variables, free state variables)."""
    match node:
        case MemAtom(x, lam) | EAtom(x, lam):
            return frozenset({x}), frozenset({lam})
        case PropAtom(_, x):
            return frozenset({x}), frozenset()
        case EqAtom(left, right):
            return frozenset({left, right}), frozenset()
        case StateSubset(mu, lam):
            return frozenset(), frozenset({mu, lam})
        case Not(body):
            return free_vars_by_sort(body)
        case And(parts) | Or(parts):
            worlds: frozenset[str] = frozenset()
            states: frozenset[str] = frozenset()
            for part in parts:
                w, s = free_vars_by_sort(part)
                worlds |= w
                states |= s
            return worlds, states
        case Implies(left, right):
            lw, ls = free_vars_by_sort(left)
            rw, rs = free_vars_by_sort(right)
            return lw | rw, ls | rs
        case ForallWorld(names, body) | ExistsWorld(names, body):
            w, s = free_vars_by_sort(body)
            return w - set(names), s
        case ForallState(names, body) | ExistsState(names, body):
            w, s = free_vars_by_sort(body)
            return w, s - set(names)
    raise TypeError(f"not an FO formula: {node!r}")


def free_vars(node: FOFormula) -> frozenset[str]:
    worlds, states = free_vars_by_sort(node)
    return worlds | states


def all_vars(node: FOFormula) -> frozenset[str]:
    """Every variable name occurring in the formula, bound or free."""
    names: set[str] = set()
    for sub in walk(node):
        match sub:
            case MemAtom(x, lam) | EAtom(x, lam):
                names.update((x, lam))
            case PropAtom(_, x):
                names.add(x)
            case EqAtom(left, right):
                names.update((left, right))
            case StateSubset(mu, lam):
                names.update((mu, lam))
            case ForallWorld(vs, _) | ExistsWorld(vs, _) | ForallState(vs, _) | ExistsState(vs, _):
                names.update(vs)
    return frozenset(names)


def walk(node: FOFormula) -> Iterator[FOFormula]:
    yield node
    match node:
        case Not(body):
            yield from walk(body)
        case And(parts) | Or(parts):
            for part in parts:
                yield from walk(part)
        case Implies(left, right):
            yield from walk(left)
            yield from walk(right)
        case ForallWorld(_, body) | ExistsWorld(_, body) | ForallState(_, body) | ExistsState(_, body):
            yield from walk(body)


def rename_free(node: FOFormula, old: str, new: str) -> FOFormula:
    """Replace free occurrences of `old` by `new`; `new` must not be bound inside."""
    def r(name: str) -> str:
        return new if name == old else name

    match node:
        case MemAtom(x, lam):
            return MemAtom(r(x), r(lam))
        case EAtom(x, lam):
            return EAtom(r(x), r(lam))
        case PropAtom(prop, x):
            return PropAtom(prop, r(x))
        case EqAtom(left, right):
            return EqAtom(r(left), r(right))
        case StateSubset(mu, lam):
            return StateSubset(r(mu), r(lam))
        case Not(body):
            return Not(rename_free(body, old, new))
        case And(parts):
            return And(tuple(rename_free(p, old, new) for p in parts))
        case Or(parts):
            return Or(tuple(rename_free(p, old, new) for p in parts))
        case Implies(left, right):
            return Implies(rename_free(left, old, new), rename_free(right, old, new))
        case ForallWorld(names, body) | ExistsWorld(names, body) | ForallState(names, body) | ExistsState(names, body):
            if old in names:
                return node
            return type(node)(names, rename_free(body, old, new))
    raise TypeError(f"not an FO formula: {node!r}")


def count_quantified(node: FOFormula, sort: str = WORLD) -> int:
    total = 0
    for sub in walk(node):
        if isinstance(sub, Quantifier) and _sort_of(sub) == sort:
            total += len(sub.vars)
    return total


# ============================================================================
# PRINTING
# ============================================================================

def _pred_name(prop: str) -> str:
    return prop[:1].upper() + prop[1:]


def _wrap(node: FOFormula) -> str:
    """Operand of a binary connective: compound operands get parentheses."""
    text = to_text(node)
    if isinstance(node, (And, Or)) and not node.parts:
        return text
    if isinstance(node, (And, Or, Implies, *Quantifier)):
        return f"({text})"
    return text


def _negand(node: FOFormula) -> str:
    if isinstance(node, (PropAtom, EAtom)) or (isinstance(node, (And, Or)) and not node.parts):
        return to_text(node)
    return f"({to_text(node)})"


def to_text(node: FOFormula) -> str:
    """Report rendering, e.g. `forall x1. (x1 in L -> P(x1))`."""
    match node:
        case MemAtom(x, lam):
            return f"{x} in {lam}"
        case EAtom(x, lam):
            return f"E({x}, {lam})"
        case PropAtom(prop, x):
            return f"{_pred_name(prop)}({x})"
        case EqAtom(left, right):
            return f"{left} = {right}"
        case StateSubset(mu, lam):
            return f"{mu} sub {lam}"
        case Not(body):
            return f"~{_negand(body)}"
        case And(parts):
            return " & ".join(_wrap(p) for p in parts) if parts else "true"
        case Or(parts):
            return " | ".join(_wrap(p) for p in parts) if parts else "false"
        case Implies(left, right):
            return f"{_wrap(left)} -> {_wrap(right)}"
        case ForallWorld(names, body) | ForallState(names, body):
            return f"forall {' '.join(names)}. ({to_text(body)})"
        case ExistsWorld(names, body) | ExistsState(names, body):
            return f"exists {' '.join(names)}. ({to_text(body)})"
    raise TypeError(f"not an FO formula: {node!r}")


# ============================================================================
# EVALUATION
# ============================================================================

@dataclass
class Assignment:
    worlds: dict[str, int] = field(default_factory=dict)
    states: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class _Plan:
    """A quantifier block ∀v̄ (G → B) or ∃v̄ (C1 ∧ … ∧ Cm), flattened."""

    universal: bool
    bound: tuple[tuple[str, str], ...]
    body: FOFormula | None
    head: tuple[tuple[str, str], ...]       # bound vars the body depends on
    head_guards: tuple[tuple[FOFormula, int], ...]
    tail: tuple[tuple[str, str], ...]       # bound vars only the guards mention
    tail_guards: tuple[FOFormula, ...]


def _conjuncts(node: FOFormula) -> list[FOFormula]:
    if isinstance(node, And):
        out: list[FOFormula] = []
        for part in node.parts:
            out.extend(_conjuncts(part))
        return out
    return [node]


class FOEvaluator:
    """Tarski semantics over one relational structure.

    Quantifier blocks are evaluated with their guards checked as soon as the
    variables they mention are bound, and bound variables that only feed
    guards are solved existentially per connected component. Quantifier
    nodes are memoized on the values of their free variables.
    """

    def __init__(self, rel: RelStruct):
        self.rel = rel
        self._domains = {WORLD: range(rel.n_worlds), STATE: range(len(rel.states))}
        self._prop_ext = dict(zip(rel.props, rel.valuation))
        self._free: dict[int, tuple[str, ...]] = {}
        self._plans: dict[int, _Plan] = {}
        self._memo: dict[tuple[int, tuple[int, ...]], bool] = {}
        self._expansions: dict[int, FOFormula] = {}
        self._keep: list[FOFormula] = []

    # -- bookkeeping ---------------------------------------------------------

    def free(self, node: FOFormula) -> tuple[str, ...]:
        key = id(node)
        names = self._free.get(key)
        if names is None:
            names = tuple(sorted(free_vars(node)))
            self._free[key] = names
            self._keep.append(node)
        return names

    def _value(self, env: dict[str, int], name: str) -> int:
        try:
            return env[name]
        except KeyError:
            raise UnboundVariableError(name) from None

    # -- entry point ---------------------------------------------------------

    def evaluate(self, node: FOFormula, env: dict[str, int]) -> bool:
        match node:
            case MemAtom(x, lam):
                return bool(self.rel.states[self._value(env, lam)] >> self._value(env, x) & 1)
            case EAtom(x, lam):
                return self._value(env, lam) in self.rel.E[self._value(env, x)]
            case PropAtom(prop, x):
                try:
                    extension = self._prop_ext[prop]
                except KeyError:
                    raise UnknownPropositionError(prop) from None
                return bool(extension >> self._value(env, x) & 1)
            case EqAtom(left, right):
                return self._value(env, left) == self._value(env, right)
            case StateSubset():
                return self.evaluate(self._expansion(node), env)
            case Not(body):
                return not self.evaluate(body, env)
            case And(parts):
                return all(self.evaluate(p, env) for p in parts)
            case Or(parts):
                return any(self.evaluate(p, env) for p in parts)
            case Implies(left, right):
                return not self.evaluate(left, env) or self.evaluate(right, env)
            case ForallWorld() | ExistsWorld() | ForallState() | ExistsState():
                key = (id(node), tuple(self._value(env, v) for v in self.free(node)))
                cached = self._memo.get(key)
                if cached is None:
                    cached = self._quantified(node, env)
                    self._memo[key] = cached
                return cached
        raise TypeError(f"not an FO formula: {node!r}")

    def _expansion(self, node: StateSubset) -> FOFormula:
        expanded = self._expansions.get(id(node))
        if expanded is None:
            expanded = node.expand()
            self._expansions[id(node)] = expanded
            self._keep.append(node)
        return expanded

    # -- quantifier blocks ---------------------------------------------------

    def _plan(self, node: FOFormula) -> _Plan:
        plan = self._plans.get(id(node))
        if plan is not None:
            return plan
        universal = isinstance(node, (ForallWorld, ForallState))
        kinds = (ForallWorld, ForallState) if universal else (ExistsWorld, ExistsState)
        bound: list[tuple[str, str]] = []
        matrix = node
        while isinstance(matrix, kinds):
            bound.extend((name, _sort_of(matrix)) for name in matrix.vars)
            matrix = matrix.body
        names = {name for name, _ in bound}

        if universal:
            if isinstance(matrix, Implies):
                guards, body = _conjuncts(matrix.left), matrix.right
            else:
                guards, body = [], matrix
            body_vars = set(free_vars(body)) & names
        else:
            guards, body = _conjuncts(matrix), None
            body_vars = set()

        head = tuple(v for v in bound if v[0] in body_vars)
        tail = tuple(v for v in bound if v[0] not in body_vars)
        head_names = [name for name, _ in head]
        head_guards, tail_guards = [], []
        for guard in guards:
            mentioned = set(free_vars(guard)) & names
            if mentioned <= body_vars:
                # schedule the guard right after its last head variable is bound
                position = max((head_names.index(v) for v in mentioned), default=-1)
                head_guards.append((guard, position))
            else:
                tail_guards.append(guard)
        plan = _Plan(universal, tuple(bound), body, head, tuple(head_guards), tail, tuple(tail_guards))
        self._plans[id(node)] = plan
        self._keep.append(node)
        return plan

    def _bindings(
        self,
        variables: tuple[tuple[str, str], ...],
        scheduled: tuple[tuple[FOFormula, int], ...],
        env: dict[str, int],
    ) -> Iterator[None]:
        """Bind `variables` in env one at a time, pruning on scheduled guards."""
        for guard, position in scheduled:
            if position == -1 and not self.evaluate(guard, env):
                return

        def bind(i: int) -> Iterator[None]:
            if i == len(variables):
                yield
                return
            name, sort = variables[i]
            saved = env.get(name, _MISSING)
            try:
                for value in self._domains[sort]:
                    env[name] = value
                    if all(self.evaluate(g, env) for g, pos in scheduled if pos == i):
                        yield from bind(i + 1)
            finally:
                # runs on exhaustion and on close(), so shadowed bindings come back
                if saved is _MISSING:
                    env.pop(name, None)
                else:
                    env[name] = saved

        yield from bind(0)

    def _exists(self, variables: tuple[tuple[str, str], ...], guards: tuple[FOFormula, ...], env: dict[str, int]) -> bool:
        """∃ variables ⋀ guards, solved per connected component of shared variables."""
        names = {name for name, _ in variables}
        closed = [g for g in guards if not (set(self.free(g)) & names)]
        if not all(self.evaluate(g, env) for g in closed):
            return False

        components: list[tuple[set[str], list[FOFormula]]] = []
        for guard in guards:
            mentioned = set(self.free(guard)) & names
            if not mentioned:
                continue
            merged = [c for c in components if c[0] & mentioned]
            group_vars, group_guards = set(mentioned), [guard]
            for c in merged:
                group_vars |= c[0]
                group_guards.extend(c[1])
                components.remove(c)
            components.append((group_vars, group_guards))

        covered = set().union(*(c[0] for c in components)) if components else set()
        for name, sort in variables:
            if name not in covered and not self._domains[sort]:
                return False

        for group_vars, group_guards in components:
            ordered = tuple(v for v in variables if v[0] in group_vars)
            order = [name for name, _ in ordered]
            scheduled = tuple(
                (g, max(order.index(v) for v in set(self.free(g)) & group_vars)) for g in group_guards
            )
            with closing(self._bindings(ordered, scheduled, env)) as solutions:
                if next(solutions, _MISSING) is _MISSING:
                    return False
        return True

    def _quantified(self, node: FOFormula, env: dict[str, int]) -> bool:
        plan = self._plan(node)
        if not plan.universal:
            return self._exists(plan.bound, tuple(g for g, _ in plan.head_guards) + plan.tail_guards, env)
        with closing(self._bindings(plan.head, plan.head_guards, env)) as instances:
            for _ in instances:
                if plan.tail and not self._exists(plan.tail, plan.tail_guards, env):
                    continue
                if not self.evaluate(plan.body, env):
                    return False
        return True


_MISSING = object()


def eval_fo(rel: RelStruct, assignment: Assignment, psi: FOFormula) -> bool:
    """Classical truth of ψ in `rel` under `assignment`."""
    overlap = set(assignment.worlds) & set(assignment.states)
    if overlap:
        raise ModelError(f"variables assigned in both sorts: {sorted(overlap)}")
    for name, value in assignment.worlds.items():
        if not 0 <= value < rel.n_worlds:
            raise ModelError(f"world variable {name} -> {value} out of range")
    for name, value in assignment.states.items():
        if not 0 <= value < len(rel.states):
            raise ModelError(f"state variable {name} -> #{value} out of range")
    env = {**assignment.worlds, **assignment.states}
    return FOEvaluator(rel).evaluate(psi, env)


def state_assignment(rel: RelStruct, lam: str = "L") -> Assignment:
    """λ ↦ the distinguished state of `rel`."""
    if rel.point is None:
        raise ModelError("structure has no distinguished state")
    return Assignment(states={lam: rel.point})


def subset_indices(rel: RelStruct, lam_index: int) -> list[int]:
    return [i for i, t in enumerate(rel.states) if bits.is_subset(t, rel.states[lam_index])]

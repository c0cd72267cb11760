"""Seeded-bug switchboard used to check that the oracles have teeth.

Each mutation flips exactly one rule in the engine. Production code paths ask
`is_active(...)`; nothing is active unless a caller opts in.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from enum import Enum
from typing import Iterator

log = logging.getLogger("mutations")


class Mutation(str, Enum):
    # flat(ψ→χ) := flat ψ instead of flat χ
    FLAT_IMPLIES = "flat-implies"
    # flat(ψ⩒χ) := flat ψ + flat χ
    FLAT_DISJ_NO_PLUS_ONE = "flat-disj-no-plus-one"
    # implication clause ranges over t ⊊ s
    STRICT_IMPLICATION = "strict-implication"
    # inquisitive closure leaves ∅ out
    CLOSURE_DROPS_EMPTY = "closure-drops-empty"
    # ST(□ψ) guards read E y μ ∧ x ∈ μ
    BOX_GUARD_SWAP = "box-guard-swap"


_active: ContextVar[Mutation | None] = ContextVar("inqml_mutation", default=None)


def is_active(mutation: Mutation) -> bool:
    return _active.get() is mutation


def active() -> Mutation | None:
    return _active.get()


@contextmanager
def injected(mutation: Mutation | str | None) -> Iterator[Mutation | None]:
    """Activate one mutation for the dynamic extent of the block."""
    if mutation is not None and not isinstance(mutation, Mutation):
        mutation = Mutation(mutation)
    if mutation is not None:
        log.debug(f"Mutation injected: {mutation.value}")
    token = _active.set(mutation)
    try:
        yield mutation
    finally:
        _active.reset(token)

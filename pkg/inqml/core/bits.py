"""Bitset helpers. An information state is an int whose bit i stands for world i."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator

InfoState = int

EMPTY: InfoState = 0


def mask_of(indices: Iterable[int]) -> InfoState:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def full_mask(n: int) -> InfoState:
    return (1 << n) - 1


def members(state: InfoState) -> Iterator[int]:
    """Yield the world indices of a state in increasing order."""
    i = 0
    while state:
        if state & 1:
            yield i
        state >>= 1
        i += 1


def size(state: InfoState) -> int:
    return state.bit_count()


def is_subset(small: InfoState, big: InfoState) -> bool:
    return small & ~big == 0


def subsets(state: InfoState) -> Iterator[InfoState]:
    """All t ⊆ state (including ∅ and state itself), by sub-mask iteration."""
    t = state
    while True:
        yield t
        if t == 0:
            return
        t = (t - 1) & state


def proper_subsets(state: InfoState) -> Iterator[InfoState]:
    for t in subsets(state):
        if t != state:
            yield t


def subsets_up_to(state: InfoState, k: int) -> Iterator[InfoState]:
    """Non-empty subsets of `state` with at most k elements, smallest first."""
    worlds = list(members(state))
    for r in range(1, min(k, len(worlds)) + 1):
        for combo in combinations(worlds, r):
            yield mask_of(combo)


def project(state: InfoState, keep: list[int]) -> InfoState:
    """Re-index `state` onto the worlds listed in `keep` (new index = position in keep)."""
    out = 0
    for new, old in enumerate(keep):
        if state >> old & 1:
            out |= 1 << new
    return out


def permute(state: InfoState, mapping: list[int]) -> InfoState:
    """Move world i to mapping[i]."""
    out = 0
    for i in members(state):
        out |= 1 << mapping[i]
    return out

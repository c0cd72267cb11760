"""Search for a formula separating two pointed models.

Candidates are grouped by their support profile: for each of the two models,
the set of all states (as a bitmask indexed by state) that support the
formula. Every connective acts on profiles alone, so keeping one formula per
profile loses nothing, and the profiles of compound formulas are computed
without calling the support checker.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from inqml.core import bits
from inqml.core.bits import InfoState
from inqml.core.formula import BOT, And, Atom, Box, BoxPlus, Formula, Implies, InqDisj, modal_depth, to_text
from inqml.core.model import InqModel, kripke_successors
from inqml.core.support import supports

log = logging.getLogger("ef_search")


class _ProfileAlgebra:
    """Support vectors of one model: bit s is set iff state s supports the formula."""

    def __init__(self, model: InqModel):
        self.model = model
        n = model.n_worlds
        self.n = n
        self.full = (1 << (1 << n)) - 1
        self.successors = kripke_successors(model)
        # positions s lacking world i, used to grow up-closures one world at a time
        self.lacking = [
            sum(1 << s for s in range(1 << n) if not s >> i & 1) for i in range(n)
        ]
        self._downsets: dict[InfoState, int] = {}

    def downset(self, state: InfoState) -> int:
        """Vector of all subsets of `state`."""
        vector = self._downsets.get(state)
        if vector is None:
            vector = sum(1 << t for t in bits.subsets(state))
            self._downsets[state] = vector
        return vector

    def atom(self, name: str) -> int:
        return self.downset(self.model.extension(name))

    def bottom(self) -> int:
        return 1

    def implies(self, a: int, b: int) -> int:
        bad = a & ~b & self.full
        for i in range(self.n):
            bad |= (bad & self.lacking[i]) << (1 << i)
        return ~bad & self.full

    def box(self, a: int) -> int:
        good = bits.mask_of(w for w in range(self.n) if a >> self.successors[w] & 1)
        return self.downset(good)

    def box_plus(self, a: int) -> int:
        good = bits.mask_of(w for w in range(self.n) if all(a >> t & 1 for t in self.model.sigma[w]))
        return self.downset(good)


@dataclass(frozen=True)
class SearchResult:
    formula: Formula | None
    family_size: int
    saturated: bool

    @property
    def found(self) -> bool:
        return self.formula is not None


class CanonicalSearch:
    def __init__(self, left: InqModel, right: InqModel, *, rounds: int = 2, max_family: int = 256):
        if sorted(left.props) != sorted(right.props):
            raise ValueError("models must share a signature")
        self.left, self.right = _ProfileAlgebra(left), _ProfileAlgebra(right)
        self.rounds = rounds
        self.max_family = max_family

    def run(self, s: InfoState, t: InfoState, depth: int) -> SearchResult:
        family: dict[tuple[int, int], Formula] = {}
        saturated = True

        def separates(profile: tuple[int, int]) -> bool:
            return bool(profile[0] >> s & 1) != bool(profile[1] >> t & 1)

        def add(profile: tuple[int, int], phi: Formula, capped: bool = True) -> bool:
            nonlocal saturated
            if profile in family:
                return False
            if capped and len(family) >= self.max_family:
                saturated = False
                return False
            family[profile] = phi
            return True

        def hit() -> Formula | None:
            for profile, phi in family.items():
                if separates(profile):
                    return phi
            return None

        for p in sorted(self.left.model.props):
            add((self.left.atom(p), self.right.atom(p)), Atom(p))
        add((self.left.bottom(), self.right.bottom()), BOT)

        for level in range(depth + 1):
            if level > 0:
                # modal layers ignore the cap so every depth stays reachable
                for profile, phi in list(family.items()):
                    add((self.left.box(profile[0]), self.right.box(profile[1])), Box(phi), capped=False)
                    add((self.left.box_plus(profile[0]), self.right.box_plus(profile[1])), BoxPlus(phi), capped=False)
            found = hit()
            if found is not None:
                return SearchResult(found, len(family), saturated)
            fresh = list(family.items())
            for _ in range(self.rounds):
                current = list(family.items())
                grown = False
                for pa, a in fresh:
                    if len(family) >= self.max_family:
                        saturated = False
                        break
                    for pb, b in current:
                        grown |= add((pa[0] & pb[0], pa[1] & pb[1]), And(a, b))
                        grown |= add((pa[0] | pb[0], pa[1] | pb[1]), InqDisj(a, b))
                        grown |= add((self.left.implies(pa[0], pb[0]), self.right.implies(pa[1], pb[1])), Implies(a, b))
                        grown |= add((self.left.implies(pb[0], pa[0]), self.right.implies(pb[1], pa[1])), Implies(b, a))
                seen = {p for p, _ in current}
                fresh = [(p, f) for p, f in family.items() if p not in seen]
                found = hit()
                if found is not None:
                    return SearchResult(found, len(family), saturated)
                if not grown:
                    break
        return SearchResult(None, len(family), saturated)


def find_distinguishing(
    left: InqModel,
    s: InfoState,
    right: InqModel,
    t: InfoState,
    depth: int,
    *,
    rounds: int = 2,
    max_family: int = 256,
) -> SearchResult:
    """A formula of modal depth ≤ depth supported at exactly one of the two points.

    Found formulas are re-checked with the support checker before being returned.
    """
    result = CanonicalSearch(left, right, rounds=rounds, max_family=max_family).run(s, t, depth)
    if result.formula is None:
        return result
    phi = result.formula
    if modal_depth(phi) > depth or supports(left, s, phi) == supports(right, t, phi):
        log.error(f"Profile algebra disagrees with support on {to_text(phi)}")
        return SearchResult(None, result.family_size, result.saturated)
    return result

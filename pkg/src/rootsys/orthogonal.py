"""
Strongly orthogonal systems, the maximal system Q(Phi), xi and chamber dominance.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Sequence, Union

import numpy as np

from src.errors import RootSystemError
from src.rootsys.root_system import (
    Root,
    RootSystem,
    WeightVector,
    inner_product,
    strongly_orthogonal,
    validate_type,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StrongOrthSystem:
    """Set of pairwise strongly orthogonal positive roots"""
    roots: FrozenSet[Root]
    rank: int

    @classmethod
    def of(cls, rs: RootSystem, roots: Sequence[Root]) -> "StrongOrthSystem":
        sos = cls(frozenset(roots), rs.rank)
        if len(sos.roots) != len(roots):
            raise RootSystemError("Strongly orthogonal system contains a repeated root")
        if not sos.is_valid(rs):
            raise RootSystemError(
                f"Roots {[str(r) for r in roots]} are not pairwise strongly orthogonal in {rs.label}"
            )
        return sos

    def is_valid(self, rs: RootSystem) -> bool:
        roots = sorted(self.roots)
        for r in roots:
            if not rs.is_root(r):
                return False
        for i, a in enumerate(roots):
            for b in roots[i + 1:]:
                if not strongly_orthogonal(rs, a, b):
                    return False
        return True

    def sorted_roots(self) -> List[Root]:
        return sorted(self.roots, key=lambda r: (-r.height, r.coeffs))

    def __len__(self) -> int:
        return len(self.roots)


def _compatibility(rs: RootSystem) -> List[int]:
    """Bitmask per positive root index of the roots strongly orthogonal to it"""
    roots = rs.positive_roots
    masks = [0] * len(roots)
    for i, a in enumerate(roots):
        for j in range(i + 1, len(roots)):
            if strongly_orthogonal(rs, a, roots[j]):
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def _components(rs: RootSystem, roots: Sequence[Root]) -> List[List[Root]]:
    """Irreducible components of a root subsystem (linked by non-orthogonality)"""
    remaining = list(roots)
    components = []
    while remaining:
        component = [remaining.pop(0)]
        grown = True
        while grown:
            grown = False
            for r in list(remaining):
                if any(inner_product(rs, r, s) != 0 for s in component):
                    component.append(r)
                    remaining.remove(r)
                    grown = True
        components.append(component)
    return components


def _cascade(rs: RootSystem, roots: Sequence[Root]) -> List[Root]:
    chosen = []
    for component in _components(rs, roots):
        top = max(component, key=lambda r: (r.height, r.coeffs))
        rest = [r for r in component if r != top and strongly_orthogonal(rs, r, top)]
        chosen.append(top)
        chosen.extend(_cascade(rs, rest))
    return chosen


def highest_root_cascade(rs: RootSystem) -> StrongOrthSystem:
    """
    Recursive highest-root cascade: take the highest root, keep the roots strongly
    orthogonal to it, recurse on each irreducible component of what is left.
    """
    return StrongOrthSystem.of(rs, _cascade(rs, rs.positive_roots))


def kostant_cascade(rs: RootSystem) -> StrongOrthSystem:
    """
    Maximal strongly orthogonal system Q(Phi).

    Branch and bound over strongly orthogonal systems maximising the height of
    rho, seeded with the highest-root cascade. Since rho(Q(Phi)) dominates
    every rho(O) coefficientwise, any height maximiser has rho equal to
    rho(Q(Phi)). Strongly orthogonal roots are orthogonal, so a system has at
    most `rank` members, which bounds the search.
    """
    roots = rs.positive_roots
    heights = [r.height for r in roots]
    compat = _compatibility_cached(rs)
    seed = _cascade(rs, roots)
    best = {"indices": [rs.index_of(r) for r in seed], "total": sum(r.height for r in seed)}
    nodes = 0

    def top_sum(mask: int, k: int) -> int:
        total = 0
        while mask and k:
            i = mask.bit_length() - 1
            total += heights[i]
            mask ^= 1 << i
            k -= 1
        return total

    def search(mask: int, chosen: List[int], total: int) -> None:
        nonlocal nodes
        nodes += 1
        if total > best["total"]:
            best["indices"] = list(chosen)
            best["total"] = total
        slots = rs.rank - len(chosen)
        while mask and slots:
            if total + top_sum(mask, slots) <= best["total"]:
                return
            i = mask.bit_length() - 1
            mask ^= 1 << i
            chosen.append(i)
            search(mask & compat[i], chosen, total + heights[i])
            chosen.pop()

    search((1 << len(roots)) - 1, [], 0)
    logger.debug(f"Q({rs.label}) search visited {nodes} nodes, height {best['total']}")
    return StrongOrthSystem.of(rs, [roots[i] for i in sorted(best["indices"])])


def enumerate_strong_orth_systems(rs: RootSystem) -> Iterator[StrongOrthSystem]:
    """Every nonempty strongly orthogonal system of positive roots"""
    roots = rs.positive_roots
    compat = _compatibility_cached(rs)

    def extend(mask: int, chosen: List[int]) -> Iterator[StrongOrthSystem]:
        while mask:
            i = mask.bit_length() - 1
            mask ^= 1 << i
            chosen.append(i)
            yield StrongOrthSystem(frozenset(roots[j] for j in chosen), rs.rank)
            yield from extend(mask & compat[i], chosen)
            chosen.pop()

    yield from extend((1 << len(roots)) - 1, [])


def random_strong_orth_system(rs: RootSystem, rng: np.random.Generator) -> StrongOrthSystem:
    """Greedy strongly orthogonal system built along a random ordering of the roots"""
    roots = rs.positive_roots
    compat = _compatibility_cached(rs)
    allowed = (1 << len(roots)) - 1
    chosen = []
    for i in rng.permutation(len(roots)):
        i = int(i)
        if allowed >> i & 1:
            chosen.append(roots[i])
            allowed &= compat[i]
    return StrongOrthSystem(frozenset(chosen), rs.rank)


_COMPAT_CACHE: Dict[RootSystem, List[int]] = {}


def _compatibility_cached(rs: RootSystem) -> List[int]:
    if rs not in _COMPAT_CACHE:
        _COMPAT_CACHE[rs] = _compatibility(rs)
    return _COMPAT_CACHE[rs]


def rho_of(sos: StrongOrthSystem) -> WeightVector:
    total = WeightVector.zero(sos.rank)
    for r in sos.roots:
        total = total + WeightVector.from_root(r)
    return total


def xi(rs: RootSystem) -> WeightVector:
    """Half the sum of the maximal strongly orthogonal system"""
    return rho_of(kostant_cascade(rs)).scale(Fraction(1, 2))


def dominates_on_chamber(
    f: Union[WeightVector, Root], g: Union[WeightVector, Root]
) -> bool:
    """
    f(X) >= g(X) on the closed positive Weyl chamber.

    The dual cone of the chamber is the nonnegative span of the simple roots,
    so this is a coefficientwise comparison in the simple-root basis.
    """
    f = WeightVector.from_root(f) if isinstance(f, Root) else f
    g = WeightVector.from_root(g) if isinstance(g, Root) else g
    if f.rank != g.rank:
        raise RootSystemError(f"Rank mismatch: {f.rank} vs {g.rank}")
    return all(c >= 0 for c in (f - g).coeffs)


def good_type(type_label: str, rank: int) -> bool:
    """Types on which every unbounded flow has summable decay: B_n, D_n (n >= 4), E_6-8, F_4"""
    validate_type(type_label, rank)
    if type_label in ("B", "D"):
        return rank >= 4
    return type_label in ("E", "F")

"""
Reduced root systems in the simple-root basis.

Simple roots follow Bourbaki's numbering. The Cartan matrix convention is
cartan[i][j] = <alpha_i, alpha_j^vee> = 2(alpha_i, alpha_j) / (alpha_j, alpha_j),
so the simple reflection s_i acts on a coefficient vector v by
s_i(v) = v - (sum_j v_j cartan[j][i]) alpha_i.

  type  ranks       long/short simple roots          Dynkin edges (1-based)
  A_n   n >= 1      all equal                        i - i+1
  B_n   n >= 2      alpha_n short                    i - i+1
  C_n   n >= 3      alpha_n long                     i - i+1
  D_n   n >= 4      all equal                        i - i+1 (i <= n-2), (n-2) - n
  E_n   n = 6,7,8   all equal                        1-3, 3-4, ..., (n-1)-n, 2-4
  F_4               alpha_1, alpha_2 long            1-2, 2=>3, 3-4
  G_2               alpha_1 short                    1<=2 (triple)
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Any, Dict, FrozenSet, List, Sequence, Tuple, Union

from src.errors import RootSystemError

logger = logging.getLogger(__name__)

VALID_RANKS = {
    "A": "n >= 1",
    "B": "n >= 2",
    "C": "n >= 3",
    "D": "n >= 4",
    "E": "n in {6, 7, 8}",
    "F": "n = 4",
    "G": "n = 2",
}


@dataclass(frozen=True, order=True)
class Root:
    """Integer coefficient vector of a root in the simple-root basis"""
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coeffs) and any(c > 0 for c in self.coeffs)

    def __add__(self, other: "Root") -> "Root":
        return Root(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Root") -> "Root":
        return Root(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Root":
        return Root(tuple(-a for a in self.coeffs))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs, start=1):
            if c == 0:
                continue
            prefix = "" if abs(c) == 1 else str(abs(c))
            sign = "-" if c < 0 else "+"
            terms.append(f"{sign}{prefix}a{i}")
        text = "".join(terms).lstrip("+")
        return text or "0"


@dataclass(frozen=True)
class WeightVector:
    """Rational vector in the simple-root basis (xi, rho of a strongly orthogonal system)"""
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_root(cls, root: Root) -> "WeightVector":
        return cls(tuple(Fraction(c) for c in root.coeffs))

    @classmethod
    def zero(cls, rank: int) -> "WeightVector":
        return cls(tuple(Fraction(0) for _ in range(rank)))

    def __add__(self, other: "WeightVector") -> "WeightVector":
        return WeightVector(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "WeightVector") -> "WeightVector":
        return WeightVector(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, factor: Union[int, Fraction]) -> "WeightVector":
        return WeightVector(tuple(Fraction(factor) * c for c in self.coeffs))

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coeffs]


@dataclass(frozen=True)
class RootSystem:
    """Positive system of an irreducible reduced root system"""
    type_label: str
    rank: int
    cartan_matrix: Tuple[Tuple[int, ...], ...]
    positive_roots: Tuple[Root, ...]
    _members: FrozenSet[Tuple[int, ...]] = field(init=False, repr=False, compare=False)
    _gram: Tuple[Tuple[Fraction, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_members", frozenset(r.coeffs for r in self.positive_roots))
        object.__setattr__(self, "_gram", symmetrize(self.cartan_matrix))

    @property
    def label(self) -> str:
        return f"{self.type_label}{self.rank}"

    @property
    def simple_roots(self) -> List[Root]:
        return [simple_root(i, self.rank) for i in range(self.rank)]

    @property
    def gram(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return self._gram

    def is_root(self, v: Union[Root, Sequence[int]]) -> bool:
        """True iff v (or -v) is one of the positive roots"""
        coeffs = v.coeffs if isinstance(v, Root) else tuple(int(c) for c in v)
        if coeffs in self._members:
            return True
        return tuple(-c for c in coeffs) in self._members

    def index_of(self, root: Root) -> int:
        return self.positive_roots.index(root)

    def reflect(self, v: Root, i: int) -> Root:
        """Simple reflection s_i applied to v"""
        pairing = sum(v.coeffs[j] * self.cartan_matrix[j][i] for j in range(self.rank))
        coeffs = list(v.coeffs)
        coeffs[i] -= pairing
        return Root(tuple(coeffs))


def validate_type(type_label: str, rank: int) -> None:
    """Raise RootSystemError unless (type_label, rank) names an implemented reduced system"""
    if type_label == "BC":
        raise RootSystemError(
            "Non-reduced root systems (type BC_n) are not supported; "
            "only reduced systems A-G are implemented"
        )
    if type_label not in VALID_RANKS:
        raise RootSystemError(
            f"Unknown root system type '{type_label}'; expected one of {', '.join(VALID_RANKS)}"
        )
    if not isinstance(rank, int) or isinstance(rank, bool):
        raise RootSystemError(f"Rank must be an integer, got {rank!r}")
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 3,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }[type_label]
    if not ok:
        raise RootSystemError(
            f"Invalid rank {rank} for type {type_label}: requires {VALID_RANKS[type_label]}"
        )


def classical_root_count(type_label: str, rank: int) -> int:
    """Number of positive roots of an irreducible reduced system"""
    validate_type(type_label, rank)
    n = rank
    if type_label == "A":
        return n * (n + 1) // 2
    if type_label in ("B", "C"):
        return n * n
    if type_label == "D":
        return n * (n - 1)
    return {("E", 6): 36, ("E", 7): 63, ("E", 8): 120, ("F", 4): 24, ("G", 2): 6}[(type_label, n)]


def cartan_matrix(type_label: str, rank: int) -> Tuple[Tuple[int, ...], ...]:
    validate_type(type_label, rank)
    n = rank
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i: int, j: int, cij: int = -1, cji: int = -1) -> None:
        c[i][j] = cij
        c[j][i] = cji

    if type_label == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif type_label == "B":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -2, -1)
    elif type_label == "C":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -1, -2)
    elif type_label == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif type_label == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif type_label == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif type_label == "G":
        link(0, 1, -1, -3)
    return tuple(tuple(row) for row in c)


def symmetrize(cartan: Sequence[Sequence[int]]) -> Tuple[Tuple[Fraction, ...], ...]:
    """
    Integral Gram matrix (alpha_i, alpha_j) compatible with a Cartan matrix.

    Half-lengths d_j are propagated along the Dynkin diagram from
    cartan[i][j] d_j = cartan[j][i] d_i and then cleared of denominators.
    """
    n = len(cartan)
    d: Dict[int, Fraction] = {0: Fraction(1)}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(n):
            if j == i or cartan[i][j] == 0 or j in d:
                continue
            d[j] = d[i] * Fraction(cartan[j][i], cartan[i][j])
            frontier.append(j)
    if len(d) != n:
        raise RootSystemError("Cartan matrix describes a disconnected (reducible) diagram")
    denominator = reduce(lcm, (v.denominator for v in d.values()), 1)
    gram = tuple(
        tuple(Fraction(cartan[i][j]) * d[j] * denominator for j in range(n)) for i in range(n)
    )
    for i in range(n):
        for j in range(n):
            if gram[i][j] != gram[j][i]:
                raise RootSystemError("Cartan matrix is not symmetrizable")
    return gram


def simple_root(i: int, rank: int) -> Root:
    return Root(tuple(1 if j == i else 0 for j in range(rank)))


def build_root_system(type_label: str, rank: int) -> RootSystem:
    """
    Positive roots by reflection closure of the simple roots.

    Every non-simple positive root is s_i of a positive root of smaller height,
    so closing the simple roots under the simple reflections (keeping only
    positive images) yields the whole positive system.
    """
    cartan = cartan_matrix(type_label, rank)
    shell = RootSystem(type_label, rank, cartan, ())
    simple = shell.simple_roots
    found = set(simple)
    frontier = list(simple)
    while frontier:
        next_frontier = []
        for r in frontier:
            for i in range(rank):
                image = shell.reflect(r, i)
                if image.is_positive() and image not in found:
                    found.add(image)
                    next_frontier.append(image)
        frontier = next_frontier
    roots = tuple(sorted(found, key=lambda r: (r.height, r.coeffs)))
    expected = classical_root_count(type_label, rank)
    if len(roots) != expected:
        raise RootSystemError(
            f"Reflection closure produced {len(roots)} roots for {type_label}{rank}, expected {expected}"
        )
    logger.debug(f"Built {type_label}{rank} with {len(roots)} positive roots")
    return RootSystem(type_label, rank, cartan, roots)


def inner_product(rs: RootSystem, a: Root, b: Root) -> Fraction:
    g = rs.gram
    return sum(
        (a.coeffs[i] * g[i][j] * b.coeffs[j] for i in range(rs.rank) for j in range(rs.rank)),
        Fraction(0),
    )


def highest_root(rs: RootSystem) -> Root:
    """Coefficientwise maximum of the positive roots; must itself be a root"""
    if not rs.positive_roots:
        raise RootSystemError("Empty root system has no highest root")
    top = Root(tuple(max(r.coeffs[i] for r in rs.positive_roots) for i in range(rs.rank)))
    if not rs.is_root(top):
        raise RootSystemError(
            f"{rs.label} is reducible: the coefficientwise maximum {list(top.coeffs)} is not a root"
        )
    return top


def strongly_orthogonal(rs: RootSystem, a: Root, b: Root) -> bool:
    """Neither a+b nor a-b is a root; a root is never strongly orthogonal to itself"""
    if a == b or a == -b:
        return False
    return not rs.is_root(a + b) and not rs.is_root(a - b)


def root_system_to_json(rs: RootSystem) -> Dict[str, Any]:
    return {
        "type": rs.type_label,
        "rank": rs.rank,
        "positive_roots": [list(r.coeffs) for r in rs.positive_roots],
    }


def root_system_from_json(data: Dict[str, Any]) -> RootSystem:
    try:
        type_label = str(data["type"])
        rank = int(data["rank"])
    except (KeyError, TypeError, ValueError) as e:
        raise RootSystemError(f"Malformed root system JSON: {str(e)}")
    rs = build_root_system(type_label, rank)
    if "positive_roots" in data:
        listed = {tuple(int(c) for c in r) for r in data["positive_roots"]}
        if listed != set(rs._members):
            raise RootSystemError(
                f"positive_roots in JSON do not match the {rs.label} system"
            )
    return rs

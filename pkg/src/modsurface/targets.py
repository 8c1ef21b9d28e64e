"""
Shrinking targets B_t on the modular surface.

Every family has a monotone depth score: a point lies in B_t iff its score exceeds
threshold(t), so nested targets for many t are tested with one score per point.
Membership ignores the frame angle; targets are lifted from the modular curve.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.errors import ModularSurfaceError
from src.modsurface.sampling import haar_sample_arrays

logger = logging.getLogger(__name__)

CUSP = "cusp_neighborhood"
BALL = "shrinking_ball"

# hyperbolic area of the fundamental domain
DOMAIN_AREA = math.pi / 3.0
CUSP_CONSTANT = 3.0 / math.pi


def ball_measure(r: float) -> float:
    """Normalized area of an embedded hyperbolic disc of radius r: 4 pi sinh^2(r/2) / (pi/3)"""
    return 12.0 * math.sinh(r / 2.0) ** 2


def ball_inside_domain(center: complex, r: float) -> bool:
    """
    Whether the hyperbolic disc lies in F. The disc is the Euclidean disc with
    centre x0 + i y0 cosh r and radius y0 sinh r.
    """
    x0, y0 = center.real, center.imag
    cy, rad = y0 * math.cosh(r), y0 * math.sinh(r)
    if abs(x0) + rad > 0.5:
        return False
    return math.hypot(x0, cy) - rad >= 1.0


class TargetFamily(ABC):
    kind: str
    varkappa: Optional[float] = None

    @abstractmethod
    def measure(self, t: float) -> float:
        """mu(B_t), strictly decreasing to 0"""

    @abstractmethod
    def t_for_measure(self, mu: float) -> float:
        pass

    @abstractmethod
    def score(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def threshold(self, t: float) -> float:
        pass

    def contains(self, x: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
        return self.score(x, y) > self.threshold(t)

    @property
    def max_measure(self) -> float:
        return self.measure(0.0)

    def to_json(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class CuspTarget(TargetFamily):
    """B_t = {d(x, x0) > t} with d the log height, mu(B_t) = (3/pi) e^{-t}"""
    kind: str = CUSP
    varkappa: float = 1.0

    def measure(self, t: float) -> float:
        if t < 0:
            raise ModularSurfaceError(f"Cusp targets are defined for t >= 0, got {t}")
        return CUSP_CONSTANT * math.exp(-t)

    def t_for_measure(self, mu: float) -> float:
        if not 0 < mu <= CUSP_CONSTANT:
            raise ModularSurfaceError(f"Cusp target measure must lie in (0, 3/pi], got {mu}")
        return math.log(CUSP_CONSTANT / mu)

    def score(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return y

    def threshold(self, t: float) -> float:
        return math.exp(t)


@dataclass(frozen=True)
class BallTarget(TargetFamily):
    """
    B_t = ball of radius r0 e^{-t} around `center`. Distances are taken to every
    Gamma-image of the centre that can come within r0 of F.
    """
    center: complex = complex(0.0, 2.0)
    r0: float = 0.2
    kind: str = BALL
    varkappa: Optional[float] = None
    _images: Tuple[Tuple[float, float], ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.center.imag <= 0 or self.r0 <= 0:
            raise ModularSurfaceError(
                f"Ball target needs a centre in the upper half plane and r0 > 0, got {self.center}, {self.r0}"
            )
        object.__setattr__(self, "_images", tuple(_center_images(self.center, self.r0)))
        logger.debug(f"Ball target at {self.center} with {len(self._images)} centre images")

    @property
    def embedded(self) -> bool:
        return ball_inside_domain(self.center, self.r0)

    def radius(self, t: float) -> float:
        return self.r0 * math.exp(-t)

    def measure(self, t: float) -> float:
        if not self.embedded:
            raise ModularSurfaceError(
                f"Ball of radius {self.r0} at {self.center} overlaps the boundary of the fundamental "
                "domain; its measure needs a Monte Carlo budget"
            )
        return ball_measure(self.radius(t))

    def t_for_measure(self, mu: float) -> float:
        if not 0 < mu <= self.max_measure:
            raise ModularSurfaceError(f"Ball target measure must lie in (0, {self.max_measure:.6g}], got {mu}")
        r = 2.0 * math.asinh(math.sqrt(mu / 12.0))
        return math.log(self.r0 / r)

    def score(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """-min over centre images w of |z - w|^2 / (Im z Im w)"""
        best = np.full(np.shape(x), np.inf)
        for wx, wy in self._images:
            q = ((x - wx) * (x - wx) + (y - wy) * (y - wy)) / (y * wy)
            best = np.minimum(best, q)
        return -best

    def threshold(self, t: float) -> float:
        # d < r iff |z - w|^2 / (Im z Im w) < 4 sinh^2(r/2)
        return -4.0 * math.sinh(self.radius(t) / 2.0) ** 2

    def to_json(self) -> dict:
        return {"kind": self.kind, "center": [self.center.real, self.center.imag], "r0": self.r0}


def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _center_images(z0: complex, r: float) -> List[Tuple[float, float]]:
    """
    Images gamma.z0 lying within hyperbolic distance r of F. Such an image has height
    at least (sqrt(3)/2) e^{-r}, so only the finitely many bottom rows (c, d) with
    |c z0 + d|^2 <= Im z0 / h_min contribute, each up to horizontal translation.
    """
    h_min = math.sqrt(3.0) / 2.0 * math.exp(-r)
    bound = z0.imag / h_min
    images = []
    c_max = int(math.sqrt(bound) / z0.imag) + 1
    for c in range(0, c_max + 1):
        d_lo = int(math.floor(-c * z0.real - math.sqrt(bound))) - 1
        d_hi = int(math.ceil(-c * z0.real + math.sqrt(bound))) + 1
        for d in range(d_lo, d_hi + 1):
            if c == 0 and d != 1:
                continue
            if abs(c * z0 + d) ** 2 > bound or math.gcd(c, d) != 1:
                continue
            g, x, y = _egcd(c, d)
            if g < 0:
                x, y = -x, -y
            # a d - b c = 1 with (a, b) = (y, -x) from x c + y d = 1
            a, b = y, -x
            w = (a * z0 + b) / (c * z0 + d)
            reach = 0.5 + w.imag * math.sinh(r)
            for k in range(int(math.floor(-reach - w.real)), int(math.ceil(reach - w.real)) + 1):
                shifted = w + k
                if abs(shifted.real) <= reach:
                    images.append((shifted.real, shifted.imag))
    return sorted(set(images))


def target_measure(
    fam: TargetFamily,
    t: float,
    rng: Optional[np.random.Generator] = None,
    mc_samples: int = 0,
) -> Tuple[float, float]:
    """(mu(B_t), standard error); the error is 0 for closed forms"""
    if not isinstance(fam, BallTarget) or fam.embedded:
        return fam.measure(t), 0.0
    if rng is None or mc_samples <= 0:
        raise ModularSurfaceError(
            f"Ball at {fam.center} overlaps the domain boundary; pass an rng and mc_samples > 0"
        )
    x, y, _ = haar_sample_arrays(rng, mc_samples)
    inside = fam.contains(x, y, t)
    p = float(np.mean(inside))
    return p, math.sqrt(p * (1.0 - p) / mc_samples)

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.linalg import expm

from src.errors import ModularSurfaceError
from src.liealg.algebra import AlgebraElement
from src.liealg.flows import BOUNDED, FlowDescriptor, classify_flow

logger = logging.getLogger(__name__)

GEODESIC = "geodesic"
HOROCYCLE = "horocycle"
CUSTOM = "custom"
FLOW_SPEC_KINDS = (GEODESIC, HOROCYCLE, CUSTOM)

# largest entry of a single factor multiplied into a representative before reducing
MAX_FACTOR_ENTRY = 1e4


def _max_entry(h: np.ndarray) -> float:
    return float(np.max(np.abs(h)))


def _unimodular(h: np.ndarray, label: str) -> np.ndarray:
    det = h[0] * h[3] - h[1] * h[2]
    if not (np.all(np.isfinite(h)) and math.isfinite(det) and det > 0):
        raise ModularSurfaceError(f"Step matrix for {label} overflows; use a smaller time")
    return h / math.sqrt(det)


@dataclass(frozen=True, eq=False)
class FlowSpec:
    """
    Discrete flow h_m = exp(m * step * X0) acting on the right.

    geodesic:  X0 = diag(1/2, -1/2), so a_t = diag(e^{t/2}, e^{-t/2}) and a_t.i = e^t i
    horocycle: X0 = E_12, so h_m = [[1, m], [0, 1]]
    custom:    any unbounded generator in sl_2
    """
    kind: str
    step: float = 1.0
    generator: Optional[AlgebraElement] = None
    descriptor: Optional[FlowDescriptor] = None
    _cache: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _dyadic: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in FLOW_SPEC_KINDS:
            raise ModularSurfaceError(f"Unknown flow kind '{self.kind}'; expected one of {FLOW_SPEC_KINDS}")
        if not (math.isfinite(self.step) and self.step > 0):
            raise ModularSurfaceError(f"Flow step must be positive, got {self.step}")
        if self.kind == CUSTOM:
            if self.generator is None or self.generator.n != 2:
                raise ModularSurfaceError("A custom flow needs a 2x2 trace-free generator")
            descriptor = classify_flow(self.generator)
            if descriptor.kind == BOUNDED:
                raise ModularSurfaceError("Custom flow generator is bounded (elliptic); it does not mix")
            object.__setattr__(self, "descriptor", descriptor)

    @classmethod
    def geodesic(cls, step: float = 1.0) -> "FlowSpec":
        return cls(GEODESIC, step)

    @classmethod
    def horocycle(cls, step: float = 1.0) -> "FlowSpec":
        return cls(HOROCYCLE, step)

    @classmethod
    def custom(cls, generator: AlgebraElement, step: float = 1.0) -> "FlowSpec":
        return cls(CUSTOM, step, generator)

    def step_matrix(self, m: int = 1) -> np.ndarray:
        """h_m as a length-4 array (a, b, c, d)"""
        if m < 0:
            raise ModularSurfaceError(f"Flow time must be nonnegative, got {m}")
        if m not in self._cache:
            self._cache[m] = self._compute(m)
        return self._cache[m]

    def dyadic_matrix(self, k: int) -> np.ndarray:
        """h_{2^k}, squared up from h_1 with det renormalized to 1 after each squaring"""
        if k < 0:
            raise ModularSurfaceError(f"Dyadic exponent must be nonnegative, got {k}")
        if k not in self._dyadic:
            if k == 0:
                self._dyadic[0] = self.step_matrix(1)
            else:
                p, q, r, s = self.dyadic_matrix(k - 1)
                square = np.array([p * p + q * r, p * q + q * s, r * p + s * r, r * q + s * s])
                self._dyadic[k] = _unimodular(square, f"2^{k} steps")
        return self._dyadic[k]

    def factorize(self, m: int) -> List[int]:
        """
        Exponents k, largest first, with sum(2^k) = m. Powers whose matrix entries
        would exceed MAX_FACTOR_ENTRY are split into repeats of the largest one that does not.
        """
        if m < 0:
            raise ModularSurfaceError(f"Flow time must be nonnegative, got {m}")
        cap = 0
        while (
            _max_entry(self.dyadic_matrix(cap)) <= MAX_FACTOR_ENTRY
            and (1 << (cap + 1)) <= m
            and _max_entry(self.dyadic_matrix(cap + 1)) <= MAX_FACTOR_ENTRY
        ):
            cap += 1
        exponents: List[int] = []
        for k in range(m.bit_length() - 1, -1, -1):
            if (m >> k) & 1:
                if k <= cap:
                    exponents.append(k)
                else:
                    exponents.extend([cap] * (1 << (k - cap)))
        return exponents

    def _compute(self, m: int) -> np.ndarray:
        t = m * self.step
        try:
            if self.kind == HOROCYCLE:
                h = np.array([1.0, t, 0.0, 1.0])
            elif self.kind == GEODESIC:
                h = np.array([math.exp(t / 2.0), 0.0, 0.0, math.exp(-t / 2.0)])
            else:
                h = expm(t * self.generator.entries).reshape(4)
        except (OverflowError, FloatingPointError) as e:
            raise ModularSurfaceError(f"Step matrix for t = {t:g} overflows: {str(e)}")
        if self.kind == CUSTOM:
            return _unimodular(h, f"t = {t:g}")
        if not np.all(np.isfinite(h)):
            raise ModularSurfaceError(f"Step matrix for t = {t:g} overflows; use a smaller time")
        return h

    def to_json(self) -> dict:
        data = {"kind": self.kind, "step": self.step}
        if self.generator is not None:
            data["generator"] = self.generator.to_json()
        return data

import logging
from typing import Sequence, Tuple

import numpy as np

from src.errors import ModularSurfaceError
from src.modsurface.flows import FlowSpec
from src.modsurface.group import MAX_REP_ENTRY, CosetPoint, frame_angle, reduce_arrays, upper_half_coords

logger = logging.getLogger(__name__)

RENORMALIZE_EVERY = 1000


class OrbitBatch:
    """
    Reduced representatives of many points, advanced together along a flow.

    Evolution uses only +, -, *, / and sqrt, which are exactly rounded, so the
    orbit of a point does not depend on which other points share its batch.
    """

    def __init__(self, reps: np.ndarray):
        reps = np.array(reps, dtype=float)
        if reps.ndim != 2 or reps.shape[1] != 4:
            raise ModularSurfaceError(f"Expected representatives of shape (P, 4), got {reps.shape}")
        self.a = reps[:, 0].copy()
        self.b = reps[:, 1].copy()
        self.c = reps[:, 2].copy()
        self.d = reps[:, 3].copy()
        self.steps_taken = 0
        reduce_arrays(self.a, self.b, self.c, self.d)

    @classmethod
    def from_points(cls, points: Sequence[CosetPoint]) -> "OrbitBatch":
        if not points:
            raise ModularSurfaceError("An orbit batch needs at least one point")
        return cls(np.array([p.rep for p in points]))

    def __len__(self) -> int:
        return self.a.shape[0]

    def coords(self) -> Tuple[np.ndarray, np.ndarray]:
        return upper_half_coords(self.a, self.b, self.c, self.d)

    def heights(self) -> np.ndarray:
        return 1.0 / (self.c * self.c + self.d * self.d)

    def thetas(self) -> np.ndarray:
        return frame_angle(self.c, self.d)

    def apply(self, h: np.ndarray) -> None:
        """Right-multiply every representative by h = (p, q, r, s) and reduce"""
        p, q, r, s = h
        a, b, c, d = self.a, self.b, self.c, self.d
        self.a, self.b = a * p + b * r, a * q + b * s
        self.c, self.d = c * p + d * r, c * q + d * s
        for entries in (self.a, self.b, self.c, self.d):
            if not np.all(np.abs(entries) <= MAX_REP_ENTRY):
                raise ModularSurfaceError(
                    f"Orbit overflow after {self.steps_taken} steps; representatives exceed {MAX_REP_ENTRY:g}"
                )
        reduce_arrays(self.a, self.b, self.c, self.d)

    def advance(self, flow: FlowSpec, m: int = 1) -> None:
        """m flow steps, applied as the dyadic factors of m"""
        if m == 1:
            self.apply(flow.step_matrix(1))
        else:
            for k in flow.factorize(m):
                self.apply(flow.dyadic_matrix(k))
        previous = self.steps_taken
        self.steps_taken += m
        if self.steps_taken // RENORMALIZE_EVERY != previous // RENORMALIZE_EVERY:
            self.renormalize()

    def renormalize(self) -> None:
        det = self.a * self.d - self.b * self.c
        if not np.all(det > 0):
            raise ModularSurfaceError("Orbit representatives degenerated beyond renormalization")
        scale = np.sqrt(det)
        self.a, self.b, self.c, self.d = self.a / scale, self.b / scale, self.c / scale, self.d / scale

    def reps(self) -> np.ndarray:
        return np.column_stack([self.a, self.b, self.c, self.d])

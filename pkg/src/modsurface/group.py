"""
Points of SL_2(Z)\\SL_2(R) and their reduction to the standard fundamental domain

  F = {|Re z| <= 1/2, |z| >= 1}

with the left edge (Re z = -1/2) and the left half of the arc kept, so reduction is
a function. g acts on the upper half plane by z -> (az + b)/(cz + d) and the coset
Gamma g is represented by g.i together with the frame angle theta = -arg(ci + d) mod pi.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.errors import ModularSurfaceError

logger = logging.getLogger(__name__)

DET_TOL = 1e-10
MAX_REDUCTION_STEPS = 10_000
# representatives beyond this overflow when squared during reduction
MAX_REP_ENTRY = 1e150

IntMatrix = Tuple[Tuple[int, int], Tuple[int, int]]
IDENTITY: IntMatrix = ((1, 0), (0, 1))


@dataclass(frozen=True)
class GroupElement:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        entries = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(float(v)) for v in entries):
            raise ModularSurfaceError(f"Group element entries must be finite: {entries}")
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > DET_TOL:
            raise ModularSurfaceError(f"Group element is not unimodular: det = {det!r}")

    @classmethod
    def from_matrix(cls, m) -> "GroupElement":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ModularSurfaceError(f"Expected a 2x2 matrix, got shape {m.shape}")
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @classmethod
    def from_point(cls, z: complex, theta: float = 0.0) -> "GroupElement":
        """n(x) a(y) k(theta), a lift of z with frame angle theta"""
        x, y = z.real, z.imag
        if y <= 0:
            raise ModularSurfaceError(f"Point must lie in the upper half plane, got {z}")
        s = math.sqrt(y)
        cos, sin = math.cos(theta), math.sin(theta)
        a, b, d = s, x / s, 1.0 / s
        return cls(a * cos - b * sin, a * sin + b * cos, -d * sin, d * cos)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def act(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)


@dataclass(frozen=True)
class CosetPoint:
    """
    Reduced point: z in F, frame angle in [0, pi), the integer matrix gamma
    with gamma . lift = rep, and the reduced representative rep itself.
    """
    z: complex
    theta: float
    witness: IntMatrix
    rep: Tuple[float, float, float, float]

    @property
    def height(self) -> float:
        return self.z.imag

    def rep_element(self) -> GroupElement:
        a, b, c, d = self.rep
        return GroupElement(a, b, c, d)

    def to_json(self) -> Dict[str, Any]:
        return {
            "z_re": self.z.real,
            "z_im": self.z.imag,
            "theta": self.theta,
            "witness": [list(row) for row in self.witness],
        }


def mat_mul_int(g: IntMatrix, h: IntMatrix) -> IntMatrix:
    return (
        (g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
        (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]),
    )


def upper_half_coords(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(Re, Im) of g.i; Im uses det = 1"""
    den = c * c + d * d
    return (a * c + b * d) / den, 1.0 / den


def frame_angle(c: np.ndarray, d: np.ndarray) -> np.ndarray:
    return np.mod(-np.arctan2(c, d), np.pi)


def reduce_arrays(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    d: np.ndarray,
    witness: Optional[np.ndarray] = None,
) -> int:
    """
    Reduce representatives in place. Each element goes through the same sequence
    of exactly rounded operations whatever else is in the arrays.

    `witness`, when given, is an object array of shape (P, 4) of Python ints that
    receives the same left multiplications. Returns the number of sweeps.
    """
    active = np.arange(a.shape[0])
    sweeps = 0
    while active.size:
        sweeps += 1
        if sweeps > MAX_REDUCTION_STEPS:
            raise ModularSurfaceError(
                f"Reduction did not terminate after {MAX_REDUCTION_STEPS} steps; input is degenerate"
            )
        A, B, C, D = a[active], b[active], c[active], d[active]
        den = C * C + D * D
        n = np.rint((A * C + B * D) / den)
        A = A - n * C
        B = B - n * D
        flip = A * A + B * B < den
        a[active] = np.where(flip, -C, A)
        b[active] = np.where(flip, -D, B)
        c[active] = np.where(flip, A, C)
        d[active] = np.where(flip, B, D)
        if witness is not None:
            _witness_step(witness, active, n, flip)
        active = active[flip]

    x, _ = upper_half_coords(a, b, c, d)
    for idx, shift in ((np.nonzero(x >= 0.5)[0], 1.0), (np.nonzero(x < -0.5)[0], -1.0)):
        if idx.size:
            a[idx] = a[idx] - shift * c[idx]
            b[idx] = b[idx] - shift * d[idx]
            if witness is not None:
                _witness_step(witness, idx, np.full(idx.size, shift), np.zeros(idx.size, dtype=bool))
    x, _ = upper_half_coords(a, b, c, d)
    arc = np.nonzero((a * a + b * b == c * c + d * d) & (x > 0))[0]
    if arc.size:
        A, B = a[arc].copy(), b[arc].copy()
        a[arc], b[arc], c[arc], d[arc] = -c[arc], -d[arc], A, B
        if witness is not None:
            _witness_step(witness, arc, np.zeros(arc.size), np.ones(arc.size, dtype=bool))
    return sweeps


def _witness_step(witness: np.ndarray, rows: np.ndarray, n: np.ndarray, flip: np.ndarray) -> None:
    for row, shift, s in zip(rows, n, flip):
        wa, wb, wc, wd = witness[row]
        k = int(shift)
        wa, wb = wa - k * wc, wb - k * wd
        if s:
            wa, wb, wc, wd = -wc, -wd, wa, wb
        witness[row] = [wa, wb, wc, wd]


def reduce(g: GroupElement) -> CosetPoint:
    return reduce_entries(g.a, g.b, g.c, g.d)


def reduce_entries(a: float, b: float, c: float, d: float) -> CosetPoint:
    """reduce() for raw entries of det 1 up to rounding, skipping the unimodularity check"""
    a = np.array([a], dtype=float)
    b = np.array([b], dtype=float)
    c = np.array([c], dtype=float)
    d = np.array([d], dtype=float)
    witness = np.empty((1, 4), dtype=object)
    witness[0] = [1, 0, 0, 1]
    sweeps = reduce_arrays(a, b, c, d, witness)
    logger.debug(f"Reduced in {sweeps} sweeps")
    return _point_from_arrays(a[0], b[0], c[0], d[0], tuple(int(v) for v in witness[0]))


def _point_from_arrays(a: float, b: float, c: float, d: float, witness: Tuple[int, int, int, int]) -> CosetPoint:
    x, y = upper_half_coords(a, b, c, d)
    theta = float(frame_angle(np.float64(c), np.float64(d)))
    wa, wb, wc, wd = witness
    return CosetPoint(
        z=complex(float(x), float(y)),
        theta=theta,
        witness=((wa, wb), (wc, wd)),
        rep=(float(a), float(b), float(c), float(d)),
    )


def point_from_json(data: Dict[str, Any]) -> CosetPoint:
    """Rebuilds the point from z and theta; the witness is carried over as given"""
    try:
        z = complex(float(data["z_re"]), float(data["z_im"]))
        theta = float(data.get("theta", 0.0))
        witness = data.get("witness", [[1, 0], [0, 1]])
        w = ((int(witness[0][0]), int(witness[0][1])), (int(witness[1][0]), int(witness[1][1])))
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise ModularSurfaceError(f"Malformed point JSON: {str(e)}")
    g = GroupElement.from_point(z, theta)
    point = reduce(g)
    return CosetPoint(point.z, point.theta, w, point.rep)


def hyperbolic_distance(z: complex, w: complex) -> float:
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))

import logging
import math
from typing import Optional

import numpy as np
import pandas as pd

from src.errors import ModularSurfaceError
from src.modsurface.batch import OrbitBatch
from src.modsurface.flows import FlowSpec
from src.modsurface.group import (
    MAX_REP_ENTRY,
    CosetPoint,
    mat_mul_int,
    reduce_entries,
)
from src.modsurface.targets import TargetFamily

logger = logging.getLogger(__name__)


def cusp_distance(x: CosetPoint) -> float:
    """max(0, log Im z) of the reduced representative"""
    return max(0.0, math.log(x.z.imag))


def flow_step(x: CosetPoint, flow: FlowSpec, m: int) -> CosetPoint:
    """
    x h_m, reduced. h_m is applied as its dyadic factors h_{2^k}, reducing and
    renormalizing after each one, so entries stay bounded along returning orbits.
    """
    if m < 0:
        raise ModularSurfaceError(f"Flow time must be nonnegative, got {m}")
    if m == 0:
        return x
    point = x
    done = 0
    for k in flow.factorize(m):
        done += 1 << k
        point = _right_multiply(point, flow.dyadic_matrix(k), done)
    return point


def _right_multiply(x: CosetPoint, h: np.ndarray, m: int) -> CosetPoint:
    p, q, r, s = h
    a, b, c, d = x.rep
    entries = (a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)
    if not all(abs(v) <= MAX_REP_ENTRY for v in entries):
        raise ModularSurfaceError(f"Orbit overflow at m = {m}; entries exceed {MAX_REP_ENTRY:g}")
    # taken from the factors, whose entries are far smaller than the product's
    det = (a * d - b * c) * (p * s - q * r)
    if not det > 0:
        raise ModularSurfaceError(f"Orbit representative degenerated at m = {m} (det = {det!r})")
    scale = math.sqrt(det)
    reduced = reduce_entries(*(v / scale for v in entries))
    return CosetPoint(reduced.z, reduced.theta, mat_mul_int(reduced.witness, x.witness), reduced.rep)


def hit(x: CosetPoint, fam: TargetFamily, t: float, m: int, flow: FlowSpec) -> bool:
    """Whether x h_m lies in B_t"""
    y = flow_step(x, flow, m)
    return bool(fam.contains(np.array([y.z.real]), np.array([y.z.imag]), t)[0])


def hitting_time(
    x: CosetPoint, fam: TargetFamily, t: float, flow: FlowSpec, i: int, m_max: int
) -> Optional[int]:
    """
    Smallest m with exactly i hits of B_t among x h_1, ..., x h_m; None when the
    budget m_max is exhausted first.
    """
    if i < 1:
        raise ModularSurfaceError(f"Hit index must be >= 1, got {i}")
    batch = OrbitBatch.from_points([x])
    threshold = fam.threshold(t)
    hits = 0
    for m in range(1, m_max + 1):
        batch.advance(flow)
        zx, zy = batch.coords()
        if fam.score(zx, zy)[0] > threshold:
            hits += 1
            if hits == i:
                return m
    return None


def orbit_dump(x: CosetPoint, flow: FlowSpec, m_max: int) -> pd.DataFrame:
    """Columns m, z_re, z_im, cusp_distance for m = 0..m_max"""
    batch = OrbitBatch.from_points([x])
    rows = []
    for m in range(m_max + 1):
        if m:
            batch.advance(flow)
        zx, zy = batch.coords()
        rows.append({
            "m": m,
            "z_re": float(zx[0]),
            "z_im": float(zy[0]),
            "cusp_distance": max(0.0, math.log(float(zy[0]))),
        })
    logger.info(f"Dumped orbit of {m_max} steps along the {flow.kind} flow")
    return pd.DataFrame(rows, columns=["m", "z_re", "z_im", "cusp_distance"])

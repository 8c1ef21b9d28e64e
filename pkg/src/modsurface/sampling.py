"""Haar measure on SL_2(Z)\\SL_2(R): (3/pi) dx dy / y^2 on F times the uniform frame angle."""

import math
from typing import Tuple

import numpy as np

from src.modsurface.group import CosetPoint, GroupElement, reduce

Y_MIN = math.sqrt(3.0) / 2.0


def haar_sample(rng: np.random.Generator) -> CosetPoint:
    """
    Rejection sampler: x uniform on [-1/2, 1/2], y from the density proportional to
    1/y^2 on [sqrt(3)/2, oo) by inverse CDF, rejecting |z| < 1.
    """
    while True:
        x = rng.random() - 0.5
        y = Y_MIN / (1.0 - rng.random())
        if x * x + y * y >= 1.0:
            break
    theta = rng.random() * math.pi
    return reduce(GroupElement.from_point(complex(x, y), theta))


def haar_sample_arrays(rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised sampler returning (x, y, theta) arrays of length `size`"""
    xs, ys = [], []
    remaining = size
    while remaining > 0:
        # about 91% of the strip lies in F
        n = int(remaining * 1.1) + 16
        x = rng.random(n) - 0.5
        y = Y_MIN / (1.0 - rng.random(n))
        keep = x * x + y * y >= 1.0
        xs.append(x[keep][:remaining])
        ys.append(y[keep][:remaining])
        remaining -= xs[-1].size
    theta = rng.random(size) * math.pi
    return np.concatenate(xs), np.concatenate(ys), theta

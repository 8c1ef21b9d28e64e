import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm, svdvals

from src.errors import AlgebraError
from src.liealg.algebra import DEFAULT_TOL, AlgebraElement, ad_matrix, lie_bracket, nilpotency_degree

logger = logging.getLogger(__name__)

QUASI_UNIPOTENT = "quasi_unipotent"
QUASI_DIAGONALIZABLE = "quasi_diagonalizable"
BOUNDED = "bounded"
FLOW_KINDS = (QUASI_UNIPOTENT, QUASI_DIAGONALIZABLE, BOUNDED)

# log of the largest double below overflow, with headroom for polynomial factors
MAX_LOG_GROWTH = 700.0


@dataclass(frozen=True, eq=False)
class JordanSplit:
    """X = X_nil + X_hyp + X_ell with pairwise commuting parts"""
    nil: np.ndarray
    hyp: np.ndarray
    ell: np.ndarray

    def reconstruction_error(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x - (self.nil + self.hyp + self.ell)))

    def max_commutator(self) -> float:
        pairs = [(self.nil, self.hyp), (self.nil, self.ell), (self.hyp, self.ell)]
        return max(float(np.linalg.norm(lie_bracket(a, b))) for a, b in pairs)


@dataclass(frozen=True, eq=False)
class FlowDescriptor:
    """
    Class of the one-parameter flow exp(tX).

    `generator` is None for symbolic descriptors (flows given only by their class,
    e.g. factors of groups that are not built numerically).
    """
    kind: str
    degree: Optional[int] = None
    generator: Optional[AlgebraElement] = None
    split: Optional[JordanSplit] = None

    def __post_init__(self):
        if self.kind not in FLOW_KINDS:
            raise AlgebraError(f"Unknown flow kind '{self.kind}'; expected one of {FLOW_KINDS}")
        if self.kind == QUASI_UNIPOTENT:
            if self.degree is None or int(self.degree) < 2:
                raise AlgebraError(
                    f"A quasi-unipotent flow needs an ad-nilpotency degree l >= 2, got {self.degree}"
                )
        elif self.degree is not None:
            raise AlgebraError(f"Only quasi-unipotent flows carry a degree, not {self.kind}")

    @classmethod
    def symbolic(cls, kind: str, degree: Optional[int] = None) -> "FlowDescriptor":
        return cls(kind=kind, degree=degree)

    @property
    def unbounded(self) -> bool:
        return self.kind != BOUNDED

    def to_json(self) -> dict:
        data = {"kind": self.kind}
        if self.degree is not None:
            data["l"] = int(self.degree)
        if self.generator is not None:
            data["generator"] = self.generator.to_json()
        return data


def _cluster_eigenvalues(eigenvalues: np.ndarray, radius: float) -> List[complex]:
    """Greedy clustering; returns the cluster means"""
    clusters: List[List[complex]] = []
    for ev in sorted(eigenvalues, key=lambda z: (z.real, z.imag)):
        for members in clusters:
            if abs(ev - np.mean(members)) <= radius:
                members.append(ev)
                break
        else:
            clusters.append([ev])
    return [complex(np.mean(members)) for members in clusters]


def _poly_products(s: np.ndarray, centers: Sequence[complex]) -> Tuple[np.ndarray, np.ndarray]:
    """q(S) and q'(S) for q(x) = prod_c (x - c)"""
    n = s.shape[0]
    eye = np.eye(n, dtype=complex)
    factors = [s - c * eye for c in centers]
    q = eye.copy()
    for f in factors:
        q = q @ f
    dq = np.zeros((n, n), dtype=complex)
    for k in range(len(factors)):
        term = eye.copy()
        for m, f in enumerate(factors):
            if m != k:
                term = term @ f
        dq = dq + term
    return q, dq


def jordan_split(x: AlgebraElement, tol: float = DEFAULT_TOL) -> JordanSplit:
    """
    Additive Jordan decomposition of X into nilpotent, hyperbolic and elliptic parts.

    The semisimple part is the limit of the Newton iteration S <- S - q(S) q'(S)^{-1},
    S_0 = X, where q has the (clustered) distinct eigenvalues of X as simple roots.
    The semisimple part is then split through its spectral projectors into the
    real-eigenvalue and imaginary-eigenvalue summands.
    """
    m = x.entries
    n = x.n
    scale = max(1.0, x.norm())
    radius = max(tol, tol ** (1.0 / n)) * scale
    centers = _cluster_eigenvalues(np.linalg.eigvals(m), radius)

    s = m.astype(complex)
    for iteration in range(64):
        q, dq = _poly_products(s, centers)
        condition = float(np.linalg.cond(dq))
        if not np.isfinite(condition) or condition > 1.0 / tol:
            raise AlgebraError(
                f"Eigenstructure too ill-conditioned for a Jordan split (condition {condition:.3e})",
                condition=condition,
            )
        delta = np.linalg.solve(dq, q)
        s = s - delta
        if np.linalg.norm(delta) <= 1e-15 * scale:
            break
    logger.debug(f"Semisimple iteration converged after {iteration + 1} steps, {len(centers)} clusters")

    eye = np.eye(n, dtype=complex)
    hyp = np.zeros((n, n), dtype=complex)
    for k, c in enumerate(centers):
        projector = eye.copy()
        for m_idx, d in enumerate(centers):
            if m_idx != k:
                projector = projector @ (s - d * eye) / (c - d)
        hyp = hyp + c.real * projector

    semisimple = _clean(s.real, tol * scale)
    hyp_part = _clean(hyp.real, tol * scale)
    ell_part = _clean(semisimple - hyp_part, tol * scale)
    nil_part = _clean(m - semisimple, tol * scale)
    return JordanSplit(nil=nil_part, hyp=hyp_part, ell=ell_part)


def _clean(a: np.ndarray, threshold: float) -> np.ndarray:
    out = np.array(a, dtype=float)
    out[np.abs(out) <= threshold] = 0.0
    return out


def classify_flow(x: AlgebraElement, tol: float = DEFAULT_TOL) -> FlowDescriptor:
    split = jordan_split(x, tol)
    scale = max(1.0, x.norm())
    if np.linalg.norm(split.hyp) > tol * scale:
        return FlowDescriptor(QUASI_DIAGONALIZABLE, generator=x, split=split)
    if np.linalg.norm(split.nil) > tol * scale:
        degree = nilpotency_degree(ad_matrix(AlgebraElement(split.nil)), tol)
        return FlowDescriptor(QUASI_UNIPOTENT, degree=degree, generator=x, split=split)
    return FlowDescriptor(BOUNDED, generator=x, split=split)


def lambda1_profile(
    x: AlgebraElement, t_grid: Sequence[float], workers: int = 1
) -> List[Tuple[float, float]]:
    """
    (t, lambda_1(X(t))) with lambda_1 = log of the largest singular value of
    Ad(exp(tX)) = exp(t ad X).
    """
    grid = [float(t) for t in t_grid]
    if not grid or grid[0] <= 0 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise AlgebraError("t_grid must be positive and strictly increasing")
    ad = ad_matrix(x).entries
    growth = float(np.max(np.abs(np.linalg.eigvals(ad).real)))
    if growth > 0 and grid[-1] * growth > MAX_LOG_GROWTH:
        max_t = MAX_LOG_GROWTH / growth
        raise AlgebraError(
            f"exp(t ad X) overflows for t = {grid[-1]:g}; largest admissible t is {max_t:.4g}",
            max_t=max_t,
        )

    def point(t: float) -> Tuple[float, float]:
        return t, float(np.log(svdvals(expm(t * ad))[0]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, grid))
    return [point(t) for t in grid]


def fit_growth_slope(profile: Sequence[Tuple[float, float]], scale: str = "log") -> Tuple[float, float]:
    """
    Least-squares (slope, intercept) of lambda_1 against log t ("log", polynomial
    growth: slope ~ l) or against t ("linear", exponential growth: slope ~ c).
    """
    if len(profile) < 2:
        raise AlgebraError("Need at least two profile points to fit a slope")
    t = np.array([p[0] for p in profile])
    y = np.array([p[1] for p in profile])
    if scale == "log":
        xs = np.log(t)
    elif scale == "linear":
        xs = t
    else:
        raise AlgebraError(f"Unknown fit scale '{scale}'")
    slope, intercept = np.polyfit(xs, y, 1)
    return float(slope), float(intercept)

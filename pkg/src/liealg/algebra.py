"""
Matrix Lie algebra sl_n: the fixed basis, coordinates, adjoint operators.

Basis order for sl_n (N = n^2 - 1 elements):
  1. E_ij for i < j, lexicographic in (i, j)
  2. H_k = E_kk - E_{k+1,k+1}, k = 1..n-1
  3. E_ji for i < j, in the same (i, j) order as block 1
For sl_2 this is (E_12, H, E_21).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import AlgebraError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Trace-zero real n x n matrix, an element of sl_n"""
    entries: np.ndarray
    algebra_tag: str = "sl_n"

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise AlgebraError(f"Expected a square matrix of size >= 2, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise AlgebraError("Matrix entries must be finite")
        scale = max(1.0, float(np.linalg.norm(m)))
        if abs(np.trace(m)) > DEFAULT_TOL * scale:
            raise AlgebraError(f"Element of sl_n must be trace-free, trace = {np.trace(m):.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_json(cls, data: Union[Sequence[Sequence[float]], dict]) -> "AlgebraElement":
        rows = data.get("matrix") if isinstance(data, dict) else data
        try:
            return cls(np.array(rows, dtype=float))
        except (TypeError, ValueError) as e:
            raise AlgebraError(f"Matrix must be a JSON array of arrays of numbers: {str(e)}")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def dim(self) -> int:
        return self.n * self.n - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def is_integral(self) -> bool:
        return bool(np.all(self.entries == np.round(self.entries)))

    def to_json(self) -> List[List[float]]:
        return [[_plain_number(x) for x in row] for row in self.entries]


@dataclass(frozen=True, eq=False)
class AdOperator:
    """Matrix of ad(X) (or Ad(g)) in the fixed basis of sl_n"""
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_integral(self) -> bool:
        return bool(np.all(self.entries == np.round(self.entries)))


def _plain_number(x: float) -> Union[int, float]:
    return int(x) if float(x).is_integer() else float(x)


def elementary(i: int, j: int, n: int) -> np.ndarray:
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


@lru_cache(maxsize=None)
def _basis_index(n: int) -> Tuple[Tuple[Tuple[int, int], ...], int]:
    upper = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    return upper, n - 1


def sl_basis(n: int) -> List[np.ndarray]:
    upper, n_cartan = _basis_index(n)
    basis = [elementary(i, j, n) for i, j in upper]
    basis += [elementary(k, k, n) - elementary(k + 1, k + 1, n) for k in range(n_cartan)]
    basis += [elementary(j, i, n) for i, j in upper]
    return basis


def to_coordinates(y: np.ndarray) -> np.ndarray:
    """Coordinates of a trace-free matrix in the fixed basis"""
    n = y.shape[0]
    upper, n_cartan = _basis_index(n)
    diag_partial = np.cumsum(np.diag(y))[:n_cartan]
    return np.concatenate([
        np.array([y[i, j] for i, j in upper]),
        diag_partial,
        np.array([y[j, i] for i, j in upper]),
    ])


def from_coordinates(c: np.ndarray, n: int) -> np.ndarray:
    basis = sl_basis(n)
    return sum((ck * b for ck, b in zip(c, basis)), np.zeros((n, n)))


def lie_bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def ad_matrix(x: AlgebraElement) -> AdOperator:
    """Matrix of Y -> XY - YX; column k is the bracket with the k-th basis element"""
    columns = [to_coordinates(lie_bracket(x.entries, b)) for b in sl_basis(x.n)]
    return AdOperator(np.column_stack(columns))


def adjoint_action(g: np.ndarray) -> AdOperator:
    """Matrix of Y -> g Y g^{-1}, computed by conjugation"""
    g = np.asarray(g, dtype=float)
    g_inv = np.linalg.inv(g)
    columns = [to_coordinates(g @ b @ g_inv) for b in sl_basis(g.shape[0])]
    return AdOperator(np.column_stack(columns))


def hs_norm(op: AdOperator) -> float:
    """Hilbert-Schmidt norm sqrt(tr(A^t A))"""
    return float(np.linalg.norm(op.entries, "fro"))


def _dyadic_integers(a: np.ndarray, max_shift: int = 32) -> Optional[np.ndarray]:
    """a * 2^k as an object array of Python ints for the smallest k <= max_shift, else None"""
    for shift in range(max_shift + 1):
        scaled = a * float(2 ** shift)
        if np.all(scaled == np.round(scaled)) and np.all(np.abs(scaled) < 2.0 ** 53):
            return np.array([[int(v) for v in row] for row in scaled], dtype=object)
    return None


def nilpotency_degree(op: AdOperator, tol: float = DEFAULT_TOL) -> int:
    """
    Largest l with A^l != 0 (so A^{l+1} = 0).

    Matrices with dyadic entries (integers up to a power of two) are powered
    exactly. Otherwise A must have spectral radius below max(tol, eps^(1/N)) ||A||,
    eps^(1/N) being how far rounding alone moves the eigenvalues of an N x N
    nilpotent, and A^k counts as nonzero iff ||A^k|| > tol * ||A||^k.
    """
    a = op.entries
    size = op.dim
    if not np.any(a):
        raise AlgebraError("Nilpotency degree is undefined for the zero operator")
    scaled = _dyadic_integers(a)
    if scaled is not None:
        power = scaled
        degree = 0
        while np.any(power != 0):
            degree += 1
            if degree > size:
                raise AlgebraError("Operator is not nilpotent (exact powers never vanish)")
            power = power.dot(scaled)
        return degree
    norm = np.linalg.norm(a, 2)
    radius = float(np.max(np.abs(np.linalg.eigvals(a))))
    bound = max(tol, np.finfo(float).eps ** (1.0 / size)) * norm
    if radius > bound:
        raise AlgebraError(
            f"Operator is not nilpotent: spectral radius {radius:.3e} exceeds {bound:.3e}"
        )
    normed = a / norm
    power = normed
    degree = 0
    while np.linalg.norm(power, 2) > tol:
        degree += 1
        if degree > size:
            raise AlgebraError(
                f"Operator is not nilpotent: powers stay above tol (spectral radius {radius:.3e})"
            )
        power = power @ normed
    logger.debug(f"Float nilpotency degree {degree} for operator of size {size}")
    return degree

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm, svdvals

from src.errors import AlgebraError
from src.liealg import (
    BOUNDED,
    QUASI_DIAGONALIZABLE,
    QUASI_UNIPOTENT,
    AdOperator,
    AlgebraElement,
    FlowDescriptor,
    ad_matrix,
    adjoint_action,
    classify_flow,
    fit_growth_slope,
    from_coordinates,
    hs_norm,
    jordan_split,
    lambda1_profile,
    lie_bracket,
    nilpotency_degree,
    sl_basis,
    to_coordinates,
)
from src.liealg.algebra import elementary

E12 = elementary(0, 1, 2)
H = np.diag([1.0, -1.0])
ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]])
E13 = elementary(0, 2, 3)
PRINCIPAL_SL3 = 2 * (elementary(0, 1, 3) + elementary(1, 2, 3))
PRINCIPAL_SL4 = elementary(0, 1, 4) + elementary(1, 2, 4) + elementary(2, 3, 4)


def random_sl(rng, n):
    m = rng.normal(size=(n, n))
    return m - np.trace(m) / n * np.eye(n)


def test_algebra_element_validation():
    with pytest.raises(AlgebraError, match="trace-free"):
        AlgebraElement(np.eye(2))
    with pytest.raises(AlgebraError):
        AlgebraElement(np.zeros((2, 3)))
    with pytest.raises(AlgebraError):
        AlgebraElement([[np.nan, 0], [0, 0]])
    with pytest.raises(AlgebraError):
        AlgebraElement.from_json([["a", 0], [0, 0]])


def test_from_json_accepts_matrix_key_and_integers():
    x = AlgebraElement.from_json({"matrix": [[0, 2, 0], [0, 0, 2], [0, 0, 0]]})
    assert x.n == 3 and x.dim == 8
    assert x.is_integral()
    assert x.to_json() == [[0, 2, 0], [0, 0, 2], [0, 0, 0]]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_coordinates_roundtrip_basis(n):
    basis = sl_basis(n)
    assert len(basis) == n * n - 1
    for k, b in enumerate(basis):
        coords = to_coordinates(b)
        expected = np.zeros(n * n - 1)
        expected[k] = 1.0
        assert_allclose(coords, expected)
    y = random_sl(np.random.default_rng(n), n)
    assert_allclose(from_coordinates(to_coordinates(y), n), y, atol=1e-12)


def test_ad_matrix_of_e12_in_sl2():
    ad = ad_matrix(AlgebraElement(E12)).entries
    assert_allclose(ad[:, 0], [0, 0, 0])
    assert_allclose(ad[:, 1], [-2, 0, 0])
    assert_allclose(ad[:, 2], [0, 1, 0])


def test_ad_matrix_of_zero_is_zero():
    assert not np.any(ad_matrix(AlgebraElement(np.zeros((3, 3)))).entries)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ad_matrix_reproduces_brackets(n, rng):
    x = random_sl(rng, n)
    ad = ad_matrix(AlgebraElement(x)).entries
    for y in sl_basis(n):
        assert_allclose(ad @ to_coordinates(y), to_coordinates(lie_bracket(x, y)), atol=1e-10)


def test_e13_ad_powers():
    ad = ad_matrix(AlgebraElement(E13)).entries
    assert np.any(ad @ ad)
    assert not np.any(ad @ ad @ ad)


@pytest.mark.parametrize("x,degree", [
    (E13, 2),
    (PRINCIPAL_SL3, 4),
    (E12, 2),
    (PRINCIPAL_SL4, 6),
])
def test_nilpotency_degree_exact(x, degree):
    assert nilpotency_degree(ad_matrix(AlgebraElement(x))) == degree


def test_nilpotency_degree_float_path(rng):
    # conjugating by a random matrix destroys integrality but not the degree
    g = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    x = g @ PRINCIPAL_SL3 @ np.linalg.inv(g)
    op = ad_matrix(AlgebraElement(x))
    assert not op.is_integral()
    assert nilpotency_degree(op) == 4


def test_nilpotency_degree_errors():
    with pytest.raises(AlgebraError, match="zero operator"):
        nilpotency_degree(AdOperator(np.zeros((3, 3))))
    with pytest.raises(AlgebraError, match="not nilpotent"):
        nilpotency_degree(ad_matrix(AlgebraElement(H)))
    with pytest.raises(AlgebraError, match="not nilpotent"):
        nilpotency_degree(ad_matrix(AlgebraElement(0.3 * H)))


def test_nilpotency_degree_rejects_small_spectral_radius():
    # eigenvalues 0, +-2e-5: powers fall below tol quickly, but the operator is not nilpotent
    op = ad_matrix(AlgebraElement(np.array([[1e-5, 1.0], [0.0, -1e-5]])))
    with pytest.raises(AlgebraError, match="spectral radius"):
        nilpotency_degree(op)


def test_nilpotency_degree_dyadic_entries_are_exact():
    op = ad_matrix(AlgebraElement(0.25 * PRINCIPAL_SL3))
    assert not op.is_integral()
    assert nilpotency_degree(op) == 4
    assert nilpotency_degree(ad_matrix(AlgebraElement(0.125 * E13))) == 2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ad_squared_never_vanishes(n, rng):
    for _ in range(200):
        ad = ad_matrix(AlgebraElement(random_sl(rng, n))).entries
        sq = ad @ ad
        assert np.linalg.norm(sq) > 1e-8 * np.linalg.norm(ad) ** 2


@pytest.mark.parametrize("x,parts", [
    (PRINCIPAL_SL3, "nil"),
    (H, "hyp"),
    (ROTATION, "ell"),
])
def test_jordan_split_pure_cases(x, parts):
    split = jordan_split(AlgebraElement(x))
    for name in ("nil", "hyp", "ell"):
        expected = x if name == parts else np.zeros_like(x)
        assert_allclose(getattr(split, name), expected, atol=1e-8)


SPECTRA = {
    2: np.array([[0.7, 0.0], [0.0, -0.7]]),
    3: np.array([[-0.2, 0.0, 0.0], [0.0, 0.1, 0.9], [0.0, -0.9, 0.1]]),
    4: np.diag([1.5, 0.5, -0.5, -1.5]),
}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_jordan_split_random_inputs(n, rng):
    # random conjugates of fixed, well separated spectra
    for _ in range(20):
        g = rng.normal(size=(n, n)) + 3 * np.eye(n)
        x = g @ SPECTRA[n] @ np.linalg.inv(g)
        split = jordan_split(AlgebraElement(x))
        scale = np.linalg.norm(x)
        assert split.reconstruction_error(x) <= 1e-8 * scale
        assert split.max_commutator() <= 1e-8 * scale ** 2
        assert np.all(np.abs(np.linalg.eigvals(split.hyp).imag) < 1e-6 * scale)
        assert np.all(np.abs(np.linalg.eigvals(split.ell).real) < 1e-6 * scale)


def test_jordan_split_mixed_element():
    # hyperbolic diag(1, 1, -2) plus a nilpotent block commuting with it
    x = np.diag([1.0, 1.0, -2.0]) + elementary(0, 1, 3)
    split = jordan_split(AlgebraElement(x))
    assert_allclose(split.hyp, np.diag([1.0, 1.0, -2.0]), atol=1e-8)
    assert_allclose(split.nil, elementary(0, 1, 3), atol=1e-8)
    assert_allclose(split.ell, np.zeros((3, 3)), atol=1e-8)


@pytest.mark.parametrize("x,kind,degree", [
    (H, QUASI_DIAGONALIZABLE, None),
    (E13, QUASI_UNIPOTENT, 2),
    (PRINCIPAL_SL3, QUASI_UNIPOTENT, 4),
    (ROTATION, BOUNDED, None),
    (np.zeros((3, 3)), BOUNDED, None),
])
def test_classify_flow(x, kind, degree):
    descriptor = classify_flow(AlgebraElement(x))
    assert descriptor.kind == kind
    assert descriptor.degree == degree
    assert descriptor.unbounded is (kind != BOUNDED)


def test_classify_flow_elliptic_plus_nilpotent_is_quasi_unipotent():
    # rotation block plus a commuting nilpotent block in sl_4
    x = np.zeros((4, 4))
    x[:2, :2] = ROTATION
    x[2, 3] = 1.0
    descriptor = classify_flow(AlgebraElement(x))
    assert descriptor.kind == QUASI_UNIPOTENT


def test_flow_descriptor_validation():
    with pytest.raises(AlgebraError):
        FlowDescriptor.symbolic(QUASI_UNIPOTENT, 1)
    with pytest.raises(AlgebraError):
        FlowDescriptor.symbolic(BOUNDED, 2)
    with pytest.raises(AlgebraError):
        FlowDescriptor.symbolic("parabolic")
    assert FlowDescriptor.symbolic(QUASI_UNIPOTENT, 3).to_json() == {"kind": QUASI_UNIPOTENT, "l": 3}


def test_lambda1_profile_diagonal_is_exact():
    profile = lambda1_profile(AlgebraElement(H), [0.5, 1, 2, 5])
    for t, value in profile:
        assert value == pytest.approx(2 * t, rel=1e-12)


@pytest.mark.parametrize("x,degree,grid", [
    (E12, 2, [10, 100, 1000]),
    (E13, 2, [10, 100, 1000]),
    (PRINCIPAL_SL3, 4, [10, 100, 1000]),
    (elementary(0, 1, 3) + elementary(1, 2, 3), 4, [100, 1000, 10000]),
    (PRINCIPAL_SL4, 6, [100, 1000, 10000]),
])
def test_growth_slope_matches_nilpotency_degree(x, degree, grid):
    element = AlgebraElement(x)
    assert nilpotency_degree(ad_matrix(element)) == degree
    slope, _ = fit_growth_slope(lambda1_profile(element, grid), "log")
    assert slope == pytest.approx(degree, abs=0.05)


def test_quasi_diagonalizable_growth_is_linear():
    x = AlgebraElement(0.1 * np.diag([1.0, 0.5, -1.5]))
    (_, l100), (_, l1000) = lambda1_profile(x, [100, 1000])
    assert l100 / 100 > 0
    assert abs(l100 / 100 - l1000 / 1000) / (l1000 / 1000) < 0.01
    slope, _ = fit_growth_slope(lambda1_profile(x, [10, 20, 40, 80]), "linear")
    assert slope == pytest.approx(0.25, rel=1e-6)


def test_lambda1_profile_parallel_matches_serial():
    x = AlgebraElement(PRINCIPAL_SL3)
    grid = [1, 2, 3, 5, 8, 13]
    assert lambda1_profile(x, grid, workers=3) == lambda1_profile(x, grid)


def test_lambda1_profile_errors():
    with pytest.raises(AlgebraError, match="strictly increasing"):
        lambda1_profile(AlgebraElement(H), [2, 1])
    with pytest.raises(AlgebraError, match="positive"):
        lambda1_profile(AlgebraElement(H), [0, 1])
    with pytest.raises(AlgebraError) as info:
        lambda1_profile(AlgebraElement(H), [1, 1000])
    assert info.value.max_t == pytest.approx(350.0)


def test_fit_growth_slope_errors():
    with pytest.raises(AlgebraError):
        fit_growth_slope([(1.0, 0.0)])
    with pytest.raises(AlgebraError):
        fit_growth_slope([(1.0, 0.0), (2.0, 1.0)], scale="cubic")


@pytest.mark.parametrize("n", [2, 3])
def test_exp_ad_matches_conjugation(n, rng):
    for _ in range(5):
        x = random_sl(rng, n)
        x /= np.linalg.norm(x)
        ad = ad_matrix(AlgebraElement(x)).entries
        for t in (-5.0, -1.0, 0.5, 5.0):
            assert_allclose(expm(t * ad), adjoint_action(expm(t * x)).entries, atol=1e-8, rtol=1e-8)


def test_hs_norm():
    assert hs_norm(AdOperator(np.eye(3))) == pytest.approx(math.sqrt(3))
    assert hs_norm(adjoint_action(expm(0.0 * E12))) == pytest.approx(math.sqrt(3))
    ts = np.array([10.0, 100.0, 1000.0])
    norms = [hs_norm(adjoint_action(expm(t * E12))) for t in ts]
    slope = np.polyfit(np.log(ts), np.log(norms), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.05)


def test_top_singular_value_equals_hs_norm_up_to_dimension():
    op = adjoint_action(expm(3.0 * PRINCIPAL_SL3))
    top = svdvals(op.entries)[0]
    assert top <= hs_norm(op) <= math.sqrt(op.dim) * top

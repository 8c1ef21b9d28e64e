from fractions import Fraction

import pytest

from src.errors import ClassificationError
from src.liealg import QUASI_DIAGONALIZABLE, QUASI_UNIPOTENT, BOUNDED, FlowDescriptor
from src.rootsys import good_type
from src.sdclassify import (
    CONDITIONAL,
    NO,
    YES,
    Exponent,
    GroupSpec,
    HigherRankFactor,
    RankOneFactor,
    SDVerdict,
    SpectralGapParam,
    classify_higher_rank_simple,
    classify_rank_one,
    classify_semisimple,
    congruence_tau_preset,
    group_spec_from_json,
    rank_one_data,
    uniform_decay_exponent,
    verdict_to_json,
)

HIGHER_RANK_TYPES = [("A", 2), ("A", 5), ("B", 3), ("B", 4), ("C", 3), ("D", 4), ("D", 6),
                     ("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)]


def qu(l):
    return FlowDescriptor.symbolic(QUASI_UNIPOTENT, l)


QD = FlowDescriptor.symbolic(QUASI_DIAGONALIZABLE)
BOUNDED_FLOW = FlowDescriptor.symbolic(BOUNDED)


def test_exponent_ordering_and_summability():
    assert Exponent.exp() > Exponent.polynomial(100)
    assert Exponent.polynomial(Fraction(3, 2)) > Exponent.polynomial(1)
    assert max([Exponent.polynomial(2), Exponent.exp(), Exponent.polynomial(5)]).exponential
    assert not Exponent.polynomial(1).is_summable()
    assert Exponent.polynomial(Fraction(101, 100)).is_summable()
    assert Exponent.exp().is_summable()
    assert Exponent.exp().value_at_zero() == float("inf")
    with pytest.raises(ClassificationError):
        Exponent.polynomial(0)


@pytest.mark.parametrize("exponent,text", [
    (Exponent.polynomial(1), "1-ε"),
    (Exponent.polynomial(2), "2(1-ε)"),
    (Exponent.polynomial(Fraction(3, 2)), "3/2(1-ε)"),
    (Exponent.polynomial(2, uses_epsilon=False), "2"),
    (Exponent.exp(), "exponential"),
])
def test_exponent_rendering(exponent, text):
    assert str(exponent) == text


@pytest.mark.parametrize("family,d,p,q,rho,rho0,kappa", [
    ("SO", 4, 3, 0, Fraction(3, 2), Fraction(3, 2), 2),
    ("Sp", 2, 4, 3, Fraction(5), Fraction(3), 1),
    ("F4m20", None, 8, 7, Fraction(11), Fraction(5), 1),
    ("SU", 3, 4, 1, Fraction(3), Fraction(3), 1),
    ("SO", 2, 1, 0, Fraction(1, 2), Fraction(1, 2), 2),
])
def test_rank_one_table(family, d, p, q, rho, rho0, kappa):
    data = rank_one_data(family, d)
    assert (data.p, data.q, data.rho, data.rho0, data.kappa) == (p, q, rho, rho0, kappa)


@pytest.mark.parametrize("family", ["SO", "SU", "Sp"])
@pytest.mark.parametrize("d", range(2, 11))
def test_rank_one_table_integrity(family, d):
    data = rank_one_data(family, d)
    assert Fraction(data.p + 2 * data.q, 2) == data.rho
    assert data.rho0 <= data.rho
    assert (data.kappa == 2) is (family == "SO")


@pytest.mark.parametrize("family,d", [("SO", 1), ("SU", 0), ("Sp", "3"), ("G2", 2), ("F4m20", 5)])
def test_rank_one_data_rejects_invalid(family, d):
    with pytest.raises(ClassificationError):
        rank_one_data(family, d)


@pytest.mark.parametrize("family,d,tau", [
    ("SO", 2, Fraction(25, 64)),
    ("SO", 3, Fraction(25, 32)),
    ("SO", 4, Fraction(1)),
    ("SO", 9, Fraction(1)),
    ("SU", 2, Fraction(6, 5)),
    ("SU", 3, Fraction(2)),
])
def test_congruence_presets(family, d, tau):
    preset = congruence_tau_preset(family, d)
    assert preset.tau == tau
    assert preset.provenance == "congruence_preset"


def test_congruence_preset_rejects_property_t_families():
    with pytest.raises(ClassificationError):
        congruence_tau_preset("Sp", 2)


def test_spectral_gap_parse():
    assert SpectralGapParam.parse("25/32").tau == Fraction(25, 32)
    assert not SpectralGapParam.parse(None).known
    assert not SpectralGapParam.parse("unknown").known
    with pytest.raises(ClassificationError):
        SpectralGapParam.parse("-1")
    with pytest.raises(ClassificationError):
        SpectralGapParam.parse("abc")


@pytest.mark.parametrize("root_type,rank,flow,is_sd,exponent", [
    ("A", 2, qu(4), YES, Exponent.polynomial(2)),
    ("A", 2, qu(2), NO, Exponent.polynomial(1)),
    ("F", 4, qu(2), YES, Exponent.polynomial(2)),
    ("A", 2, qu(3), YES, Exponent.polynomial(Fraction(3, 2))),
    ("A", 3, QD, YES, Exponent.exp()),
    ("B", 4, qu(3), YES, Exponent.polynomial(3)),
])
def test_classify_higher_rank_simple(root_type, rank, flow, is_sd, exponent):
    verdict = classify_higher_rank_simple(root_type, rank, flow)
    assert verdict.is_sd == is_sd
    assert verdict.exponent == exponent
    assert verdict.rationale


def test_higher_rank_preconditions():
    with pytest.raises(ClassificationError, match="classify_rank_one"):
        classify_higher_rank_simple("A", 1, qu(2))
    with pytest.raises(ClassificationError, match="unbounded"):
        classify_higher_rank_simple("A", 2, BOUNDED_FLOW)


@pytest.mark.parametrize("root_type,rank", HIGHER_RANK_TYPES)
def test_good_types_are_always_sd(root_type, rank):
    previous = None
    for l in range(2, 9):
        verdict = classify_higher_rank_simple(root_type, rank, qu(l))
        if good_type(root_type, rank):
            assert verdict.is_sd == YES
        if previous is not None:
            assert verdict.exponent >= previous
        previous = verdict.exponent


@pytest.mark.parametrize("family,d,tau,is_sd,exponent", [
    ("Sp", 2, SpectralGapParam.unknown(), YES, Exponent.polynomial(2)),
    ("F4m20", None, SpectralGapParam.unknown(), YES, Exponent.polynomial(6)),
    ("Sp", 2, SpectralGapParam(Fraction(5)), YES, Exponent.polynomial(5)),
    ("SO", 3, SpectralGapParam(Fraction(1)), YES, Exponent.polynomial(2)),
    ("SO", 3, SpectralGapParam(Fraction(1, 4)), NO, Exponent.polynomial(Fraction(1, 2))),
    ("SU", 2, SpectralGapParam(Fraction(6, 5)), YES, Exponent.polynomial(Fraction(6, 5))),
    ("SU", 2, SpectralGapParam(Fraction(1)), NO, Exponent.polynomial(1)),
    ("SO", 2, SpectralGapParam(Fraction(25, 64)), NO, Exponent.polynomial(Fraction(25, 32))),
    ("SO", 2, SpectralGapParam.unknown(), NO, Exponent.polynomial(1)),
])
def test_classify_rank_one(family, d, tau, is_sd, exponent):
    verdict = classify_rank_one(family, d, tau, qu(2))
    assert verdict.is_sd == is_sd
    assert verdict.exponent == exponent


@pytest.mark.parametrize("tau", ["1/2", "1/4", "25/64", "2/3", "1"])
def test_so21_verdict_never_claims_summable_decay(tau):
    # tau above rho = 1/2 is rejected, everything else stays at kappa*tau <= 1
    if Fraction(tau) > Fraction(1, 2):
        with pytest.raises(ClassificationError, match="exceeds rho"):
            classify_rank_one("SO", 2, SpectralGapParam.parse(tau), qu(2))
        return
    verdict = classify_rank_one("SO", 2, SpectralGapParam.parse(tau), qu(2))
    assert verdict.is_sd == NO
    assert not verdict.exponent.is_summable()
    assert verdict.exponent == Exponent.polynomial(2 * Fraction(tau))


@pytest.mark.parametrize("family,d,tau", [
    ("SU", 2, "7"),
    ("SO", 3, "3/2"),
    ("Sp", 2, "6"),
    ("F4m20", None, "12"),
])
def test_rank_one_tau_above_rho_rejected(family, d, tau):
    with pytest.raises(ClassificationError, match="exceeds rho"):
        classify_rank_one(family, d, SpectralGapParam.parse(tau), qu(2))


def test_verdict_must_agree_with_exponent():
    with pytest.raises(ClassificationError, match="summable"):
        SDVerdict(NO, Exponent.polynomial(2))
    with pytest.raises(ClassificationError, match="non-summable"):
        SDVerdict(YES, Exponent.polynomial(1))
    assert SDVerdict(NO, Exponent.polynomial(Fraction(1, 2))).exit_code == 1


def test_rank_one_unknown_tau_is_conditional_with_criterion():
    verdict = classify_rank_one("SO", 3, SpectralGapParam.unknown())
    assert verdict.is_sd == CONDITIONAL
    assert verdict.exponent is None
    assert "1/2" in verdict.criterion
    assert verdict.exit_code == 2


def test_rank_one_quasi_diagonalizable_is_exponential():
    verdict = classify_rank_one("SO", 3, SpectralGapParam.unknown(), QD)
    assert verdict.is_sd == YES
    assert verdict.exponent.exponential


def test_rank_one_bounded_flow_rejected():
    with pytest.raises(ClassificationError):
        classify_rank_one("SU", 2, SpectralGapParam.unknown(), BOUNDED_FLOW)


def test_semisimple_two_essential_factors():
    spec = GroupSpec([HigherRankFactor("A", 2, qu(2)), HigherRankFactor("A", 2, qu(2))])
    verdict = classify_semisimple(spec)
    assert verdict.is_sd == YES
    assert verdict.exponent == Exponent.polynomial(2)


def test_semisimple_single_essential_factor_inherits_verdict():
    spec = GroupSpec([HigherRankFactor("A", 2, qu(2)), HigherRankFactor("C", 3, BOUNDED_FLOW)])
    verdict = classify_semisimple(spec)
    assert verdict.is_sd == NO
    assert verdict.exit_code == 1


def test_semisimple_single_factor_quasi_diagonalizable():
    verdict = classify_semisimple(GroupSpec([HigherRankFactor("F", 4, QD)]))
    assert verdict.is_sd == YES
    assert verdict.exponent.exponential


def test_semisimple_without_property_t_is_conditional():
    spec = GroupSpec([HigherRankFactor("A", 2, qu(2)), RankOneFactor("SO", 3, qu(2))])
    verdict = classify_semisimple(spec)
    assert verdict.is_sd == CONDITIONAL
    assert "SO(3,1)" in verdict.rationale[0]


def test_group_spec_rejects_all_bounded_and_empty():
    with pytest.raises(ClassificationError):
        GroupSpec([HigherRankFactor("A", 2, BOUNDED_FLOW)])
    with pytest.raises(ClassificationError):
        GroupSpec([])


@pytest.mark.parametrize("factors,expected", [
    ([HigherRankFactor("F", 4, qu(4))], Exponent.polynomial(4)),
    ([HigherRankFactor("A", 2, qu(2))], Exponent.polynomial(1)),
    ([HigherRankFactor("A", 2, qu(2))] * 3, Exponent.polynomial(3)),
    ([HigherRankFactor("A", 2, qu(2)), RankOneFactor("Sp", 2, qu(2))], Exponent.polynomial(2)),
    ([HigherRankFactor("A", 2, QD), HigherRankFactor("A", 2, qu(2))], Exponent.exp()),
])
def test_uniform_decay_exponent(factors, expected):
    exponent = uniform_decay_exponent(GroupSpec(factors))
    assert exponent == expected
    assert exponent >= Exponent.polynomial(1)


def test_adding_essential_factor_never_decreases_exponent():
    base = [HigherRankFactor("A", 2, qu(3))]
    for extra in range(1, 4):
        smaller = uniform_decay_exponent(GroupSpec(base * extra))
        larger = uniform_decay_exponent(GroupSpec(base * (extra + 1)))
        assert larger >= smaller


def test_uniform_decay_requires_property_t():
    with pytest.raises(ClassificationError):
        uniform_decay_exponent(GroupSpec([RankOneFactor("SO", 3, qu(2))]))


def test_sl3_literal_matrices_end_to_end():
    good = group_spec_from_json({"factors": [
        {"type": "A", "rank": 2, "flow": {"matrix": [[0, 2, 0], [0, 0, 2], [0, 0, 0]]}},
    ]})
    bad = group_spec_from_json({"factors": [
        {"type": "A", "rank": 2, "flow": {"matrix": [[0, 0, 1], [0, 0, 0], [0, 0, 0]]}},
    ]})
    good_verdict = classify_semisimple(good)
    assert good_verdict.is_sd == YES
    assert str(good_verdict.exponent) == "2(1-ε)"
    assert classify_semisimple(bad).is_sd == NO


def test_spec_json_rank_one_and_congruence():
    spec = group_spec_from_json({"factors": [
        {"family": "SO", "d": 3, "tau": "congruence", "flow": {"kind": "quasi_unipotent", "l": 2}},
    ]})
    verdict = classify_semisimple(spec)
    assert verdict.is_sd == YES
    assert verdict.exponent == Exponent.polynomial(Fraction(25, 16))


@pytest.mark.parametrize("data", [
    {},
    {"factors": []},
    {"factors": [{"type": "A", "rank": 2}]},
    {"factors": [{"type": "A", "rank": "2", "flow": {"kind": "bounded"}}]},
    {"factors": [{"type": "B", "rank": 2, "flow": {"matrix": [[0, 1, 0], [0, 0, 1], [0, 0, 0]]}}]},
    {"factors": [{"flow": {"kind": "bounded"}}]},
    {"factors": [{"type": "A", "rank": 2, "flow": {}}]},
])
def test_spec_json_errors(data):
    with pytest.raises(ClassificationError):
        group_spec_from_json(data)


def test_verdict_to_json_shape():
    doc = verdict_to_json(classify_rank_one("SO", 3, SpectralGapParam(Fraction(1)), qu(2)))
    assert doc["is_sd"] == "yes"
    assert doc["exponent"] == "2(1-ε)"
    assert doc["exponent_at_eps0"] == "2"
    assert doc["criterion"]
    conditional = verdict_to_json(classify_rank_one("SU", 4, SpectralGapParam.unknown()))
    assert conditional["exponent"] is None and conditional["exponent_at_eps0"] is None

"""
Summable-decay (SD) classification of one-parameter flows on finite-volume
quotients of semisimple groups.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Union

from src.errors import ClassificationError
from src.liealg.flows import BOUNDED, QUASI_DIAGONALIZABLE, QUASI_UNIPOTENT, FlowDescriptor
from src.rootsys.orthogonal import good_type
from src.sdclassify.exponent import Exponent
from src.sdclassify.rank_one import RankOneData, SpectralGapParam, rank_one_data

logger = logging.getLogger(__name__)

YES = "yes"
NO = "no"
CONDITIONAL = "conditional"

EXIT_CODES = {YES: 0, NO: 1, CONDITIONAL: 2}


@dataclass(frozen=True)
class SDVerdict:
    is_sd: str
    exponent: Optional[Exponent]
    rationale: List[str] = field(default_factory=list)
    criterion: Optional[str] = None

    def __post_init__(self):
        if self.is_sd not in EXIT_CODES:
            raise ClassificationError(f"Unknown verdict '{self.is_sd}'")
        if self.is_sd == YES and self.exponent is not None and not self.exponent.is_summable():
            raise ClassificationError(f"Verdict 'yes' with non-summable exponent {self.exponent}")
        if self.is_sd == NO and self.exponent is not None and self.exponent.is_summable():
            raise ClassificationError(f"Verdict 'no' with summable exponent {self.exponent}")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.is_sd]


@dataclass(frozen=True)
class HigherRankFactor:
    root_type: str
    rank: int
    flow: FlowDescriptor

    @property
    def label(self) -> str:
        return f"{self.root_type}{self.rank}"

    @property
    def has_property_t(self) -> bool:
        return True


@dataclass(frozen=True)
class RankOneFactor:
    family: str
    d: Optional[int]
    flow: FlowDescriptor
    tau: SpectralGapParam = field(default_factory=SpectralGapParam.unknown)

    @property
    def data(self) -> RankOneData:
        return rank_one_data(self.family, self.d)

    @property
    def label(self) -> str:
        return self.data.label

    @property
    def has_property_t(self) -> bool:
        return self.data.has_property_t


Factor = Union[HigherRankFactor, RankOneFactor]


@dataclass(frozen=True)
class GroupSpec:
    factors: List[Factor]

    def __post_init__(self):
        if not self.factors:
            raise ClassificationError("A group specification needs at least one simple factor")
        if not any(f.flow.unbounded for f in self.factors):
            raise ClassificationError(
                "Every factor flow is bounded; the flow must be unbounded in at least one factor"
            )

    @property
    def essential_factors(self) -> List[Factor]:
        return [f for f in self.factors if f.flow.unbounded]

    @property
    def has_property_t(self) -> bool:
        return all(f.has_property_t for f in self.factors)


def classify_higher_rank_simple(root_type: str, rank: int, flow: FlowDescriptor) -> SDVerdict:
    if rank < 2:
        raise ClassificationError(
            f"{root_type}{rank} has real rank one; describe it as a rank one factor "
            f"(family, d, tau) and use classify_rank_one"
        )
    if not flow.unbounded:
        raise ClassificationError("Bounded flows do not mix; the flow must be unbounded")
    good = good_type(root_type, rank)
    label = f"{root_type}{rank}"
    if flow.kind == QUASI_DIAGONALIZABLE:
        return SDVerdict(YES, Exponent.exp(), [
            f"{label}: quasi-diagonalizable flow, Cartan profile grows linearly in t",
            "exponential decay of matrix coefficients along diagonalizable flows",
        ])
    l = int(flow.degree)
    if good:
        return SDVerdict(YES, Exponent.polynomial(l), [
            f"{label}: xi dominates the highest root on the positive chamber (good type)",
            f"quasi-unipotent flow with ad-nilpotency degree l = {l}: rate l(1-ε)",
        ])
    rate = Exponent.polynomial(Fraction(l, 2))
    trail = [
        f"{label}: xi does not dominate the highest root (bad type), rate l/2(1-ε)",
        f"quasi-unipotent flow with ad-nilpotency degree l = {l}",
    ]
    if rate.is_summable():
        return SDVerdict(YES, rate, trail)
    trail.append("l = 2: the uniform bound gives only |t|^-(1-ε); flow is not SD")
    return SDVerdict(NO, rate, trail)


def classify_rank_one(
    family: str,
    d: Optional[int],
    tau: SpectralGapParam,
    flow: Optional[FlowDescriptor] = None,
) -> SDVerdict:
    data = rank_one_data(family, d)
    if tau.known and tau.tau > data.rho:
        raise ClassificationError(
            f"tau = {tau.tau} exceeds rho = {data.rho} for {data.label}; tau(Gamma) is at most rho"
        )
    if flow is not None and not flow.unbounded:
        raise ClassificationError("Bounded flows do not mix; the flow must be unbounded")
    kappa = data.kappa
    if flow is not None and flow.kind == QUASI_DIAGONALIZABLE:
        return SDVerdict(YES, Exponent.exp(), [
            f"{data.label}: quasi-diagonalizable flow, exponential decay for any tau > 0",
        ])
    if data.has_property_t:
        floor = data.rho - data.rho0
        effective = max(tau.tau, floor) if tau.known else floor
        return SDVerdict(YES, Exponent.polynomial(kappa * effective), [
            f"{data.label} has property (T): tau >= rho - rho0 = {floor}",
            f"rate kappa*tau(1-ε) with kappa = {kappa}, tau = {effective}",
        ])
    criterion = f"kappa*tau > 1, i.e. tau(Gamma) > {Fraction(1, kappa)}"
    if data.is_so21:
        effective = min(tau.tau, data.rho) if tau.known else data.rho
        return SDVerdict(NO, Exponent.polynomial(kappa * effective), [
            f"{data.label}: kappa*rho = 1, so kappa*tau <= 1 for every lattice",
            "SO(2,1) is excluded from the rank one SD criterion",
        ], criterion)
    if not tau.known:
        return SDVerdict(CONDITIONAL, None, [
            f"{data.label} lacks property (T); verdict depends on the spectral gap of Gamma",
        ], criterion)
    product = kappa * tau.tau
    trail = [f"{data.label}: kappa = {kappa}, tau = {tau.tau} ({tau.provenance}), kappa*tau = {product}"]
    if product > 1:
        return SDVerdict(YES, Exponent.polynomial(product), trail, criterion)
    trail.append("criterion kappa*tau > 1 fails")
    return SDVerdict(NO, Exponent.polynomial(product), trail, criterion)


def _classify_factor(factor: Factor) -> SDVerdict:
    if isinstance(factor, HigherRankFactor):
        return classify_higher_rank_simple(factor.root_type, factor.rank, factor.flow)
    return classify_rank_one(factor.family, factor.d, factor.tau, factor.flow)


def classify_semisimple(spec: GroupSpec) -> SDVerdict:
    essential = spec.essential_factors
    k = len(essential)
    if len(spec.factors) == 1:
        return _classify_factor(spec.factors[0])
    if not spec.has_property_t:
        missing = [f.label for f in spec.factors if not f.has_property_t]
        return SDVerdict(CONDITIONAL, None, [
            f"factors without property (T): {', '.join(missing)}",
            "semisimple decay bound needs property (T) on every factor",
        ], "spectral gap of every non-(T) factor must be controlled")
    logger.debug(f"Classifying semisimple spec with {k} essential factors out of {len(spec.factors)}")
    if k == 1:
        verdict = _classify_factor(essential[0])
        return SDVerdict(
            verdict.is_sd,
            verdict.exponent,
            [f"single essential factor {essential[0].label}; verdict of that factor"] + verdict.rationale,
            verdict.criterion,
        )
    exponent = uniform_decay_exponent(spec)
    return SDVerdict(YES, exponent, [
        f"{k} essential factors ({', '.join(f.label for f in essential)}): rate k(1-ε) with k = {k}",
    ])


def uniform_decay_exponent(spec: GroupSpec) -> Exponent:
    """max(k(1-ε), best single-factor rate), never below 1-ε"""
    if not spec.has_property_t:
        raise ClassificationError("Uniform decay exponent requires property (T) on every factor")
    essential = spec.essential_factors
    candidates = [Exponent.polynomial(1), Exponent.polynomial(len(essential))]
    for factor in essential:
        verdict = _classify_factor(factor)
        if verdict.exponent is not None:
            candidates.append(verdict.exponent)
    return max(candidates)

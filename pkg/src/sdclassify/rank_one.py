"""
Real rank one simple groups: root multiplicities, rho, the end of the
complementary series rho_0, and kappa.

  family   p        q   rho (x alpha)   rho_0        kappa
  SO(d,1)  d-1      0   (d-1)/2         rho          2
  SU(d,1)  2(d-1)   1   d               rho          1
  Sp(d,1)  4(d-1)   3   2d+1            rho - 2      1
  F4m20    8        7   11              rho - 6 = 5  1

rho = (p + 2q)/2 in every row.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from src.errors import ClassificationError

logger = logging.getLogger(__name__)

FAMILIES = ("SO", "SU", "Sp", "F4m20")
PROPERTY_T_FAMILIES = ("Sp", "F4m20")

USER_SUPPLIED = "user_supplied"
CONGRUENCE_PRESET = "congruence_preset"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class RankOneData:
    family: str
    d: Optional[int]
    p: int
    q: int
    rho: Fraction
    rho0: Fraction
    kappa: int

    @property
    def label(self) -> str:
        return "F4(-20)" if self.family == "F4m20" else f"{self.family}({self.d},1)"

    @property
    def has_property_t(self) -> bool:
        return self.family in PROPERTY_T_FAMILIES

    @property
    def is_so21(self) -> bool:
        """SO(2,1): kappa * rho = 1, so no lattice gives summable decay"""
        return self.family == "SO" and self.d == 2

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "d": self.d,
            "p": self.p,
            "q": self.q,
            "rho": str(self.rho),
            "rho0": str(self.rho0),
            "kappa": self.kappa,
        }


@dataclass(frozen=True)
class SpectralGapParam:
    """tau(Gamma) = min over exceptional spherical spectrum of (rho - s_k); None when unknown"""
    tau: Optional[Fraction]
    provenance: str = USER_SUPPLIED

    def __post_init__(self):
        if self.tau is None:
            object.__setattr__(self, "provenance", UNKNOWN)
            return
        object.__setattr__(self, "tau", Fraction(self.tau))
        if self.tau <= 0:
            raise ClassificationError(f"Spectral gap parameter must be positive, got {self.tau}")

    @classmethod
    def unknown(cls) -> "SpectralGapParam":
        return cls(None, UNKNOWN)

    @classmethod
    def parse(cls, value: Union[None, str, int, float, Fraction]) -> "SpectralGapParam":
        if value is None or value == UNKNOWN:
            return cls.unknown()
        try:
            return cls(Fraction(str(value)), USER_SUPPLIED)
        except (ValueError, ZeroDivisionError):
            raise ClassificationError(f"Cannot parse spectral gap parameter tau = {value!r}")

    @property
    def known(self) -> bool:
        return self.tau is not None


def rank_one_data(family: str, d: Optional[int] = None) -> RankOneData:
    if family not in FAMILIES:
        raise ClassificationError(f"Unknown rank one family '{family}'; expected one of {FAMILIES}")
    if family == "F4m20":
        if d not in (None, 2):
            raise ClassificationError("F4(-20) takes no dimension parameter")
        return RankOneData("F4m20", None, 8, 7, Fraction(11), Fraction(5), 1)
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise ClassificationError(f"{family}(d,1) requires an integer d >= 2, got {d!r}")
    if family == "SO":
        if d == 2:
            logger.info("SO(2,1) requested: kappa * rho = 1, summable decay is impossible")
        rho = Fraction(d - 1, 2)
        return RankOneData("SO", d, d - 1, 0, rho, rho, 2)
    if family == "SU":
        rho = Fraction(d)
        return RankOneData("SU", d, 2 * (d - 1), 1, rho, rho, 1)
    rho = Fraction(2 * d + 1)
    return RankOneData("Sp", d, 4 * (d - 1), 3, rho, rho - 2, 1)


def congruence_tau_preset(family: str, d: int) -> SpectralGapParam:
    """
    Known lower bounds on tau for congruence lattices. d is the group's own
    parameter: SO(2,1) -> 25/64, SO(3,1) -> 25/32, SO(d,1) d >= 4 -> 1,
    SU(2,1) -> 6/5, SU(d,1) d >= 3 -> 2.
    """
    data = rank_one_data(family, d)
    if data.has_property_t:
        raise ClassificationError(
            f"{data.label} has property (T): every unbounded flow is SD, no congruence preset needed"
        )
    if family == "SO":
        tau = {2: Fraction(25, 64), 3: Fraction(25, 32)}.get(d, Fraction(1))
    else:
        tau = Fraction(6, 5) if d == 2 else Fraction(2)
    return SpectralGapParam(tau, CONGRUENCE_PRESET)

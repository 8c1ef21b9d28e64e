from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from src.errors import ClassificationError


@dataclass(frozen=True)
class Exponent:
    """
    Decay rate of matrix coefficients: |t|^{-c(1-eps)} (uses_epsilon), |t|^{-c},
    or exponential decay, which dominates every polynomial rate.

    Rates are compared at eps = 0.
    """
    coefficient: Fraction = Fraction(0)
    uses_epsilon: bool = True
    exponential: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        if not self.exponential and self.coefficient <= 0:
            raise ClassificationError(f"Polynomial decay exponent must be positive, got {self.coefficient}")

    @classmethod
    def polynomial(cls, coefficient: Union[int, Fraction], uses_epsilon: bool = True) -> "Exponent":
        return cls(Fraction(coefficient), uses_epsilon, False)

    @classmethod
    def exp(cls) -> "Exponent":
        return cls(Fraction(0), False, True)

    def _key(self):
        return (self.exponential, self.coefficient)

    def __lt__(self, other: "Exponent") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "Exponent") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "Exponent") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "Exponent") -> bool:
        return self._key() >= other._key()

    def is_summable(self) -> bool:
        """eta > 1 strictly, the summable-decay condition"""
        return self.exponential or self.coefficient > 1

    def value_at_zero(self) -> float:
        return float("inf") if self.exponential else float(self.coefficient)

    def __str__(self) -> str:
        if self.exponential:
            return "exponential"
        if not self.uses_epsilon:
            return str(self.coefficient)
        if self.coefficient == 1:
            return "1-ε"
        return f"{self.coefficient}(1-ε)"

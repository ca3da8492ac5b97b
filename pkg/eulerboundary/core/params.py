"""
Boundary parameters

The extreme solutions of the dual recursion are indexed by a discrete set:
two sequences accumulating at 1/2 from above and from below, plus 1/2 itself.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from eulerboundary.core.config import DEFAULT_SETTINGS, Settings
from eulerboundary.core.errors import InputFormatError, ParameterError


class Variant(Enum):
    UPPER = "upper"
    HALF = "half"
    LOWER = "lower"


@dataclass(frozen=True)
class BoundaryParam:
    """
    A point theta of the boundary set

    UPPER(kappa) has theta = (kappa+2)/(2(kappa+1)) > 1/2, LOWER(kappa) has
    theta = kappa/(2(kappa+1)) < 1/2 and HALF has theta = 1/2.

    Example:
        >>> BoundaryParam.upper(1).theta()
        Fraction(3, 4)
        >>> BoundaryParam.parse("lower:2")
        BoundaryParam(variant=<Variant.LOWER: 'lower'>, kappa=2)
    """

    variant: Variant
    kappa: Optional[int] = None

    def __post_init__(self):
        if self.variant is Variant.HALF:
            if self.kappa is not None:
                raise ParameterError("half takes no kappa")
        elif not isinstance(self.kappa, int) or self.kappa < 0:
            raise ParameterError(f"{self.variant.value} needs an integer kappa >= 0, got {self.kappa!r}")

    @classmethod
    def upper(cls, kappa: int) -> "BoundaryParam":
        return cls(Variant.UPPER, kappa)

    @classmethod
    def lower(cls, kappa: int) -> "BoundaryParam":
        return cls(Variant.LOWER, kappa)

    @classmethod
    def half(cls) -> "BoundaryParam":
        return cls(Variant.HALF)

    @classmethod
    def parse(cls, text: str) -> "BoundaryParam":
        """Parse "upper:K", "half" or "lower:K" """
        spec = text.strip().lower()
        if spec == "half":
            return cls.half()
        name, sep, value = spec.partition(":")
        if not sep or name not in ("upper", "lower"):
            raise InputFormatError(f"expected 'upper:K', 'half' or 'lower:K', got {text!r}")
        try:
            kappa = int(value)
        except ValueError as exc:
            raise InputFormatError(f"kappa must be an integer in {text!r}") from exc
        return cls(Variant(name), kappa)

    def theta(self) -> Fraction:
        """theta = W_20, the parameter in [0, 1]"""
        if self.variant is Variant.UPPER:
            return Fraction(self.kappa + 2, 2 * (self.kappa + 1))
        if self.variant is Variant.LOWER:
            return Fraction(self.kappa, 2 * (self.kappa + 1))
        return Fraction(1, 2)

    def theta_prime(self) -> Fraction:
        """2*theta - 1, which is 1/(kappa+1), 0 or -1/(kappa+1)"""
        return 2 * self.theta() - 1

    def reflect(self) -> "BoundaryParam":
        """The parameter 1 - theta"""
        if self.variant is Variant.UPPER:
            return BoundaryParam.lower(self.kappa)
        if self.variant is Variant.LOWER:
            return BoundaryParam.upper(self.kappa)
        return self

    def check_cap(self, settings: Settings = DEFAULT_SETTINGS) -> "BoundaryParam":
        """Reject kappa above the configured cap"""
        if self.kappa is not None and self.kappa > settings.kappa_cap:
            raise ParameterError(f"kappa={self.kappa} exceeds the configured cap {settings.kappa_cap}")
        return self

    def sort_key(self):
        """Order by theta, descending from upper:0 through half to lower:0"""
        return -self.theta()

    def __str__(self) -> str:
        if self.variant is Variant.HALF:
            return "half"
        return f"{self.variant.value}:{self.kappa}"

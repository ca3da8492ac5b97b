"""Random D-arrangements realising the extreme solutions"""

from typing import Optional

from eulerboundary.arrangements.bucket import DECREASING, INCREASING, BucketSortArrangement
from eulerboundary.arrangements.exchangeable import ExchangeableArrangement
from eulerboundary.core.base import RandomArrangement
from eulerboundary.core.params import BoundaryParam, Variant
from eulerboundary.core.rng import RngStream


def arrangement_for(theta: BoundaryParam, rng: Optional[RngStream] = None) -> RandomArrangement:
    """Sampler whose level-n law is W_{n, D(pi)}(theta)"""
    if theta.variant is Variant.UPPER:
        return BucketSortArrangement(theta.kappa, rng, INCREASING)
    if theta.variant is Variant.LOWER:
        return BucketSortArrangement(theta.kappa, rng, DECREASING)
    return ExchangeableArrangement(rng)


__all__ = [
    "BucketSortArrangement",
    "ExchangeableArrangement",
    "arrangement_for",
]

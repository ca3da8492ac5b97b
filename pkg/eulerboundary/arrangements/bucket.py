"""
Bucket sorting

Each label 1, 2, ... is sent to one of kappa+1 ordered buckets uniformly and
independently; labels are sorted within buckets and the buckets concatenated.
Increasing order within buckets realises UPPER(kappa), decreasing order
realises LOWER(kappa).
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from eulerboundary.arrangements.descents import ArrangementPrefix, batch_descent_counts, descents
from eulerboundary.boundary.extreme import extreme_entry
from eulerboundary.core.base import RandomArrangement
from eulerboundary.core.errors import ParameterError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.rng import RngStream

logger = logging.getLogger(__name__)

INCREASING = "increasing"
DECREASING = "decreasing"
ORDERS = (INCREASING, DECREASING)


def _sort_keys(buckets: np.ndarray, order: str) -> np.ndarray:
    """Keys whose argsort lists labels bucket by bucket in the requested order"""
    n = buckets.shape[-1]
    labels = np.arange(1, n + 1, dtype=np.int64)
    within = labels if order == INCREASING else (n + 1 - labels)
    return buckets.astype(np.int64) * (n + 1) + within


class BucketSortArrangement(RandomArrangement):
    """
    Bucket sort driven by one infinite allocation stream

    prefix(m) reads the first m allocations, so prefixes are consistent under
    removal of the largest label.

    Example:
        >>> arr = BucketSortArrangement(0, rng=RngStream(1))
        >>> arr.sample(4)
        (1, 2, 3, 4)
    """

    def __init__(self, kappa: int, rng: Optional[RngStream] = None, order: str = INCREASING):
        """
        Initialize bucket sort

        Args:
            kappa: Number of buckets minus one
            rng: Stream for allocations
            order: "increasing" or "decreasing" within buckets
        """
        super().__init__(rng)
        if not isinstance(kappa, int) or kappa < 0:
            raise ParameterError(f"kappa must be an integer >= 0, got {kappa!r}")
        if order not in ORDERS:
            raise ParameterError(f"order must be one of {ORDERS}, got {order!r}")
        self.kappa = kappa
        self.order = order
        self._allocation = np.empty(0, dtype=np.int64)

    @property
    def boundary_param(self) -> BoundaryParam:
        if self.order == INCREASING:
            return BoundaryParam.upper(self.kappa)
        return BoundaryParam.lower(self.kappa)

    @property
    def allocation(self) -> Tuple[int, ...]:
        """Bucket index of each label drawn so far"""
        return tuple(int(b) for b in self._allocation)

    def extend(self, n: int) -> None:
        missing = n - self._allocation.size
        if missing > 0:
            fresh = self.rng.integers(0, self.kappa + 1, size=missing)
            self._allocation = np.concatenate([self._allocation, fresh.astype(np.int64)])

    def prefix(self, m: int) -> Tuple[int, ...]:
        if m < 1:
            raise ParameterError(f"prefix length must be >= 1, got {m}")
        self.extend(m)
        keys = _sort_keys(self._allocation[:m], self.order)
        return tuple(int(i) + 1 for i in np.argsort(keys, kind="stable"))

    def sample_batch(self, n: int, trials: int) -> np.ndarray:
        buckets = self.rng.integers(0, self.kappa + 1, size=(trials, n))
        keys = _sort_keys(buckets, self.order)
        return np.argsort(keys, axis=1, kind="stable") + 1

    def exact_probability(self, perm: Sequence[int]) -> Fraction:
        count, _ = descents(perm)
        return extreme_entry(self.boundary_param, len(perm), count)


def bucket_sort(
    kappa: int,
    n: int,
    rng: Optional[RngStream] = None,
    order: str = INCREASING,
) -> ArrangementPrefix:
    """
    One bucket-sorted permutation of [n]

    Args:
        kappa: kappa+1 buckets
        n: Number of labels, >= 1
        rng: Random stream
        order: "increasing" (at most kappa descents) or "decreasing" (at least n-1-kappa)

    Returns:
        ArrangementPrefix of length n
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return ArrangementPrefix(BucketSortArrangement(kappa, rng, order).sample(n))


def prefix_descent_counts(buckets: np.ndarray, order: str = INCREASING) -> np.ndarray:
    """
    D(pi_m) for every prefix of every allocation row

    Args:
        buckets: (trials, n) bucket indices, one infinite allocation truncated at n per row

    Returns:
        (trials, n) array whose column m-1 holds the descent count of the level-m permutation
    """
    trials, n = buckets.shape
    counts = np.zeros((trials, n), dtype=np.int64)
    for m in range(2, n + 1):
        perms = np.argsort(_sort_keys(buckets[:, :m], order), axis=1, kind="stable") + 1
        counts[:, m - 1] = batch_descent_counts(perms)
    return counts


def allocation_to_permutation(allocation: Sequence[int], order: str = INCREASING) -> Tuple[int, ...]:
    """Permutation produced by a given allocation of labels 1..n to buckets"""
    if order not in ORDERS:
        raise ParameterError(f"order must be one of {ORDERS}, got {order!r}")
    keys = _sort_keys(np.asarray(allocation, dtype=np.int64), order)
    return tuple(int(i) + 1 for i in np.argsort(keys, kind="stable"))

"""
The exchangeable arrangement: labels ranked by i.i.d. uniform keys
"""

import logging
import math
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from eulerboundary.arrangements.descents import ArrangementPrefix, validate_permutation
from eulerboundary.core.base import RandomArrangement
from eulerboundary.core.errors import ParameterError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.rng import RngStream

logger = logging.getLogger(__name__)


class ExchangeableArrangement(RandomArrangement):
    """
    Label i precedes label j iff X_i < X_j, X_1, X_2, ... uniform on [0, 1)

    The level-n permutation is uniform on Perm(n) and depends only on
    X_1..X_n. A key equal to an earlier key is redrawn, so keys are distinct.
    """

    def __init__(self, rng: Optional[RngStream] = None):
        super().__init__(rng)
        self._keys = np.empty(0, dtype=np.float64)

    @property
    def boundary_param(self) -> BoundaryParam:
        return BoundaryParam.half()

    @property
    def keys(self) -> Tuple[float, ...]:
        return tuple(float(x) for x in self._keys)

    def extend(self, n: int) -> None:
        while self._keys.size < n:
            x = self.rng.random()
            if np.any(self._keys == x):
                logger.warning("uniform key collision at label %d; redrawing", self._keys.size + 1)
                continue
            self._keys = np.append(self._keys, x)

    def prefix(self, m: int) -> Tuple[int, ...]:
        if m < 1:
            raise ParameterError(f"prefix length must be >= 1, got {m}")
        self.extend(m)
        return tuple(int(i) + 1 for i in np.argsort(self._keys[:m], kind="stable"))

    def sample_batch(self, n: int, trials: int) -> np.ndarray:
        keys = self.rng.random((trials, n))
        ordered = np.sort(keys, axis=1)
        tied = np.any(ordered[:, 1:] == ordered[:, :-1], axis=1) if n > 1 else np.zeros(trials, bool)
        while np.any(tied):
            logger.warning("redrawing %d rows with tied uniform keys", int(tied.sum()))
            keys[tied] = self.rng.random((int(tied.sum()), n))
            ordered = np.sort(keys, axis=1)
            tied = np.any(ordered[:, 1:] == ordered[:, :-1], axis=1)
        return np.argsort(keys, axis=1, kind="stable") + 1

    def exact_probability(self, perm: Sequence[int]) -> Fraction:
        return Fraction(1, math.factorial(len(validate_permutation(perm))))


def exchangeable_sample(n: int, rng: Optional[RngStream] = None) -> ArrangementPrefix:
    """Uniform permutation of [n] from ranks of n uniform draws"""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return ArrangementPrefix(ExchangeableArrangement(rng).sample(n))

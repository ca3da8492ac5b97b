"""
The Eulerian number triangle and its graph structure

Vertices (n, k) with 1 <= n and 0 <= k <= n-1. Vertex (n, k) is joined to
(n+1, k) by k+1 edges and to (n+1, k+1) by n-k edges, so the number of
standard paths ending at (n, k) is the Eulerian number <n, k>.
"""

import logging
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

from eulerboundary.core.config import DEFAULT_SETTINGS, Settings
from eulerboundary.core.errors import (
    AdjacencyError,
    EnumerationSizeError,
    InputFormatError,
    ParameterError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class TriangleIndex:
    """Vertex (n, k) of the Eulerian graph"""

    n: int
    k: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.k, int):
            raise ParameterError(f"vertex coordinates must be integers, got ({self.n!r}, {self.k!r})")
        if self.n < 1 or not 0 <= self.k <= self.n - 1:
            raise ParameterError(f"({self.n},{self.k}) is not a vertex: need n >= 1 and 0 <= k <= n-1")

    @classmethod
    def parse(cls, text: str) -> "TriangleIndex":
        """Parse "n,k" (parentheses optional)"""
        parts = text.strip().strip("()").split(",")
        if len(parts) != 2:
            raise InputFormatError(f"expected 'n,k', got {text!r}")
        try:
            return cls(int(parts[0]), int(parts[1]))
        except ValueError as exc:
            if isinstance(exc, ParameterError):
                raise
            raise InputFormatError(f"expected 'n,k', got {text!r}") from exc

    @property
    def is_root(self) -> bool:
        return self.n == 1

    def lower_neighbors(self) -> List["TriangleIndex"]:
        """Vertices on level n-1 reachable in one backward step"""
        if self.n == 1:
            return []
        return [
            TriangleIndex(self.n - 1, k)
            for k in (self.k, self.k - 1)
            if 0 <= k <= self.n - 2
        ]

    def __str__(self) -> str:
        return f"({self.n},{self.k})"


def binomial(a: int, b: int) -> int:
    """C(a, b), with C(a, b) = 0 whenever b < 0, a < 0 or b > a"""
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


class EulerianTable:
    """
    Row-by-row cache of Eulerian numbers

    Rows are extended on demand under a lock; reads of rows already present
    never block.

    Example:
        >>> table = EulerianTable()
        >>> table.row(6)
        (1, 57, 302, 302, 57, 1)
    """

    def __init__(self, max_row: int = 1):
        self._rows: List[Tuple[int, ...]] = [(1,)]
        self._lock = threading.Lock()
        if max_row > 1:
            self.ensure(max_row)

    @property
    def max_row(self) -> int:
        return len(self._rows)

    def ensure(self, n: int) -> None:
        """Extend the cache through row n"""
        if n <= len(self._rows):
            return
        with self._lock:
            start = len(self._rows)
            while len(self._rows) < n:
                prev = self._rows[-1]
                m = len(self._rows) + 1
                row = []
                for k in range(m):
                    stay = prev[k] if k <= m - 2 else 0
                    step = prev[k - 1] if k >= 1 else 0
                    row.append((k + 1) * stay + (m - k) * step)
                self._rows.append(tuple(row))
            if len(self._rows) > start:
                logger.debug("Eulerian table extended from row %d to row %d", start, len(self._rows))

    def row(self, n: int) -> Tuple[int, ...]:
        """Row n as a tuple (<n,0>, ..., <n,n-1>)"""
        if n < 1:
            raise ParameterError(f"row index must be >= 1, got {n}")
        self.ensure(n)
        return self._rows[n - 1]

    def get(self, n: int, k: int) -> int:
        """<n, k>, zero outside 0 <= k <= n-1"""
        if n < 1:
            raise ParameterError(f"row index must be >= 1, got {n}")
        if k < 0 or k > n - 1:
            return 0
        return self.row(n)[k]

    def __call__(self, n: int, k: int) -> int:
        return self.get(n, k)


DEFAULT_TABLE = EulerianTable()


def _table(table: Optional[EulerianTable]) -> EulerianTable:
    return DEFAULT_TABLE if table is None else table


def eulerian(n: int, k: int, table: Optional[EulerianTable] = None) -> int:
    """
    Eulerian number <n, k> by the forward recursion

    Args:
        n: Level, n >= 1
        k: Descent count; out-of-range k gives 0

    Returns:
        Number of permutations of [n] with exactly k descents

    Example:
        >>> eulerian(6, 1)
        57
    """
    return _table(table).get(n, k)


def eulerian_row(n: int, table: Optional[EulerianTable] = None) -> Tuple[int, ...]:
    """Row n of the triangle"""
    return _table(table).row(n)


def eulerian_explicit(n: int, k: int) -> int:
    """
    <n, k> by the alternating sum  sum_{j<=k} (-1)^j C(n+1, j) (k+1-j)^n

    Raises:
        ParameterError: if k is outside 0..n-1
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0 <= k <= n - 1:
        raise ParameterError(f"explicit formula needs 0 <= k <= n-1, got n={n}, k={k}")
    return sum((-1) ** j * binomial(n + 1, j) * (k + 1 - j) ** n for j in range(k + 1))


def transition_prob(
    source: TriangleIndex,
    target: TriangleIndex,
    table: Optional[EulerianTable] = None,
) -> Fraction:
    """
    Backward transition probability from level n to level n-1

    Args:
        source: Vertex (n, k) with n >= 2
        target: (n-1, k) or (n-1, k-1)

    Returns:
        (k+1)<n-1,k>/<n,k> for the first target, (n-k)<n-1,k-1>/<n,k> for the second

    Raises:
        AdjacencyError: if target is not one of the two lower neighbours
    """
    tab = _table(table)
    n, k = source.n, source.k
    if n < 2 or target.n != n - 1 or target.k not in (k, k - 1):
        raise AdjacencyError(f"{source} -> {target} is not a backward edge")
    total = tab.get(n, k)
    if target.k == k:
        return Fraction((k + 1) * tab.get(n - 1, k), total)
    return Fraction((n - k) * tab.get(n - 1, k - 1), total)


def verify_worpitzky(n: int, kappa: int, table: Optional[EulerianTable] = None) -> bool:
    """(kappa+1)^n == sum_k <n,k> C(n+kappa-k, n)"""
    if n < 1 or kappa < 0:
        raise ParameterError(f"need n >= 1 and kappa >= 0, got n={n}, kappa={kappa}")
    row = eulerian_row(n, table)
    return (kappa + 1) ** n == sum(e * binomial(n + kappa - k, n) for k, e in enumerate(row))


def verify_bucket_identity(n: int, kappa: int) -> bool:
    """
    Binomial identity behind the bucket-sort solution satisfying the dual recursion:
    (kappa+1) C(n+kappa-k, n) == (k+1) C(n+kappa+1-k, n+1) + (n-k) C(n+kappa-k, n+1)
    for every 0 <= k <= n-1.
    """
    return all(
        (kappa + 1) * binomial(n + kappa - k, n)
        == (k + 1) * binomial(n + kappa + 1 - k, n + 1) + (n - k) * binomial(n + kappa - k, n + 1)
        for k in range(n)
    )


def verify_recursion(n_max: int, table: Optional[EulerianTable] = None) -> bool:
    """Every entry up to row n_max satisfies the forward recursion"""
    tab = _table(table)
    for n in range(2, n_max + 1):
        for k in range(n):
            if tab.get(n, k) != (k + 1) * tab.get(n - 1, k) + (n - k) * tab.get(n - 1, k - 1):
                return False
    return True


def verify_row_sums(n_max: int, table: Optional[EulerianTable] = None) -> bool:
    return all(sum(eulerian_row(n, table)) == math.factorial(n) for n in range(1, n_max + 1))


def verify_symmetry(n_max: int, table: Optional[EulerianTable] = None) -> bool:
    for n in range(1, n_max + 1):
        row = eulerian_row(n, table)
        if row != row[::-1]:
            return False
    return True


def verify_explicit(n_max: int, table: Optional[EulerianTable] = None) -> bool:
    """Explicit alternating sum agrees with the recursion on rows 1..n_max"""
    return all(
        eulerian_explicit(n, k) == eulerian(n, k, table)
        for n in range(1, n_max + 1)
        for k in range(n)
    )


def enumerate_labeled_paths(n: int, k: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """
    All standard edge-labeled paths from the root to (n, k)

    Yields:
        (ks, labels): ks[m-1] is the descent coordinate on level m, labels[m-1]
        is the label of the edge from level m to level m+1
    """
    target = TriangleIndex(n, k)
    ks: List[int] = [0]
    labels: List[int] = []

    def walk(m: int, j: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        if m == target.n:
            if j == target.k:
                yield tuple(ks), tuple(labels)
            return
        remaining = target.n - m
        # (m, j) -> (m+1, j) with j+1 edges, (m, j) -> (m+1, j+1) with m-j edges
        for next_j, multiplicity in ((j, j + 1), (j + 1, m - j)):
            if not next_j <= target.k <= next_j + remaining - 1:
                continue
            for label in range(multiplicity):
                ks.append(next_j)
                labels.append(label)
                yield from walk(m + 1, next_j)
                ks.pop()
                labels.pop()

    yield from walk(1, 0)


def verify_dimension(n: int, k: int, settings: Settings = DEFAULT_SETTINGS) -> bool:
    """
    Count standard labeled paths to (n, k) by enumeration and compare with <n, k>

    Raises:
        EnumerationSizeError: if n exceeds settings.enumeration_max_row
    """
    if n > settings.enumeration_max_row:
        raise EnumerationSizeError(
            f"path enumeration is limited to n <= {settings.enumeration_max_row}, got {n}"
        )
    count = sum(1 for _ in enumerate_labeled_paths(n, k))
    return count == eulerian(n, k)


def descent_distribution(n: int, table: Optional[EulerianTable] = None) -> Tuple[Fraction, ...]:
    """Law of the descent count of a uniform permutation of [n]: <n,k>/n!"""
    total = math.factorial(n)
    return tuple(Fraction(e, total) for e in eulerian_row(n, table))


def exact_descent_moments(n: int, table: Optional[EulerianTable] = None) -> Tuple[Fraction, Fraction]:
    """Exact mean and variance of the descent count of a uniform permutation of [n]"""
    law = descent_distribution(n, table)
    mean = sum(k * p for k, p in enumerate(law))
    variance = sum((k - mean) ** 2 * p for k, p in enumerate(law))
    return mean, variance


def stated_descent_moments(n: int) -> Tuple[Fraction, Fraction]:
    """Mean (n-1)/2 and variance (n-1)/12, the moments as usually quoted"""
    return Fraction(n - 1, 2), Fraction(n - 1, 12)

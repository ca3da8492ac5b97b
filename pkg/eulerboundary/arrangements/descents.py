"""
Descents and projections of permutations in one-row notation
"""

from typing import FrozenSet, Iterable, Sequence, Tuple

import numpy as np

from eulerboundary.core.errors import PermutationError


def validate_permutation(perm: Iterable[int]) -> Tuple[int, ...]:
    """Return perm as a tuple, checking that it is a permutation of 1..n"""
    try:
        values = tuple(int(v) for v in perm)
    except (TypeError, ValueError) as exc:
        raise PermutationError(f"not a sequence of integers: {perm!r}") from exc
    if not values or sorted(values) != list(range(1, len(values) + 1)):
        raise PermutationError(f"{values!r} is not a permutation of 1..{len(values)}")
    return values


def parse_permutation(text: str) -> Tuple[int, ...]:
    """Parse "7356241" (single digits) or "7,3,5,6,2,4,1" """
    text = text.strip()
    if "," in text or " " in text:
        parts = [p for p in text.replace(",", " ").split() if p]
    else:
        parts = list(text)
    return validate_permutation(parts)


def descents(perm: Sequence[int]) -> Tuple[int, FrozenSet[int]]:
    """
    Descent count and positions

    Args:
        perm: Permutation of [n] in one-row notation

    Returns:
        (D(perm), {j : perm(j) > perm(j+1)}) with one-based positions

    Example:
        >>> descents((7, 3, 5, 6, 2, 4, 1))
        (3, frozenset({1, 4, 6}))
    """
    values = validate_permutation(perm)
    positions = frozenset(j + 1 for j in range(len(values) - 1) if values[j] > values[j + 1])
    return len(positions), positions


def descent_count(perm: Sequence[int]) -> int:
    return descents(perm)[0]


def project(perm: Sequence[int]) -> Tuple[int, ...]:
    """Remove the largest label"""
    values = validate_permutation(perm)
    n = len(values)
    if n == 1:
        raise PermutationError("cannot project a permutation of [1]")
    return tuple(v for v in values if v != n)


def projections(perm: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """(pi_1, ..., pi_n): iterated remove-largest projections, shortest first"""
    values = validate_permutation(perm)
    return tuple(tuple(v for v in values if v <= m) for m in range(1, len(values) + 1))


def batch_descent_counts(perms: np.ndarray) -> np.ndarray:
    """Descent counts of each row of a (trials, n) permutation array"""
    if perms.shape[1] < 2:
        return np.zeros(perms.shape[0], dtype=np.int64)
    return np.count_nonzero(perms[:, :-1] > perms[:, 1:], axis=1)


def permutation_codes(perms: np.ndarray) -> np.ndarray:
    """Encode each row as an integer in base n so that rows can be tallied with np.unique"""
    n = perms.shape[1]
    weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (perms.astype(np.int64) - 1) @ weights


def decode_permutation(code: int, n: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(n):
        code, digit = divmod(int(code), n)
        digits.append(digit + 1)
    return tuple(reversed(digits))


class ArrangementPrefix:
    """
    Level-n permutation of a random arrangement

    Attributes:
        n: Level
        perm: Permutation of [n] in one-row notation
    """

    __slots__ = ("n", "perm")

    def __init__(self, perm: Sequence[int]):
        self.perm = validate_permutation(perm)
        self.n = len(self.perm)

    @property
    def descent_count(self) -> int:
        return descents(self.perm)[0]

    def project(self) -> "ArrangementPrefix":
        """Prefix of length n-1"""
        return ArrangementPrefix(project(self.perm))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ArrangementPrefix):
            return NotImplemented
        return self.perm == other.perm

    def __hash__(self):
        return hash(self.perm)

    def __repr__(self) -> str:
        return f"ArrangementPrefix({self.perm})"

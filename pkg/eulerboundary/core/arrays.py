"""
Triangular arrays of exact rationals
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from eulerboundary.core.errors import InputFormatError, ParameterError
from eulerboundary.core.triangle import TriangleIndex

RationalLike = Union[int, Fraction, str]


def as_fraction(value: RationalLike, *, name: str = "value") -> Fraction:
    """
    Convert an int, Fraction or "p/q" string to a Fraction

    Floats are refused: every value in the exact layer must be exact.
    """
    if isinstance(value, bool):
        raise InputFormatError(f"{name} must be rational, got a bool")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputFormatError(f"{name}: cannot parse {value!r} as a rational") from exc
    raise InputFormatError(f"{name} must be int, Fraction or 'p/q' string; got {type(value).__name__}")


class TriangularArray:
    """
    Rows first_row..max_row of an array (V_nk), 0 <= k <= n-1

    Entries may be negative; nothing here assumes membership in the solution set.

    Example:
        >>> arr = TriangularArray([[1], [Fraction(1, 2), Fraction(1, 2)]])
        >>> arr[2, 1]
        Fraction(1, 2)
    """

    def __init__(self, rows: Iterable[Sequence[RationalLike]], first_row: int = 1):
        if first_row < 1:
            raise ParameterError(f"first_row must be >= 1, got {first_row}")
        self._first = first_row
        self._rows: Dict[int, Tuple[Fraction, ...]] = {}
        for offset, row in enumerate(rows):
            n = first_row + offset
            values = tuple(as_fraction(v, name=f"entry ({n},{k})") for k, v in enumerate(row))
            if len(values) != n:
                raise ParameterError(f"row {n} must have {n} entries, got {len(values)}")
            self._rows[n] = values
        if not self._rows:
            raise ParameterError("array needs at least one row")

    @classmethod
    def from_mapping(cls, rows: Mapping[int, Sequence[RationalLike]]) -> "TriangularArray":
        first = min(rows)
        return cls([rows[n] for n in range(first, max(rows) + 1)], first_row=first)

    @property
    def first_row(self) -> int:
        return self._first

    @property
    def max_row(self) -> int:
        return self._first + len(self._rows) - 1

    def has_row(self, n: int) -> bool:
        return n in self._rows

    def row(self, n: int) -> Tuple[Fraction, ...]:
        try:
            return self._rows[n]
        except KeyError:
            raise ParameterError(f"row {n} is outside {self._first}..{self.max_row}") from None

    def entry(self, n: int, k: int) -> Fraction:
        row = self.row(n)
        if not 0 <= k <= n - 1:
            raise ParameterError(f"({n},{k}) is not a vertex")
        return row[k]

    def __getitem__(self, index) -> Fraction:
        if isinstance(index, TriangleIndex):
            return self.entry(index.n, index.k)
        n, k = index
        return self.entry(n, k)

    def rows(self) -> Iterator[Tuple[int, Tuple[Fraction, ...]]]:
        for n in range(self._first, self.max_row + 1):
            yield n, self._rows[n]

    def to_lists(self) -> list:
        return [list(row) for _, row in self.rows()]

    def window(self, first_row: int, last_row: int) -> "TriangularArray":
        """Rows first_row..last_row as a new array of the same class"""
        if first_row < self._first or last_row > self.max_row or first_row > last_row:
            raise ParameterError(
                f"window {first_row}..{last_row} is outside {self._first}..{self.max_row}"
            )
        return type(self)([self._rows[n] for n in range(first_row, last_row + 1)], first_row=first_row)

    def left_column(self) -> "LeftColumn":
        if self._first != 1:
            raise ParameterError("left column needs the array to start at row 1")
        return LeftColumn(tuple(self._rows[n][0] for n in range(1, self.max_row + 1)))

    def _check_shape(self, other: "TriangularArray") -> None:
        if (self._first, self.max_row) != (other.first_row, other.max_row):
            raise ParameterError(
                f"shape mismatch: rows {self._first}..{self.max_row} vs {other.first_row}..{other.max_row}"
            )

    def scale(self, factor: RationalLike) -> "TriangularArray":
        c = as_fraction(factor, name="factor")
        return type(self)([[c * v for v in row] for _, row in self.rows()], first_row=self._first)

    def __add__(self, other: "TriangularArray") -> "TriangularArray":
        self._check_shape(other)
        return type(self)(
            [[a + b for a, b in zip(row, other.row(n))] for n, row in self.rows()],
            first_row=self._first,
        )

    def __sub__(self, other: "TriangularArray") -> "TriangularArray":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriangularArray):
            return NotImplemented
        return self._first == other.first_row and self._rows == dict(other.rows())

    def __hash__(self):
        return hash((self._first, tuple(self._rows.items())))

    def max_abs_difference(self, other: "TriangularArray", last_row: Optional[int] = None) -> Fraction:
        """Largest |self - other| over rows shared by both, up to last_row"""
        lo = max(self._first, other.first_row)
        hi = min(self.max_row, other.max_row)
        if last_row is not None:
            hi = min(hi, last_row)
        deviation = Fraction(0)
        for n in range(lo, hi + 1):
            for a, b in zip(self.row(n), other.row(n)):
                deviation = max(deviation, abs(a - b))
        return deviation

    def first_negative(self) -> Optional[TriangleIndex]:
        for n, row in self.rows():
            for k, value in enumerate(row):
                if value < 0:
                    return TriangleIndex(n, k)
        return None

    def first_recursion_violation(self) -> Optional[TriangleIndex]:
        """First (n, k) with V_nk != (k+1) V_{n+1,k} + (n-k) V_{n+1,k+1}"""
        for n in range(self._first, self.max_row):
            upper = self._rows[n + 1]
            for k, value in enumerate(self._rows[n]):
                if value != (k + 1) * upper[k] + (n - k) * upper[k + 1]:
                    return TriangleIndex(n, k)
        return None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(rows={self._first}..{self.max_row})"


class SolutionArray(TriangularArray):
    """
    Finite window onto a normalised nonnegative solution of the dual recursion

    The class marks intent; boundary.check_solution verifies the invariants.
    """


@dataclass(frozen=True)
class LeftColumn:
    """The sequence (V_10, V_20, ..., V_N0), which determines a solution"""

    values: Tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(as_fraction(v, name="left column entry") for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ParameterError("left column must be nonempty")
        if values[0] != 1:
            raise ParameterError(f"left column must start with V_10 = 1, got {values[0]}")

    @classmethod
    def of(cls, values: Iterable[RationalLike]) -> "LeftColumn":
        return cls(tuple(values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> Fraction:
        """V_n0, one-based"""
        if not 1 <= n <= len(self.values):
            raise ParameterError(f"row {n} is outside 1..{len(self.values)}")
        return self.values[n - 1]

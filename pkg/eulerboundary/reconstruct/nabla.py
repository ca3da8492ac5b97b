"""
Reconstruction of a triangular array from its left column

Rearranging the dual recursion gives
    V_{n+1,k+1} = (V_nk - (k+1) V_{n+1,k}) / (n-k),
so the column (V_n0) fixes every other entry.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from eulerboundary.core.arrays import LeftColumn, TriangularArray
from eulerboundary.core.errors import ParameterError
from eulerboundary.core.triangle import TriangleIndex


def nabla(left: LeftColumn) -> TriangularArray:
    """
    Fill rows 1..N from V_10, ..., V_N0

    The output may have negative entries; membership is decided by in_v_check.

    Example:
        >>> nabla(LeftColumn.of([1, 1, 1]))[3, 2]
        Fraction(0, 1)
    """
    rows: List[List[Fraction]] = [[left[1]]]
    for n in range(1, len(left)):
        prev = rows[-1]
        row = [left[n + 1]]
        for k in range(n):
            row.append((prev[k] - (k + 1) * row[k]) / (n - k))
        rows.append(row)
    return TriangularArray(rows)


def left_column_of(array: TriangularArray) -> LeftColumn:
    """(V_10, ..., V_N0) of an array starting at row 1"""
    return array.left_column()


@dataclass(frozen=True)
class MembershipVerdict:
    """
    Whether a finite window can be the start of a member of the solution set

    Attributes:
        member: True if every check passed
        reason: First violated constraint, None for members
        location: Vertex of the violation, when it has one
    """

    member: bool
    reason: Optional[str] = None
    location: Optional[TriangleIndex] = None

    def __bool__(self) -> bool:
        return self.member

    def as_dict(self) -> dict:
        return {
            "member": self.member,
            "reason": self.reason,
            "location": None if self.location is None else str(self.location),
        }


def in_v_check(array: TriangularArray) -> MembershipVerdict:
    """
    Test V_10 = 1, nonnegativity and the dual recursion on rows 1..N

    Example:
        >>> in_v_check(TriangularArray([[1], [Fraction(11, 10), Fraction(-1, 10)]])).reason
        'negative entry at (2,1)'
    """
    if array.first_row != 1:
        raise ParameterError(f"membership needs rows from 1, array starts at row {array.first_row}")
    if array[1, 0] != 1:
        return MembershipVerdict(False, f"V_10 = {array[1, 0]}, expected 1", TriangleIndex(1, 0))
    negative = array.first_negative()
    if negative is not None:
        return MembershipVerdict(False, f"negative entry at {negative}", negative)
    broken = array.first_recursion_violation()
    if broken is not None:
        return MembershipVerdict(False, f"dual recursion fails at {broken}", broken)
    return MembershipVerdict(True)


def check_left_column(left: LeftColumn) -> MembershipVerdict:
    """in_v_check applied to nabla(left)"""
    return in_v_check(nabla(left))

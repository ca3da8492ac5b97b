"""
Extreme solutions of the dual recursion

For UPPER(kappa):  W_nk = C(n+kappa-k, n) / (kappa+1)^n
For LOWER(kappa):  W_nk = C(kappa+k+1, n) / (kappa+1)^n
For HALF:          W_nk = 1/n!

The same values come out of the product (1/n!) prod_{i=-k}^{n-1-k} (1 + theta' i),
theta' = 2 theta - 1, which is kept as an independent cross-check.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from eulerboundary.core.arrays import SolutionArray, TriangularArray
from eulerboundary.core.config import DEFAULT_SETTINGS, Settings
from eulerboundary.core.errors import ParameterError
from eulerboundary.core.params import BoundaryParam, Variant
from eulerboundary.core.triangle import EulerianTable, TriangleIndex, binomial, eulerian_row

logger = logging.getLogger(__name__)


def _check_vertex(n: int, k: int) -> None:
    if n < 1 or not 0 <= k <= n - 1:
        raise ParameterError(f"({n},{k}) is not a vertex: need n >= 1 and 0 <= k <= n-1")


def extreme_entry(theta: BoundaryParam, n: int, k: int) -> Fraction:
    """W_nk(theta) from the closed forms"""
    _check_vertex(n, k)
    if theta.variant is Variant.HALF:
        return Fraction(1, math.factorial(n))
    kappa = theta.kappa
    if theta.variant is Variant.UPPER:
        return Fraction(binomial(n + kappa - k, n), (kappa + 1) ** n)
    return Fraction(binomial(kappa + k + 1, n), (kappa + 1) ** n)


def extreme_solution(
    theta: BoundaryParam,
    max_row: int,
    settings: Settings = DEFAULT_SETTINGS,
) -> SolutionArray:
    """
    Extreme solution W(theta) on rows 1..max_row

    Args:
        theta: Boundary parameter; kappa must not exceed settings.kappa_cap
        max_row: Last row, >= 1

    Returns:
        SolutionArray of exact entries

    Example:
        >>> extreme_solution(BoundaryParam.upper(1), 2)[2, 0]
        Fraction(3, 4)
    """
    if max_row < 1:
        raise ParameterError(f"max_row must be >= 1, got {max_row}")
    theta.check_cap(settings)
    return SolutionArray(
        [[extreme_entry(theta, n, k) for k in range(n)] for n in range(1, max_row + 1)]
    )


def unified_formula(theta: BoundaryParam, n: int, k: int) -> Fraction:
    """(1/n!) prod_{i=-k}^{-k+n-1} (1 + theta' i)"""
    _check_vertex(n, k)
    tp = theta.theta_prime()
    product = Fraction(1)
    for i in range(-k, -k + n):
        product *= 1 + tp * i
    return product / math.factorial(n)


def left_column_kernel(theta: BoundaryParam, n: int) -> Fraction:
    """W_n0(theta) = prod_{i<n} (1 + theta' i)/(1 + i), the moment-problem kernel"""
    tp = theta.theta_prime()
    value = Fraction(1)
    for i in range(n):
        value *= (1 + tp * i) / Fraction(1 + i)
    return value


def tilde_transform(array: TriangularArray, table: Optional[EulerianTable] = None) -> TriangularArray:
    """V~_nk = <n,k> V_nk; rows of a solution become probability vectors"""
    return TriangularArray(
        [[e * v for e, v in zip(eulerian_row(n, table), row)] for n, row in array.rows()],
        first_row=array.first_row,
    )


@dataclass
class SolutionCheck:
    """Outcome of checking the invariants of a solution window"""

    normalized: bool
    nonnegative: bool
    dual_recursion: bool
    row_sums: bool
    bound: bool
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.normalized and self.nonnegative and self.dual_recursion and self.row_sums and self.bound

    def as_dict(self) -> dict:
        return {
            "normalized": self.normalized,
            "nonnegative": self.nonnegative,
            "dual_recursion": self.dual_recursion,
            "row_sums": self.row_sums,
            "bound": self.bound,
            "violations": list(self.violations),
        }


def check_solution(array: TriangularArray, table: Optional[EulerianTable] = None) -> SolutionCheck:
    """
    Check V_10 = 1, nonnegativity, the dual recursion, unit tilde row sums and
    the bound V_nk <= 1/<n,k>
    """
    violations = []
    normalized = array.first_row > 1 or array[1, 0] == 1
    if not normalized:
        violations.append(f"V_10 = {array[1, 0]}, expected 1")
    negative = array.first_negative()
    if negative is not None:
        violations.append(f"negative entry at {negative}")
    broken = array.first_recursion_violation()
    if broken is not None:
        violations.append(f"dual recursion fails at {broken}")
    row_sums = True
    bound = True
    for n, row in array.rows():
        eul = eulerian_row(n, table)
        if sum(e * v for e, v in zip(eul, row)) != 1:
            row_sums = False
            violations.append(f"tilde row {n} does not sum to 1")
            break
    for n, row in array.rows():
        eul = eulerian_row(n, table)
        over = next((k for k, (e, v) in enumerate(zip(eul, row)) if e * v > 1), None)
        if over is not None:
            bound = False
            violations.append(f"bound V_nk <= 1/<n,k> fails at {TriangleIndex(n, over)}")
            break
    return SolutionCheck(
        normalized=normalized,
        nonnegative=negative is None,
        dual_recursion=broken is None,
        row_sums=row_sums,
        bound=bound,
        violations=violations,
    )


def check_symmetry(theta: BoundaryParam, max_row: int, settings: Settings = DEFAULT_SETTINGS) -> bool:
    """W_nk(theta) == W_{n,n-1-k}(1 - theta)"""
    w = extreme_solution(theta, max_row, settings)
    mirror = extreme_solution(theta.reflect(), max_row, settings)
    return all(w[n, k] == mirror[n, n - 1 - k] for n in range(1, max_row + 1) for k in range(n))


def check_support(theta: BoundaryParam, max_row: int, settings: Settings = DEFAULT_SETTINGS) -> bool:
    """
    UPPER(kappa) vanishes exactly for k > kappa, LOWER(kappa) exactly for
    k < n-1-kappa, HALF nowhere
    """
    w = extreme_solution(theta, max_row, settings)
    for n, row in w.rows():
        for k, value in enumerate(row):
            if theta.variant is Variant.UPPER:
                expect_zero = k > theta.kappa
            elif theta.variant is Variant.LOWER:
                expect_zero = k < n - 1 - theta.kappa
            else:
                expect_zero = False
            if (value == 0) != expect_zero:
                return False
    return True


def check_unified(theta: BoundaryParam, max_row: int, settings: Settings = DEFAULT_SETTINGS) -> bool:
    """The product formula reproduces the closed forms"""
    w = extreme_solution(theta, max_row, settings)
    return all(unified_formula(theta, n, k) == w[n, k] for n in range(1, max_row + 1) for k in range(n))


def check_parameter(theta: BoundaryParam, settings: Settings = DEFAULT_SETTINGS) -> bool:
    """theta is recovered as W_20"""
    return extreme_solution(theta, 2, settings)[2, 0] == theta.theta()


def kappa_limit_witness(
    kappa_max: int,
    rows: int,
    settings: Settings = DEFAULT_SETTINGS,
) -> List[Tuple[int, Fraction, Fraction]]:
    """
    Deviation of W^kappa and of its mirror from the HALF solution on rows 1..rows

    Both tend to 0 as kappa grows, which places HALF in the closure of the
    two sequences.

    Returns:
        (kappa, deviation of UPPER(kappa), deviation of LOWER(kappa)) per kappa
    """
    half = extreme_solution(BoundaryParam.half(), rows, settings)
    out = []
    for kappa in range(kappa_max + 1):
        up = extreme_solution(BoundaryParam.upper(kappa), rows, settings).max_abs_difference(half)
        low = extreme_solution(BoundaryParam.lower(kappa), rows, settings).max_abs_difference(half)
        out.append((kappa, up, low))
    logger.debug("kappa limit witness computed through kappa=%d on %d rows", kappa_max, rows)
    return out

"""
Mixture decomposition over the discrete boundary

Every member of the solution set is a unique convex combination of the
extreme solutions W(theta). Two estimators are offered:

- decompose_exact: finite known support, exact linear solve on the left
  column, then verification on every available row.
- decompose: blind, reads p(UPPER kappa) off V~_{N,kappa} and p(LOWER kappa)
  off V~_{N,N-1-kappa} for large N and attributes the rest to HALF, unless
  wing mass past the cut shows a parameter the cut leaves out.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from eulerboundary.boundary.extreme import extreme_solution, left_column_kernel, tilde_transform
from eulerboundary.core.arrays import SolutionArray, TriangularArray, as_fraction
from eulerboundary.core.config import DEFAULT_SETTINGS, Settings
from eulerboundary.core.errors import ParameterError, RankError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.triangle import EulerianTable, TriangleIndex, descent_distribution
from eulerboundary.reconstruct.nabla import in_v_check

logger = logging.getLogger(__name__)

EXACT = "exact"
LIMIT = "limit"
STABLE = "stable"
INDETERMINATE = "indeterminate"
INFEASIBLE = "infeasible"
SUPPORT_INSUFFICIENT = "support-insufficient"


@dataclass
class MixtureWeights:
    """
    Weights p(theta) of a decomposition and how far they can be trusted

    Attributes:
        weights: Estimated p(theta) per boundary parameter
        residual: Bound on the mass not reliably attributed
        status: exact, stable, indeterminate, infeasible or support-insufficient
        mode: "exact" or "limit"
        oscillating: Parameters whose estimates did not settle (limit mode)
        witness: First vertex where the re-mixed array disagrees (exact mode)
    """

    weights: Dict[BoundaryParam, Fraction]
    residual: Fraction = Fraction(0)
    status: str = EXACT
    mode: str = EXACT
    oscillating: List[BoundaryParam] = field(default_factory=list)
    witness: Optional[TriangleIndex] = None

    @property
    def ok(self) -> bool:
        return self.status in (EXACT, STABLE)

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def get(self, theta: BoundaryParam) -> Fraction:
        return self.weights.get(theta, Fraction(0))

    def items(self) -> List[Tuple[BoundaryParam, Fraction]]:
        """Weights ordered from upper:0 through half to lower:0"""
        return sorted(self.weights.items(), key=lambda item: item[0].sort_key())

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "status": self.status,
            "weights": [{"theta": str(t), "weight": w} for t, w in self.items()],
            "residual": self.residual,
            "oscillating": [str(t) for t in sorted(self.oscillating, key=BoundaryParam.sort_key)],
            "witness": None if self.witness is None else str(self.witness),
        }


def _normalize_support(support: Iterable[BoundaryParam]) -> List[BoundaryParam]:
    params = sorted(set(support), key=BoundaryParam.sort_key)
    if not params:
        raise ParameterError("support must contain at least one parameter")
    return params


def _combine(
    weights: Mapping[BoundaryParam, Fraction],
    max_row: int,
    settings: Settings,
) -> SolutionArray:
    rows = [[Fraction(0)] * n for n in range(1, max_row + 1)]
    for theta, weight in weights.items():
        if weight == 0:
            continue
        for n, row in extreme_solution(theta, max_row, settings).rows():
            target = rows[n - 1]
            for k, value in enumerate(row):
                target[k] += weight * value
    return SolutionArray(rows)


def mix(
    components: Mapping[BoundaryParam, object],
    max_row: int,
    settings: Settings = DEFAULT_SETTINGS,
) -> SolutionArray:
    """
    Convex combination sum p(theta) W(theta) on rows 1..max_row

    Args:
        components: theta -> weight (int, Fraction or "p/q"); nonnegative, summing to 1

    Example:
        >>> mix({BoundaryParam.half(): Fraction(1, 2), BoundaryParam.upper(0): Fraction(1, 2)}, 2)[2, 0]
        Fraction(3, 4)
    """
    if not components:
        raise ParameterError("a mixture needs at least one component")
    if max_row < 1:
        raise ParameterError(f"max_row must be >= 1, got {max_row}")
    weights = {theta: as_fraction(w, name=f"weight of {theta}") for theta, w in components.items()}
    negative = [str(t) for t, w in weights.items() if w < 0]
    if negative:
        raise ParameterError(f"mixture weights must be >= 0; negative for {', '.join(negative)}")
    total = sum(weights.values(), Fraction(0))
    if total != 1:
        raise ParameterError(f"mixture weights must sum to 1, got {total}")
    return _combine(weights, max_row, settings)


def _to_rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _to_fraction(value: sympy.Rational) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def _solve_left_column(
    support: Sequence[BoundaryParam],
    left: Sequence[Fraction],
) -> List[Fraction]:
    """Solve sum_theta p(theta) W_n0(theta) = V_n0 exactly"""
    m = len(support)
    design = sympy.Matrix(
        len(left), m,
        lambda i, j: _to_rational(left_column_kernel(support[j], i + 1)),
    )
    target = sympy.Matrix([_to_rational(v) for v in left])
    square = design[:m, :]
    if square.det() != 0:
        solution = square.LUsolve(target[:m, :])
    else:
        logger.warning("left-column system on rows 1..%d is singular; using all %d rows", m, len(left))
        normal = design.T * design
        if normal.det() == 0:
            raise RankError(f"extreme left columns of {', '.join(map(str, support))} are linearly dependent")
        solution = normal.LUsolve(design.T * target)
    return [_to_fraction(x) for x in solution]


def _first_mismatch(a: TriangularArray, b: TriangularArray) -> Optional[TriangleIndex]:
    for n, row in a.rows():
        for k, (x, y) in enumerate(zip(row, b.row(n))):
            if x != y:
                return TriangleIndex(n, k)
    return None


def decompose_exact(
    v: TriangularArray,
    support: Iterable[BoundaryParam],
    settings: Settings = DEFAULT_SETTINGS,
) -> MixtureWeights:
    """
    Exact weights of v over a known finite support

    Solves on the left column rows 1..|support|, then re-mixes and compares
    with v on every available row.

    Returns:
        MixtureWeights with status exact, infeasible (a negative weight) or
        support-insufficient (re-mixed array differs; witness set)

    Raises:
        RankError: if the extreme left columns are linearly dependent
    """
    params = _normalize_support(support)
    if v.first_row != 1:
        raise ParameterError(f"exact decomposition needs rows from 1, array starts at row {v.first_row}")
    if len(params) > v.max_row:
        raise ParameterError(f"support of size {len(params)} needs at least that many rows, got {v.max_row}")
    for theta in params:
        theta.check_cap(settings)

    left = list(v.left_column().values)
    solution = _solve_left_column(params, left)
    weights = dict(zip(params, solution))

    if any(w < 0 for w in solution):
        logger.info("exact decomposition has a negative weight")
        return MixtureWeights(weights, status=INFEASIBLE, mode=EXACT)

    remixed = _combine(weights, v.max_row, settings)
    witness = _first_mismatch(v, remixed)
    if witness is not None:
        residual = abs(v[witness] - remixed[witness])
        return MixtureWeights(weights, residual=residual, status=SUPPORT_INSUFFICIENT, mode=EXACT, witness=witness)
    return MixtureWeights(weights, status=EXACT, mode=EXACT)


def default_support(rows: int, kappa_cut: Optional[int] = None) -> List[BoundaryParam]:
    """
    upper:0..c, half, lower:0..c with the largest c such that 2c+3 <= rows

    With fewer than three rows the support is {half}.
    """
    c = (rows - 3) // 2
    if kappa_cut is not None:
        c = min(c, kappa_cut)
    params = [BoundaryParam.half()]
    for kappa in range(c + 1):
        params.extend([BoundaryParam.upper(kappa), BoundaryParam.lower(kappa)])
    return _normalize_support(params)


def _variation(series: Sequence[Fraction]) -> Fraction:
    return max((abs(b - a) for a, b in zip(series, series[1:])), default=Fraction(0))


def decompose(
    v: TriangularArray,
    kappa_cut: int,
    row_budget: int,
    threshold: Optional[Fraction] = None,
    settings: Settings = DEFAULT_SETTINGS,
    table: Optional[EulerianTable] = None,
) -> MixtureWeights:
    """
    Blind decomposition from the concentration of the tilde rows

    p(UPPER kappa) is the value of V~_{N,kappa} and p(LOWER kappa) that of
    V~_{N,N-1-kappa} at N = row_budget, for kappa <= kappa_cut. HALF receives
    the remaining mass. An estimate is stable when its successive-row
    differences over the last settings.stabilization_window rows stay below
    the threshold. Tilde mass at kappa_cut < kappa < row_budget//4 on either
    wing, in excess of what the half solution puts there, belongs to
    parameters beyond the cut; it is added to the residual and makes the
    result support-insufficient once it reaches the threshold.

    Args:
        v: Array with rows up to at least row_budget
        kappa_cut: Largest kappa read off each wing
        row_budget: Last row used, >= 4*(kappa_cut+2)
        threshold: Defaults to settings.stabilization_threshold

    Returns:
        MixtureWeights with status stable, indeterminate or support-insufficient
    """
    if kappa_cut < 0:
        raise ParameterError(f"kappa_cut must be >= 0, got {kappa_cut}")
    if row_budget < 4 * (kappa_cut + 2):
        raise ParameterError(
            f"row_budget must be >= 4*(kappa_cut+2) = {4 * (kappa_cut + 2)}, got {row_budget}"
        )
    if v.max_row < row_budget:
        raise ParameterError(f"array has rows up to {v.max_row}, row_budget is {row_budget}")
    window_size = settings.stabilization_window
    first = row_budget - window_size + 1
    if v.first_row > first:
        raise ParameterError(f"array must start at row {first} or earlier, starts at {v.first_row}")
    if v.first_row == 1:
        verdict = in_v_check(v.window(1, row_budget))
        if not verdict:
            raise ParameterError(f"array is not a solution: {verdict.reason}")
    tol = settings.stabilization_threshold if threshold is None else threshold

    tilde = tilde_transform(v.window(first, row_budget), table)
    levels = range(first, row_budget + 1)
    weights: Dict[BoundaryParam, Fraction] = {}
    oscillating: List[BoundaryParam] = []
    residual = Fraction(0)
    wing_mass = [Fraction(0)] * window_size

    for kappa in range(kappa_cut + 1):
        wings = (
            (BoundaryParam.upper(kappa), [tilde[n, kappa] for n in levels]),
            (BoundaryParam.lower(kappa), [tilde[n, n - 1 - kappa] for n in levels]),
        )
        for theta, series in wings:
            for i, value in enumerate(series):
                wing_mass[i] += value
            drift = _variation(series)
            residual += drift
            weights[theta] = series[-1]
            if drift >= tol:
                oscillating.append(theta)

    # wing mass just past the cut belongs to no estimated parameter, beyond
    # what the half solution itself puts there
    band = range(kappa_cut + 1, row_budget // 4)
    band_mass = sum((tilde[row_budget, k] + tilde[row_budget, row_budget - 1 - k] for k in band), Fraction(0))
    uniform = descent_distribution(row_budget, table)
    half_band_mass = sum((uniform[k] + uniform[row_budget - 1 - k] for k in band), Fraction(0))
    unresolved = max(band_mass - half_band_mass, Fraction(0))
    residual += unresolved

    middle = [1 - mass for mass in wing_mass]
    drift = _variation(middle)
    residual += drift
    half = BoundaryParam.half()
    weights[half] = middle[-1]
    if drift >= tol:
        oscillating.append(half)

    if unresolved >= tol:
        logger.warning(
            "tilde mass %s on kappa %d..%d exceeds %s; kappa_cut %d is too small",
            float(unresolved), kappa_cut + 1, row_budget // 4 - 1, float(tol), kappa_cut,
        )
        return MixtureWeights(
            weights, residual=residual, status=SUPPORT_INSUFFICIENT, mode=LIMIT, oscillating=oscillating
        )
    status = STABLE if not oscillating else INDETERMINATE
    if oscillating:
        logger.warning(
            "decomposition did not stabilise below %s over rows %d..%d for %s",
            float(tol), first, row_budget, ", ".join(str(t) for t in oscillating),
        )
    else:
        logger.debug("decomposition stable over rows %d..%d", first, row_budget)
    return MixtureWeights(weights, residual=residual, status=status, mode=LIMIT, oscillating=oscillating)

"""
Truncated solutions and their limits

V^{N kappa} is the solution with row N equal to delta_{kappa k}/<N,kappa>.
Its tilde rows are the marginals of the backward chain started at
(N, kappa), so it is computed by exact propagation and divided by the
Eulerian numbers at the end.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from eulerboundary.boundary.extreme import extreme_entry, extreme_solution
from eulerboundary.chain.backward import iter_marginals
from eulerboundary.core.arrays import SolutionArray
from eulerboundary.core.config import DEFAULT_SETTINGS, Settings
from eulerboundary.core.errors import ParameterError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.triangle import EulerianTable, TriangleIndex, eulerian, eulerian_row

logger = logging.getLogger(__name__)

CONSTANT = "constant"
MIRRORED = "mirrored"
CENTRAL = "central"
SCHEDULE_KINDS = (CONSTANT, MIRRORED, CENTRAL)


def truncated_solution(
    n_levels: int,
    kappa: int,
    first_row: int = 1,
    table: Optional[EulerianTable] = None,
) -> SolutionArray:
    """
    Rows first_row..N of V^{N kappa}

    Args:
        n_levels: N, the row carrying the delta condition
        kappa: 0 <= kappa <= N-1
        first_row: First row returned, 1 <= first_row <= N

    Returns:
        SolutionArray window of exact entries

    Example:
        >>> truncated_solution(3, 1)[2, 0]
        Fraction(1, 2)
    """
    if n_levels < 1:
        raise ParameterError(f"N must be >= 1, got {n_levels}")
    if not 0 <= kappa <= n_levels - 1:
        raise ParameterError(f"kappa must lie in 0..{n_levels - 1}, got {kappa}")
    if not 1 <= first_row <= n_levels:
        raise ParameterError(f"first_row must lie in 1..{n_levels}, got {first_row}")
    rows = {}
    for n, marginal in iter_marginals(TriangleIndex(n_levels, kappa), first_row, table):
        rows[n] = [p / e for p, e in zip(marginal, eulerian_row(n, table))]
    logger.debug("propagated V^{%d,%d} down to row %d", n_levels, kappa, first_row)
    return SolutionArray([rows[n] for n in range(first_row, n_levels + 1)], first_row=first_row)


@dataclass(frozen=True)
class KappaSchedule:
    """
    A choice of kappa(N) together with the predicted limit of V^{N, kappa(N)}

    constant:  kappa(N) = kappa, limit UPPER(kappa)
    mirrored:  kappa(N) = N-1-kappa, limit LOWER(kappa)
    central:   kappa(N) = floor(N/2), limit HALF
    """

    kind: str
    kappa: Optional[int] = None

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ParameterError(f"schedule kind must be one of {SCHEDULE_KINDS}, got {self.kind!r}")
        if self.kind == CENTRAL:
            if self.kappa is not None:
                raise ParameterError("the central schedule takes no kappa")
        elif not isinstance(self.kappa, int) or isinstance(self.kappa, bool) or self.kappa < 0:
            raise ParameterError(f"{self.kind} schedule needs an integer kappa >= 0, got {self.kappa!r}")

    @classmethod
    def parse(cls, text: str) -> "KappaSchedule":
        """Parse "constant:K", "mirrored:K" or "central" """
        kind, _, value = text.strip().lower().partition(":")
        if kind == CENTRAL and not value:
            return cls(CENTRAL)
        try:
            kappa = int(value)
        except ValueError:
            raise ParameterError(f"cannot parse schedule {text!r}; expected constant:K, mirrored:K or central") from None
        return cls(kind, kappa)

    def kappa_at(self, n_levels: int) -> int:
        if self.kind == CONSTANT:
            return self.kappa
        if self.kind == MIRRORED:
            return n_levels - 1 - self.kappa
        return n_levels // 2

    def limit(self) -> BoundaryParam:
        if self.kind == CONSTANT:
            return BoundaryParam.upper(self.kappa)
        if self.kind == MIRRORED:
            return BoundaryParam.lower(self.kappa)
        return BoundaryParam.half()

    def first_level(self, row_limit: int) -> int:
        """Smallest N with a valid kappa(N) and at least row_limit rows"""
        if self.kind == CENTRAL:
            return max(row_limit, 1)
        return max(row_limit, self.kappa + 1)

    def __str__(self) -> str:
        return self.kind if self.kind == CENTRAL else f"{self.kind}:{self.kappa}"


@dataclass
class MartinReport:
    """
    Deviation of V^{N, kappa(N)} from its predicted limit for increasing N

    Attributes:
        schedule: The schedule tested
        row_limit: Rows 1..row_limit are compared
        tolerance: Exact tolerance
        deviations: (N, max |V^{N kappa(N)} - W|) per N tried
        converged_at: First N with deviation < tolerance, None if the cap was reached first
    """

    schedule: KappaSchedule
    row_limit: int
    tolerance: Fraction
    deviations: List[Tuple[int, Fraction]] = field(default_factory=list)
    converged_at: Optional[int] = None

    @property
    def converged(self) -> bool:
        return self.converged_at is not None

    @property
    def monotone(self) -> bool:
        """Deviation never increases with N"""
        values = [d for _, d in self.deviations]
        return all(b <= a for a, b in zip(values, values[1:]))

    @property
    def final_deviation(self) -> Optional[Fraction]:
        return self.deviations[-1][1] if self.deviations else None

    def as_dict(self) -> dict:
        return {
            "schedule": str(self.schedule),
            "limit": str(self.schedule.limit()),
            "row_limit": self.row_limit,
            "tolerance": self.tolerance,
            "deviations": [{"N": n, "deviation": d} for n, d in self.deviations],
            "converged": self.converged,
            "converged_at": self.converged_at,
            "monotone": self.monotone,
        }


def martin_limit_witness(
    schedule: KappaSchedule,
    row_limit: int,
    tolerance: Optional[Fraction] = None,
    n_cap: Optional[int] = None,
    settings: Settings = DEFAULT_SETTINGS,
    table: Optional[EulerianTable] = None,
) -> MartinReport:
    """
    Track V^{N, kappa(N)} on rows 1..row_limit against its limit, N up to the cap

    Every deviation is an exact rational. Reaching the cap without falling
    under the tolerance is reported, not raised.

    Args:
        schedule: kappa(N) and its predicted limit
        row_limit: Number of leading rows compared
        tolerance: Defaults to settings.martin_tolerance
        n_cap: Largest N tried, defaults to settings.martin_n_cap
    """
    if row_limit < 1:
        raise ParameterError(f"row_limit must be >= 1, got {row_limit}")
    tol = settings.martin_tolerance if tolerance is None else tolerance
    cap = settings.martin_n_cap if n_cap is None else n_cap
    limit = extreme_solution(schedule.limit(), row_limit, settings)
    report = MartinReport(schedule, row_limit, tol)
    start = schedule.first_level(row_limit)
    if cap < start:
        raise ParameterError(f"N cap {cap} is below the first usable N {start}")

    for n_levels in range(start, cap + 1):
        kappa = schedule.kappa_at(n_levels)
        window = truncated_solution(n_levels, kappa, 1, table).window(1, row_limit)
        deviation = window.max_abs_difference(limit)
        report.deviations.append((n_levels, deviation))
        if report.converged_at is None and deviation < tol:
            report.converged_at = n_levels

    if not report.converged:
        logger.warning(
            "schedule %s did not reach tolerance %s on rows <= %d by N=%d (last deviation %s)",
            schedule, tol, row_limit, cap, float(report.final_deviation),
        )
    return report


@dataclass
class ConcentrationReport:
    """
    The sequence <N,kappa> W^kappa_{N kappa} = <N,kappa>/(kappa+1)^N for N = kappa+1..Nmax

    It is the probability that bucket sorting with kappa+1 buckets yields
    exactly kappa descents, and tends to 1.
    """

    kappa: int
    values: List[Tuple[int, Fraction]]
    epsilon: Fraction

    @property
    def tail_nondecreasing(self) -> bool:
        """Nondecreasing over the second half of the computed range"""
        tail = [v for _, v in self.values[len(self.values) // 2:]]
        return all(b >= a for a, b in zip(tail, tail[1:]))

    @property
    def final_value(self) -> Fraction:
        return self.values[-1][1]

    @property
    def exceeds_threshold(self) -> bool:
        return self.final_value > 1 - self.epsilon

    @property
    def ok(self) -> bool:
        return self.tail_nondecreasing and self.exceeds_threshold

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "values": [{"N": n, "value": v} for n, v in self.values],
            "epsilon": self.epsilon,
            "tail_nondecreasing": self.tail_nondecreasing,
            "exceeds_threshold": self.exceeds_threshold,
        }


def concentration_witness(
    kappa: int,
    n_max: int,
    epsilon: Optional[Fraction] = None,
    settings: Settings = DEFAULT_SETTINGS,
    table: Optional[EulerianTable] = None,
) -> ConcentrationReport:
    """
    Tilde value of W^kappa at its corner vertex (N, kappa) for N = kappa+1..n_max

    Example:
        >>> concentration_witness(1, 2).values
        [(2, Fraction(1, 4))]
    """
    if not isinstance(kappa, int) or kappa < 0:
        raise ParameterError(f"kappa must be an integer >= 0, got {kappa!r}")
    if n_max < kappa + 1:
        raise ParameterError(f"Nmax must be >= kappa+1 = {kappa + 1}, got {n_max}")
    theta = BoundaryParam.upper(kappa).check_cap(settings)
    values = [
        (n, eulerian(n, kappa, table) * extreme_entry(theta, n, kappa))
        for n in range(kappa + 1, n_max + 1)
    ]
    eps = settings.concentration_epsilon if epsilon is None else epsilon
    return ConcentrationReport(kappa, values, eps)

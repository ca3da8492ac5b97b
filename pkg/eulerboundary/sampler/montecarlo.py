"""
Monte Carlo witnesses for the exact formulas

Every witness tallies integer counts in vectorised batches of
settings.batch_size draws. With replicas > 1 the stream is split by
RngStream.spawn and the per-replica counts are added, so the result only
depends on the seed and the replica count.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from eulerboundary.arrangements import arrangement_for
from eulerboundary.arrangements.bucket import INCREASING, prefix_descent_counts
from eulerboundary.arrangements.descents import batch_descent_counts, descents, permutation_codes
from eulerboundary.arrangements.exchangeable import ExchangeableArrangement
from eulerboundary.boundary.extreme import extreme_entry
from eulerboundary.core.config import DEFAULT_SETTINGS, Settings
from eulerboundary.core.errors import ParameterError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.rng import RngStream, as_stream
from eulerboundary.core.triangle import (
    descent_distribution,
    eulerian,
    eulerian_row,
    exact_descent_moments,
    stated_descent_moments,
)

logger = logging.getLogger(__name__)

MIN_MOMENT_TRIALS = 1000
MAX_TABULATED_N = 7


def _plan(
    rng: Optional[RngStream],
    trials: int,
    replicas: int,
    batch_size: int,
) -> Iterator[Tuple[RngStream, int]]:
    """(stream, batch size) pairs covering trials draws"""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if replicas < 1:
        raise ParameterError(f"replicas must be >= 1, got {replicas}")
    stream = as_stream(rng)
    streams = [stream] if replicas == 1 else stream.spawn(replicas)
    share, extra = divmod(trials, replicas)
    for index, child in enumerate(streams):
        remaining = share + (1 if index < extra else 0)
        while remaining > 0:
            size = min(batch_size, remaining)
            yield child, size
            remaining -= size


def _z(observed: float, expected: float, standard_error: float) -> float:
    if standard_error == 0:
        return 0.0 if observed == expected else math.inf
    return (observed - expected) / standard_error


def _binomial_z(count: int, p: Fraction, trials: int) -> float:
    """z-score of a cell count against its exact probability"""
    p = float(p)
    return _z(count / trials, p, math.sqrt(p * (1 - p) / trials))


def _goodness_of_fit(observed: Sequence[int], expected: Sequence[float]) -> Tuple[float, float]:
    """Chi-square statistic and p-value; a single cell is a perfect fit"""
    if len(observed) < 2:
        return 0.0, 1.0
    result = stats.chisquare(np.asarray(observed, dtype=float), np.asarray(expected, dtype=float))
    return float(result.statistic), float(result.pvalue)


def significance_level(settings: Settings = DEFAULT_SETTINGS) -> float:
    """Two-sided normal tail mass beyond settings.sigma_bound"""
    return float(2 * stats.norm.sf(settings.sigma_bound))


@dataclass
class MomentReport:
    """
    Monte Carlo mean and variance of the descent count of a uniform permutation

    Both the usually quoted moments ((n-1)/2, (n-1)/12) and the moments of
    the exact Eulerian law are carried; z-scores use standard errors of the
    exact law.
    """

    n: int
    trials: int
    histogram: Tuple[int, ...]
    mean: Fraction
    variance: Fraction
    stated_mean: Fraction
    stated_variance: Fraction
    exact_mean: Fraction
    exact_variance: Fraction
    z_mean_stated: float
    z_variance_stated: float
    z_mean_exact: float
    z_variance_exact: float
    sigma_bound: float

    @property
    def variance_discrepancy(self) -> bool:
        return self.stated_variance != self.exact_variance

    @property
    def mean_within_band(self) -> bool:
        return abs(self.z_mean_exact) <= self.sigma_bound

    @property
    def variance_within_band(self) -> bool:
        return abs(self.z_variance_exact) <= self.sigma_bound

    @property
    def stated_variance_within_band(self) -> bool:
        return abs(self.z_variance_stated) <= self.sigma_bound

    @property
    def ok(self) -> bool:
        return self.mean_within_band and self.variance_within_band

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "histogram": list(self.histogram),
            "mean": float(self.mean),
            "variance": float(self.variance),
            "stated_mean": self.stated_mean,
            "stated_variance": self.stated_variance,
            "exact_mean": self.exact_mean,
            "exact_variance": self.exact_variance,
            "z_mean_stated": self.z_mean_stated,
            "z_variance_stated": self.z_variance_stated,
            "z_mean_exact": self.z_mean_exact,
            "z_variance_exact": self.z_variance_exact,
            "variance_discrepancy": self.variance_discrepancy,
            "sigma_bound": self.sigma_bound,
        }


def _histogram_moments(histogram: Sequence[int]) -> Tuple[Fraction, Fraction]:
    """Sample mean and unbiased sample variance of integer-valued data"""
    total = sum(histogram)
    s1 = sum(k * c for k, c in enumerate(histogram))
    s2 = sum(k * k * c for k, c in enumerate(histogram))
    mean = Fraction(s1, total)
    variance = (s2 - total * mean * mean) / (total - 1)
    return mean, variance


def descent_moments(
    n: int,
    trials: int,
    rng: Optional[RngStream] = None,
    replicas: int = 1,
    settings: Settings = DEFAULT_SETTINGS,
) -> MomentReport:
    """
    Descent-count moments of exchangeable permutations of [n]

    Args:
        n: Level
        trials: At least 1000 permutations
        rng: Seeded stream
        replicas: Independent child streams sharing the trials

    Returns:
        MomentReport; the stated variance is compared but never substituted
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if trials < MIN_MOMENT_TRIALS:
        raise ParameterError(f"descent moments need at least {MIN_MOMENT_TRIALS} trials, got {trials}")
    histogram = np.zeros(n, dtype=np.int64)
    for stream, size in _plan(rng, trials, replicas, settings.batch_size):
        perms = ExchangeableArrangement(stream).sample_batch(n, size)
        histogram += np.bincount(batch_descent_counts(perms), minlength=n)
        logger.debug("descent moments: batch of %d at n=%d", size, n)
    counts = tuple(int(c) for c in histogram)
    mean, variance = _histogram_moments(counts)

    stated_mean, stated_variance = stated_descent_moments(n)
    exact_mean, exact_variance = exact_descent_moments(n)
    law = descent_distribution(n)
    fourth = sum((k - exact_mean) ** 4 * p for k, p in enumerate(law))
    se_mean = math.sqrt(float(exact_variance) / trials)
    se_variance = math.sqrt(max(float(fourth - exact_variance**2), 0.0) / trials)

    report = MomentReport(
        n=n,
        trials=trials,
        histogram=counts,
        mean=mean,
        variance=variance,
        stated_mean=stated_mean,
        stated_variance=stated_variance,
        exact_mean=exact_mean,
        exact_variance=exact_variance,
        z_mean_stated=_z(float(mean), float(stated_mean), se_mean),
        z_variance_stated=_z(float(variance), float(stated_variance), se_variance),
        z_mean_exact=_z(float(mean), float(exact_mean), se_mean),
        z_variance_exact=_z(float(variance), float(exact_variance), se_variance),
        sigma_bound=settings.sigma_bound,
    )
    if report.variance_discrepancy:
        logger.info(
            "n=%d: stated variance %s differs from the exact variance %s", n, stated_variance, exact_variance
        )
    return report


def exact_max_descent_probability(kappa: int, n: int) -> Fraction:
    """P(D(Pi^kappa_n) = kappa) = <n,kappa>/(kappa+1)^n for bucket sorting"""
    if kappa < 0 or n < 1:
        raise ParameterError(f"need kappa >= 0 and n >= 1, got kappa={kappa}, n={n}")
    return Fraction(eulerian(n, kappa), (kappa + 1) ** n)


@dataclass
class LawOfLargeNumbersReport:
    """
    Fraction of bucket sorts with exactly kappa descents, level by level

    Attributes:
        trajectory: (m, hits at level m, exact probability) for m = 1..n_max
    """

    kappa: int
    n_max: int
    trials: int
    trajectory: List[Tuple[int, int, Fraction]]
    sigma_bound: float

    def fraction_at(self, m: int) -> float:
        return self.trajectory[m - 1][1] / self.trials

    @property
    def final_fraction(self) -> float:
        return self.fraction_at(self.n_max)

    @property
    def final_exact(self) -> Fraction:
        return self.trajectory[-1][2]

    @property
    def z_final(self) -> float:
        return _binomial_z(self.trajectory[-1][1], self.final_exact, self.trials)

    @property
    def within_band(self) -> bool:
        return abs(self.z_final) <= self.sigma_bound

    @property
    def rising(self) -> bool:
        """The last level does at least as well as the middle one"""
        return self.final_fraction >= self.fraction_at(max(self.n_max // 2, 1))

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "n_max": self.n_max,
            "trials": self.trials,
            "trajectory": [
                {"n": m, "fraction": hits / self.trials, "exact": exact}
                for m, hits, exact in self.trajectory
            ],
            "z_final": self.z_final,
            "within_band": self.within_band,
            "rising": self.rising,
        }


def law_of_large_numbers_witness(
    kappa: int,
    n_max: int,
    trials: int,
    rng: Optional[RngStream] = None,
    replicas: int = 1,
    settings: Settings = DEFAULT_SETTINGS,
) -> LawOfLargeNumbersReport:
    """
    Track D(Pi^kappa_m) = kappa along one allocation stream per trial, m = 1..n_max

    Args:
        kappa: Number of buckets minus one
        n_max: Last level, >= 4*(kappa+1)
    """
    if kappa < 0:
        raise ParameterError(f"kappa must be >= 0, got {kappa}")
    if n_max < 4 * (kappa + 1):
        raise ParameterError(f"n_max must be >= 4*(kappa+1) = {4 * (kappa + 1)}, got {n_max}")
    hits = np.zeros(n_max, dtype=np.int64)
    for stream, size in _plan(rng, trials, replicas, settings.batch_size):
        buckets = stream.integers(0, kappa + 1, size=(size, n_max))
        hits += np.count_nonzero(prefix_descent_counts(buckets, INCREASING) == kappa, axis=0)
    trajectory = [
        (m, int(hits[m - 1]), exact_max_descent_probability(kappa, m)) for m in range(1, n_max + 1)
    ]
    return LawOfLargeNumbersReport(kappa, n_max, trials, trajectory, settings.sigma_bound)


@dataclass
class CellComparison:
    """One cell of an empirical-versus-exact table"""

    label: str
    count: int
    exact: Fraction
    z: float

    def frequency(self, trials: int) -> float:
        return self.count / trials


@dataclass
class UniformSumReport:
    """Integer parts of sums of n uniforms against <n,k>/n!"""

    n: int
    trials: int
    bins: List[CellComparison]
    chi2: float
    p_value: float
    sigma_bound: float

    @property
    def max_abs_z(self) -> float:
        return max(abs(b.z) for b in self.bins)

    @property
    def within_band(self) -> bool:
        return self.max_abs_z <= self.sigma_bound

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "bins": [
                {"k": int(b.label), "count": b.count, "frequency": b.frequency(self.trials), "exact": b.exact, "z": b.z}
                for b in self.bins
            ],
            "chi2": self.chi2,
            "p_value": self.p_value,
            "max_abs_z": self.max_abs_z,
            "within_band": self.within_band,
        }


def uniform_sum_identity_witness(
    n: int,
    trials: int,
    rng: Optional[RngStream] = None,
    replicas: int = 1,
    settings: Settings = DEFAULT_SETTINGS,
) -> UniformSumReport:
    """
    Bin floor(Y_1 + ... + Y_n) for i.i.d. uniforms and compare with <n,k>/n!

    Example:
        >>> uniform_sum_identity_witness(1, 10, RngStream(0)).bins[0].count
        10
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    counts = np.zeros(n, dtype=np.int64)
    for stream, size in _plan(rng, trials, replicas, settings.batch_size):
        sums = stream.random((size, n)).sum(axis=1)
        counts += np.bincount(np.floor(sums).astype(np.int64), minlength=n)[:n]
    total = math.factorial(n)
    exact = [Fraction(e, total) for e in eulerian_row(n)]
    bins = [
        CellComparison(str(k), int(c), p, _binomial_z(int(c), p, trials))
        for k, (c, p) in enumerate(zip(counts, exact))
    ]
    chi2, p_value = _goodness_of_fit([b.count for b in bins], [float(p) * trials for p in exact])
    return UniformSumReport(n, trials, bins, chi2, p_value, settings.sigma_bound)


@dataclass
class PermutationFrequency:
    """Empirical and exact probability of one permutation"""

    perm: Tuple[int, ...]
    descent_count: int
    count: int
    exact: Fraction
    z: float


@dataclass
class EmpiricalReport:
    """
    Frequencies of every permutation of [n] under the arrangement for theta

    Attributes:
        rows: One entry per permutation, lexicographic order
        chi2, p_value: Goodness of fit over permutations of positive probability
        sufficiency_p_value: Smallest p-value of the within-descent-class uniformity tests
        impossible: Draws that landed on a permutation of exact probability 0
    """

    theta: BoundaryParam
    n: int
    trials: int
    rows: List[PermutationFrequency]
    chi2: float
    p_value: float
    sufficiency_p_value: float
    impossible: int
    sigma_bound: float
    alpha: float

    @property
    def max_deviation(self) -> float:
        return max(abs(r.count / self.trials - float(r.exact)) for r in self.rows)

    @property
    def max_abs_z(self) -> float:
        return max(abs(r.z) for r in self.rows)

    @property
    def within_band(self) -> bool:
        return self.impossible == 0 and self.max_abs_z <= self.sigma_bound

    @property
    def sufficiency_holds(self) -> bool:
        return self.sufficiency_p_value >= self.alpha

    @property
    def ok(self) -> bool:
        return self.within_band and self.sufficiency_holds

    def as_dict(self) -> dict:
        return {
            "theta": str(self.theta),
            "n": self.n,
            "trials": self.trials,
            "permutations": [
                {
                    "perm": "".join(map(str, r.perm)),
                    "descents": r.descent_count,
                    "count": r.count,
                    "frequency": r.count / self.trials,
                    "exact": r.exact,
                    "z": r.z,
                }
                for r in self.rows
            ],
            "max_deviation": self.max_deviation,
            "max_abs_z": self.max_abs_z,
            "chi2": self.chi2,
            "p_value": self.p_value,
            "sufficiency_p_value": self.sufficiency_p_value,
            "impossible": self.impossible,
            "within_band": self.within_band,
            "sufficiency_holds": self.sufficiency_holds,
        }


def empirical_vs_exact(
    theta: BoundaryParam,
    n: int,
    trials: int,
    rng: Optional[RngStream] = None,
    replicas: int = 1,
    settings: Settings = DEFAULT_SETTINGS,
) -> EmpiricalReport:
    """
    Tabulate every permutation of [n] and compare with W_{n, D(pi)}(theta)

    UPPER and LOWER use bucket sorting in increasing and decreasing order,
    HALF uses the exchangeable arrangement.

    Args:
        theta: Boundary parameter, kappa within settings.kappa_cap
        n: 1 <= n <= 7
        trials: Number of sampled permutations
    """
    if not 1 <= n <= MAX_TABULATED_N:
        raise ParameterError(f"n must lie in 1..{MAX_TABULATED_N} to tabulate Perm(n), got {n}")
    theta.check_cap(settings)
    tally: Dict[int, int] = {}
    stream = as_stream(rng)
    for child, size in _plan(stream, trials, replicas, settings.batch_size):
        perms = arrangement_for(theta, child).sample_batch(n, size)
        codes, counts = np.unique(permutation_codes(perms), return_counts=True)
        for code, count in zip(codes.tolist(), counts.tolist()):
            tally[code] = tally.get(code, 0) + count

    table = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int64)

    rows = []
    for perm, code in zip(table.tolist(), permutation_codes(table).tolist()):
        perm = tuple(perm)
        exact = extreme_entry(theta, n, descents(perm)[0])
        count = tally.get(code, 0)
        rows.append(PermutationFrequency(perm, descents(perm)[0], count, exact, _binomial_z(count, exact, trials)))

    support = [r for r in rows if r.exact > 0]
    impossible = sum(r.count for r in rows if r.exact == 0)
    if impossible:
        logger.warning("%d draws hit permutations of probability 0 under %s", impossible, theta)
        chi2, p_value = math.inf, 0.0
    else:
        chi2, p_value = _goodness_of_fit([r.count for r in support], [float(r.exact) * trials for r in support])

    sufficiency = 1.0
    for k in range(n):
        group = [r.count for r in support if r.descent_count == k]
        if len(group) > 1 and sum(group) > 0:
            _, p = _goodness_of_fit(group, [sum(group) / len(group)] * len(group))
            sufficiency = min(sufficiency, p)

    return EmpiricalReport(
        theta=theta,
        n=n,
        trials=trials,
        rows=rows,
        chi2=chi2,
        p_value=p_value,
        sufficiency_p_value=sufficiency,
        impossible=impossible,
        sigma_bound=settings.sigma_bound,
        alpha=significance_level(settings),
    )

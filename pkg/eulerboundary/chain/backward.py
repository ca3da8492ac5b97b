"""
The backward Markov chain on the Eulerian graph

From (n, k) the chain moves to (n-1, k) with probability (k+1)<n-1,k>/<n,k>
and to (n-1, k-1) otherwise. Started at (N, kappa), its level-n marginal is
row n of the tilde transform of the truncated solution V^{N kappa}.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from eulerboundary.core.errors import ParameterError
from eulerboundary.core.rng import RngStream, as_stream
from eulerboundary.core.triangle import EulerianTable, TriangleIndex, transition_prob

logger = logging.getLogger(__name__)


def stay_probability(vertex: TriangleIndex, table: Optional[EulerianTable] = None) -> Fraction:
    """Probability of (n, k) -> (n-1, k); zero on the right edge k = n-1"""
    if vertex.n < 2:
        raise ParameterError(f"{vertex} has no backward move")
    if vertex.k > vertex.n - 2:
        return Fraction(0)
    return transition_prob(vertex, TriangleIndex(vertex.n - 1, vertex.k), table)


def backward_step(vertex: TriangleIndex, u: float, table: Optional[EulerianTable] = None) -> TriangleIndex:
    """Move one level down using the uniform draw u in [0, 1)"""
    if Fraction(u) < stay_probability(vertex, table):
        return TriangleIndex(vertex.n - 1, vertex.k)
    return TriangleIndex(vertex.n - 1, vertex.k - 1)


def run_backward_chain(
    start: TriangleIndex,
    rng: Optional[RngStream] = None,
    table: Optional[EulerianTable] = None,
) -> List[TriangleIndex]:
    """
    Simulate the chain from start down to the root

    Returns:
        Vertices from level start.n down to (1, 0)

    Example:
        >>> run_backward_chain(TriangleIndex(2, 0), RngStream(1))
        [TriangleIndex(n=2, k=0), TriangleIndex(n=1, k=0)]
    """
    stream = as_stream(rng)
    path = [start]
    vertex = start
    while vertex.n > 1:
        vertex = backward_step(vertex, float(stream.random()), table)
        path.append(vertex)
    return path


def iter_marginals(
    start: TriangleIndex,
    down_to: int = 1,
    table: Optional[EulerianTable] = None,
) -> Iterator[Tuple[int, Tuple[Fraction, ...]]]:
    """
    Exact level marginals of the chain started at start, one row at a time

    Yields:
        (n, (P(at (n,0)), ..., P(at (n,n-1)))) for n = start.n down to down_to
    """
    if not 1 <= down_to <= start.n:
        raise ParameterError(f"down_to must lie in 1..{start.n}, got {down_to}")
    row = tuple(Fraction(int(k == start.k)) for k in range(start.n))
    yield start.n, row
    for n in range(start.n, down_to, -1):
        lower = [Fraction(0)] * (n - 1)
        for k, mass in enumerate(row):
            if mass == 0:
                continue
            stay = stay_probability(TriangleIndex(n, k), table)
            if stay:
                lower[k] += mass * stay
            if stay != 1:
                lower[k - 1] += mass * (1 - stay)
        row = tuple(lower)
        yield n - 1, row


def propagate_exact(
    start: TriangleIndex,
    down_to: int = 1,
    table: Optional[EulerianTable] = None,
) -> Dict[int, Tuple[Fraction, ...]]:
    """Exact marginal distribution of every level from start.n down to down_to"""
    return dict(iter_marginals(start, down_to, table))


def passes_vertex(trajectory: List[TriangleIndex], vertex: TriangleIndex) -> bool:
    return vertex in trajectory


@dataclass(frozen=True)
class CouplingTrace:
    """
    Two coupled runs from (N, kappa_a) and (N, kappa_b), kappa_a < kappa_b

    Attributes:
        trajectory_a: Vertices of the first chain, level N down to 1
        trajectory_b: Vertices of the second chain
        merge_level: Level of the first coincidence, None if they never met
    """

    trajectory_a: Tuple[TriangleIndex, ...]
    trajectory_b: Tuple[TriangleIndex, ...]
    merge_level: Optional[int]

    def ordering_holds(self) -> bool:
        """Before the merge a stays weakly left of b; after it they agree"""
        for va, vb in zip(self.trajectory_a, self.trajectory_b):
            if self.merge_level is not None and va.n <= self.merge_level:
                if va != vb:
                    return False
            elif va.k > vb.k:
                return False
        return True

    def left_edge_implication(self) -> bool:
        """If b passes (n, 0) then a passes (n, 0), for every n"""
        return all(va.k == 0 for va, vb in zip(self.trajectory_a, self.trajectory_b) if vb.k == 0)


def coupled_run(
    n_levels: int,
    kappa_a: int,
    kappa_b: int,
    rng: Optional[RngStream] = None,
    table: Optional[EulerianTable] = None,
) -> CouplingTrace:
    """
    Run two chains with independent jumps until they meet, shared jumps afterwards

    Merging is checked after each simultaneous step. Each chain keeps its own
    marginal law.
    """
    if not 0 <= kappa_a < kappa_b <= n_levels - 1:
        raise ParameterError(
            f"need 0 <= kappa_a < kappa_b <= N-1, got N={n_levels}, kappa_a={kappa_a}, kappa_b={kappa_b}"
        )
    stream = as_stream(rng)
    a = TriangleIndex(n_levels, kappa_a)
    b = TriangleIndex(n_levels, kappa_b)
    path_a, path_b = [a], [b]
    merge_level = None
    while a.n > 1:
        if merge_level is None:
            u_a, u_b = stream.random(2)
            a = backward_step(a, float(u_a), table)
            b = backward_step(b, float(u_b), table)
            if a == b:
                merge_level = a.n
        else:
            a = backward_step(a, float(stream.random()), table)
            b = a
        path_a.append(a)
        path_b.append(b)
    return CouplingTrace(tuple(path_a), tuple(path_b), merge_level)


def left_edge_probabilities(n_levels: int, table: Optional[EulerianTable] = None) -> Dict[int, Tuple[Fraction, ...]]:
    """
    V^{N kappa}_{n0} for every kappa and n

    Returns:
        kappa -> (V_10, V_20, ..., V_N0) of the truncated solution started at (N, kappa)
    """
    out = {}
    for kappa in range(n_levels):
        column = [Fraction(0)] * n_levels
        for n, row in iter_marginals(TriangleIndex(n_levels, kappa), 1, table):
            column[n - 1] = row[0]
        out[kappa] = tuple(column)
    return out


def verify_left_edge_monotonicity(n_levels: int, table: Optional[EulerianTable] = None) -> bool:
    """V^{N kappa}_{n0} does not increase as kappa runs from 0 to N-1, for every n <= N"""
    columns = left_edge_probabilities(n_levels, table)
    for kappa in range(1, n_levels):
        if any(b > a for a, b in zip(columns[kappa - 1], columns[kappa])):
            logger.warning("left edge monotonicity fails at N=%d, kappa=%d", n_levels, kappa)
            return False
    return True


@dataclass
class CouplingSummary:
    """
    Aggregate of independent coupled runs

    Attributes:
        runs: Number of coupled runs
        ordering_violations: Runs whose trace broke the ordering invariant
        implication_failures: Runs where b touched the left edge at a level a did not
        merged: Runs in which the chains met
        left_edge_hits_a, left_edge_hits_b: Per level n = 1..N, runs passing (n, 0)
    """

    n_levels: int
    kappa_a: int
    kappa_b: int
    runs: int
    ordering_violations: int
    implication_failures: int
    merged: int
    left_edge_hits_a: Tuple[int, ...]
    left_edge_hits_b: Tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.ordering_violations == 0 and self.implication_failures == 0

    def as_dict(self) -> dict:
        exact = left_edge_probabilities(self.n_levels)
        return {
            "N": self.n_levels,
            "kappa_a": self.kappa_a,
            "kappa_b": self.kappa_b,
            "runs": self.runs,
            "ordering_violations": self.ordering_violations,
            "implication_failures": self.implication_failures,
            "merged": self.merged,
            "left_edge": [
                {
                    "n": n,
                    "frequency_a": self.left_edge_hits_a[n - 1] / self.runs,
                    "frequency_b": self.left_edge_hits_b[n - 1] / self.runs,
                    "exact_a": exact[self.kappa_a][n - 1],
                    "exact_b": exact[self.kappa_b][n - 1],
                }
                for n in range(1, self.n_levels + 1)
            ],
        }


def coupling_summary(
    n_levels: int,
    kappa_a: int,
    kappa_b: int,
    runs: int,
    rng: Optional[RngStream] = None,
    table: Optional[EulerianTable] = None,
) -> CouplingSummary:
    """Run coupled_run `runs` times on one stream and tally the invariants"""
    if runs < 1:
        raise ParameterError(f"runs must be >= 1, got {runs}")
    stream = as_stream(rng)
    violations = failures = merged = 0
    hits_a = [0] * n_levels
    hits_b = [0] * n_levels
    for _ in range(runs):
        trace = coupled_run(n_levels, kappa_a, kappa_b, stream, table)
        violations += not trace.ordering_holds()
        failures += not trace.left_edge_implication()
        merged += trace.merge_level is not None
        for va, vb in zip(trace.trajectory_a, trace.trajectory_b):
            hits_a[va.n - 1] += va.k == 0
            hits_b[vb.n - 1] += vb.k == 0
    if violations or failures:
        logger.warning("coupling invariants failed: %d ordering, %d left-edge", violations, failures)
    return CouplingSummary(
        n_levels, kappa_a, kappa_b, runs, violations, failures, merged, tuple(hits_a), tuple(hits_b)
    )

"""
Workbench - one entry point for tables, solutions, decompositions, samplers and chains
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from eulerboundary.boundary.extreme import (
    check_parameter,
    check_solution,
    check_support,
    check_symmetry,
    check_unified,
    extreme_solution,
    tilde_transform,
)
from eulerboundary.boundary.martin import (
    ConcentrationReport,
    KappaSchedule,
    MartinReport,
    concentration_witness,
    martin_limit_witness,
    truncated_solution,
)
from eulerboundary.chain.backward import (
    CouplingSummary,
    coupling_summary,
    propagate_exact,
    run_backward_chain,
    verify_left_edge_monotonicity,
)
from eulerboundary.chain.bijection import LabeledPath, path_to_perm, perm_to_path
from eulerboundary.core.arrays import LeftColumn, SolutionArray, TriangularArray
from eulerboundary.core.config import DEFAULT_SETTINGS, Settings
from eulerboundary.core.errors import ParameterError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.rng import RngStream
from eulerboundary.core.triangle import (
    EulerianTable,
    TriangleIndex,
    eulerian_explicit,
    verify_explicit,
    verify_recursion,
    verify_row_sums,
    verify_symmetry,
    verify_worpitzky,
)
from eulerboundary.reconstruct.decompose import (
    EXACT,
    LIMIT,
    MixtureWeights,
    decompose,
    decompose_exact,
    default_support,
    mix,
)
from eulerboundary.reconstruct.nabla import MembershipVerdict, in_v_check, nabla
from eulerboundary.sampler.montecarlo import (
    EmpiricalReport,
    LawOfLargeNumbersReport,
    MomentReport,
    UniformSumReport,
    descent_moments,
    empirical_vs_exact,
    law_of_large_numbers_witness,
    uniform_sum_identity_witness,
)
from eulerboundary.storage.sqlite_backend import SQLiteRecordStore

logger = logging.getLogger(__name__)

RECURSION = "recursion"
EXPLICIT = "explicit"
SOLUTION_CHECKS = ("solution", "symmetry", "support", "unified", "parameter")


class Workbench:
    """
    Unified interface over the library, sharing one Eulerian table and settings

    Example:
        >>> with Workbench() as bench:
        ...     bench.triangle_rows(3)[-1]
        (1, 4, 1)
    """

    def __init__(
        self,
        settings: Optional[Settings] = None,
        record_path: Optional[str] = None,
    ):
        """
        Initialize Workbench

        Args:
            settings: Caps and thresholds (default: Settings.from_env())
            record_path: SQLite file archiving output records, None to disable
        """
        self.settings = settings if settings is not None else Settings.from_env()
        self.table = EulerianTable()
        self.store = SQLiteRecordStore(record_path) if record_path else None

    # triangle

    def triangle_rows(self, rows: int, formula: str = RECURSION) -> List[Tuple[int, ...]]:
        """Rows 1..rows of the Eulerian triangle"""
        if rows < 1:
            raise ParameterError(f"rows must be >= 1, got {rows}")
        if formula == RECURSION:
            self.table.ensure(rows)
            return [self.table.row(n) for n in range(1, rows + 1)]
        if formula == EXPLICIT:
            return [tuple(eulerian_explicit(n, k) for k in range(n)) for n in range(1, rows + 1)]
        raise ParameterError(f"formula must be {RECURSION!r} or {EXPLICIT!r}, got {formula!r}")

    def verify_triangle(self, rows: int, kappa: int) -> Dict[str, bool]:
        """Recursion, explicit formula, row sums, symmetry and Worpitzky up to the given bounds"""
        return {
            "recursion": verify_recursion(rows, self.table),
            "explicit": verify_explicit(rows, self.table),
            "row_sums": verify_row_sums(rows, self.table),
            "symmetry": verify_symmetry(rows, self.table),
            "worpitzky": all(
                verify_worpitzky(n, k, self.table) for n in range(1, rows + 1) for k in range(kappa + 1)
            ),
        }

    # boundary

    def extreme(self, theta: BoundaryParam, rows: int) -> SolutionArray:
        return extreme_solution(theta, rows, self.settings)

    def tilde(self, array: TriangularArray) -> TriangularArray:
        return tilde_transform(array, self.table)

    def check_extreme(self, theta: BoundaryParam, rows: int, checks: Iterable[str] = SOLUTION_CHECKS) -> Dict[str, bool]:
        """Run the named invariant checks on W(theta)"""
        results = {}
        for name in checks:
            if name == "solution":
                results[name] = check_solution(self.extreme(theta, rows), self.table).ok
            elif name == "symmetry":
                results[name] = check_symmetry(theta, rows, self.settings)
            elif name == "support":
                results[name] = check_support(theta, rows, self.settings)
            elif name == "unified":
                results[name] = check_unified(theta, rows, self.settings)
            elif name == "parameter":
                results[name] = check_parameter(theta, self.settings)
            else:
                raise ParameterError(f"unknown check {name!r}; choose from {', '.join(SOLUTION_CHECKS)}")
        return results

    def truncated(self, n_levels: int, kappa: int, first_row: int = 1) -> SolutionArray:
        return truncated_solution(n_levels, kappa, first_row, self.table)

    def martin(
        self,
        schedule: KappaSchedule,
        row_limit: int,
        tolerance: Optional[Fraction] = None,
        n_cap: Optional[int] = None,
    ) -> MartinReport:
        return martin_limit_witness(schedule, row_limit, tolerance, n_cap, self.settings, self.table)

    def concentration(self, kappa: int, n_max: int, epsilon: Optional[Fraction] = None) -> ConcentrationReport:
        return concentration_witness(kappa, n_max, epsilon, self.settings, self.table)

    # reconstruct

    def reconstruct(self, data) -> Tuple[TriangularArray, MembershipVerdict]:
        """Full array (nabla for a left column) and its membership verdict"""
        array = nabla(data) if isinstance(data, LeftColumn) else data
        return array, in_v_check(array)

    def decompose(
        self,
        data,
        mode: str = EXACT,
        support: Optional[Sequence[BoundaryParam]] = None,
        kappa_cut: Optional[int] = None,
        row_budget: Optional[int] = None,
        threshold: Optional[Fraction] = None,
    ) -> MixtureWeights:
        """
        Decompose a left column or array

        Args:
            data: LeftColumn or TriangularArray from row 1
            mode: "exact" (linear solve over support) or "limit" (tilde-row concentration)
            support: Exact mode support; default upper:0..c, half, lower:0..c fitting the rows
            kappa_cut: Wing depth (limit mode, default 3) or cap on the default support
            row_budget: Limit mode last row, default the last available row
            threshold: Limit mode stabilization threshold
        """
        array, _ = self.reconstruct(data)
        if mode == EXACT:
            params = list(support) if support else default_support(array.max_row, kappa_cut)
            return decompose_exact(array, params, self.settings)
        if mode == LIMIT:
            cut = 3 if kappa_cut is None else kappa_cut
            budget = array.max_row if row_budget is None else row_budget
            return decompose(array, cut, budget, threshold, self.settings, self.table)
        raise ParameterError(f"mode must be {EXACT!r} or {LIMIT!r}, got {mode!r}")

    def synthesize(self, weights: Mapping[BoundaryParam, Fraction], rows: int) -> SolutionArray:
        return mix(weights, rows, self.settings)

    # sampler

    def moments(self, n: int, trials: int, seed: Optional[int] = None, replicas: int = 1) -> MomentReport:
        return descent_moments(n, trials, RngStream(seed), replicas, self.settings)

    def law_of_large_numbers(
        self, kappa: int, n_max: int, trials: int, seed: Optional[int] = None, replicas: int = 1
    ) -> LawOfLargeNumbersReport:
        return law_of_large_numbers_witness(kappa, n_max, trials, RngStream(seed), replicas, self.settings)

    def uniform_sum(self, n: int, trials: int, seed: Optional[int] = None, replicas: int = 1) -> UniformSumReport:
        return uniform_sum_identity_witness(n, trials, RngStream(seed), replicas, self.settings)

    def empirical(
        self, theta: BoundaryParam, n: int, trials: int, seed: Optional[int] = None, replicas: int = 1
    ) -> EmpiricalReport:
        return empirical_vs_exact(theta, n, trials, RngStream(seed), replicas, self.settings)

    # chain

    def run_chain(self, start: TriangleIndex, seed: Optional[int] = None) -> List[TriangleIndex]:
        return run_backward_chain(start, RngStream(seed), self.table)

    def propagate(self, start: TriangleIndex, down_to: int = 1) -> Dict[int, Tuple[Fraction, ...]]:
        return propagate_exact(start, down_to, self.table)

    def couple(self, n_levels: int, kappa_a: int, kappa_b: int, runs: int, seed: Optional[int] = None) -> CouplingSummary:
        return coupling_summary(n_levels, kappa_a, kappa_b, runs, RngStream(seed), self.table)

    def path_of(self, perm: Sequence[int]) -> LabeledPath:
        return perm_to_path(perm)

    def perm_of(self, path: LabeledPath) -> Tuple[int, ...]:
        return path_to_perm(path)

    def monotonicity(self, n_levels: int) -> bool:
        return verify_left_edge_monotonicity(n_levels, self.table)

    # records

    def record(self, record: Dict) -> Optional[int]:
        """Archive an output record dict if a store is attached"""
        if self.store is None:
            return None
        return self.store.store(record)

    def close(self) -> None:
        """Close the record store"""
        if self.store is not None:
            self.store.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

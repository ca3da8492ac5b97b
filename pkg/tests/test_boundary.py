"""
Unit tests for the extreme solutions, truncated solutions and their limits
"""

import math
from fractions import Fraction

import pytest

from eulerboundary.boundary.extreme import (
    check_parameter,
    check_solution,
    check_support,
    check_symmetry,
    check_unified,
    extreme_entry,
    extreme_solution,
    kappa_limit_witness,
    left_column_kernel,
    tilde_transform,
    unified_formula,
)
from eulerboundary.boundary.martin import (
    CENTRAL,
    KappaSchedule,
    concentration_witness,
    martin_limit_witness,
    truncated_solution,
)
from eulerboundary.core.arrays import SolutionArray, TriangularArray
from eulerboundary.core.config import Settings
from eulerboundary.core.errors import ParameterError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.triangle import EulerianTable, eulerian

ALL_PARAMS = (
    [BoundaryParam.upper(k) for k in range(11)]
    + [BoundaryParam.half()]
    + [BoundaryParam.lower(k) for k in range(11)]
)


@pytest.fixture(scope="module")
def table():
    return EulerianTable(60)


class TestExtremeSolutions:
    """Test W(theta) for every theta with kappa <= 10"""

    @pytest.mark.parametrize("theta", ALL_PARAMS, ids=str)
    def test_invariants(self, theta, table):
        """Test dual recursion, normalization, bound, support, symmetry and W_20 = theta"""
        w = extreme_solution(theta, 25)
        check = check_solution(w, table)
        assert check.ok, check.violations
        assert check_support(theta, 25)
        assert check_symmetry(theta, 25)
        assert check_parameter(theta)

    @pytest.mark.parametrize("theta", ALL_PARAMS[::3], ids=str)
    def test_unified_formula(self, theta):
        assert check_unified(theta, 25)

    def test_half_is_inverse_factorial(self):
        w = extreme_solution(BoundaryParam.half(), 6)
        for n, row in w.rows():
            assert row == tuple(Fraction(1, math.factorial(n)) for _ in range(n))

    def test_standard_order_solution(self):
        """upper:0 is the indicator of the left edge"""
        w = extreme_solution(BoundaryParam.upper(0), 5)
        for n, row in w.rows():
            assert row == (1,) + (0,) * (n - 1)

    def test_reverse_order_solution(self):
        w = extreme_solution(BoundaryParam.lower(0), 5)
        for n, row in w.rows():
            assert row == (0,) * (n - 1) + (1,)

    def test_known_entries(self):
        assert extreme_entry(BoundaryParam.upper(1), 2, 0) == Fraction(3, 4)
        assert extreme_entry(BoundaryParam.upper(1), 3, 1) == Fraction(1, 8)
        assert extreme_entry(BoundaryParam.lower(2), 3, 2) == Fraction(10, 27)
        assert unified_formula(BoundaryParam.lower(2), 3, 2) == Fraction(10, 27)

    def test_returns_solution_array(self):
        assert isinstance(extreme_solution(BoundaryParam.half(), 3), SolutionArray)

    def test_invalid_arguments(self):
        with pytest.raises(ParameterError):
            extreme_solution(BoundaryParam.half(), 0)
        with pytest.raises(ParameterError):
            extreme_solution(BoundaryParam.upper(3), 4, Settings(kappa_cap=2))
        with pytest.raises(ParameterError):
            extreme_entry(BoundaryParam.half(), 3, 3)

    @pytest.mark.parametrize("theta", ALL_PARAMS[::2], ids=str)
    def test_left_column_kernel(self, theta):
        w = extreme_solution(theta, 12)
        assert all(left_column_kernel(theta, n) == w[n, 0] for n in range(1, 13))

    def test_tilde_rows_are_distributions(self, table):
        tilde = tilde_transform(extreme_solution(BoundaryParam.upper(2), 10), table)
        for _, row in tilde.rows():
            assert sum(row) == 1
            assert all(v >= 0 for v in row)

    def test_check_solution_reports_violations(self):
        bad = TriangularArray([[1], [Fraction(1, 2), Fraction(1, 4)]])
        check = check_solution(bad)
        assert not check.ok
        assert not check.dual_recursion
        assert not check.row_sums
        assert any("dual recursion" in v for v in check.violations)

    def test_kappa_limit(self):
        """Both wings approach the half solution as kappa grows"""
        witness = kappa_limit_witness(10, 6)
        first, last = witness[0], witness[-1]
        assert first[1] == first[2]
        assert last[1] < Fraction(1, 10)
        assert last[2] < Fraction(1, 10)
        uppers = [up for _, up, _ in witness]
        assert uppers[0] > uppers[5] > uppers[10]


class TestTruncatedSolutions:
    """Test V^{N kappa}"""

    def test_small_example(self):
        v = truncated_solution(3, 1)
        assert v[2, 0] == Fraction(1, 2)
        assert v[2, 1] == Fraction(1, 2)
        assert v.row(3) == (0, Fraction(1, 4), 0)

    @pytest.mark.parametrize("n_levels,kappa", [(1, 0), (5, 0), (6, 2), (9, 8), (12, 5)])
    def test_is_solution(self, n_levels, kappa, table):
        v = truncated_solution(n_levels, kappa, table=table)
        assert check_solution(v, table).ok
        assert v.row(n_levels) == tuple(
            Fraction(int(k == kappa), eulerian(n_levels, kappa)) for k in range(n_levels)
        )

    def test_first_row_window(self, table):
        full = truncated_solution(10, 3, table=table)
        window = truncated_solution(10, 3, first_row=6, table=table)
        assert window.first_row == 6
        assert window == full.window(6, 10)

    def test_kappa_zero_is_standard_order(self):
        assert truncated_solution(8, 0) == extreme_solution(BoundaryParam.upper(0), 8)

    def test_invalid(self):
        with pytest.raises(ParameterError):
            truncated_solution(4, 4)
        with pytest.raises(ParameterError):
            truncated_solution(4, 1, first_row=5)
        with pytest.raises(ParameterError):
            truncated_solution(0, 0)


class TestKappaSchedule:
    def test_parse_and_str(self):
        for text in ("constant:2", "mirrored:0", "central"):
            assert str(KappaSchedule.parse(text)) == text
        for text in ("constant", "sideways:1", "central:2", "mirrored:-1"):
            with pytest.raises(ParameterError):
                KappaSchedule.parse(text)

    def test_kappa_and_limit(self):
        assert KappaSchedule.parse("constant:2").kappa_at(10) == 2
        assert KappaSchedule.parse("mirrored:2").kappa_at(10) == 7
        assert KappaSchedule(CENTRAL).kappa_at(11) == 5
        assert KappaSchedule.parse("mirrored:1").limit() == BoundaryParam.lower(1)
        assert KappaSchedule(CENTRAL).limit() == BoundaryParam.half()

    def test_first_level(self):
        assert KappaSchedule.parse("constant:6").first_level(4) == 7
        assert KappaSchedule.parse("constant:1").first_level(4) == 4
        assert KappaSchedule(CENTRAL).first_level(4) == 4


class TestMartinLimits:
    """Test convergence of V^{N, kappa(N)} on rows 1..4"""

    @pytest.mark.parametrize("kappa", [0, 1, 2, 3])
    def test_constant_schedule(self, kappa, table):
        report = martin_limit_witness(KappaSchedule.parse(f"constant:{kappa}"), 4, table=table)
        assert report.converged
        assert report.monotone
        assert report.final_deviation < Fraction(1, 10**6)
        assert report.deviations[-1][0] == 60

    @pytest.mark.parametrize("kappa", [1, 3])
    def test_mirrored_schedule(self, kappa, table):
        mirrored = martin_limit_witness(KappaSchedule.parse(f"mirrored:{kappa}"), 4, table=table)
        constant = martin_limit_witness(KappaSchedule.parse(f"constant:{kappa}"), 4, table=table)
        assert mirrored.converged
        assert mirrored.deviations == constant.deviations

    def test_central_schedule(self, table):
        report = martin_limit_witness(KappaSchedule(CENTRAL), 4, table=table)
        first = report.deviations[0][1]
        assert report.final_deviation < Fraction(5, 100)
        assert report.final_deviation < first
        # kappa(N) alternates between the exact centre and one off it, so
        # compare N of equal parity roughly a doubling apart
        by_level = dict(report.deviations)
        for levels in ([8, 16, 32, 60], [9, 19, 39, 59]):
            distances = [by_level[n] for n in levels]
            assert all(b < a for a, b in zip(distances, distances[1:])), levels

    def test_cap_reached_is_reported(self, caplog):
        report = martin_limit_witness(KappaSchedule.parse("constant:2"), 4, Fraction(1, 10**30), n_cap=8)
        assert not report.converged
        assert report.converged_at is None
        assert len(report.deviations) == 5
        assert "did not reach tolerance" in caplog.text

    def test_report_dict(self):
        report = martin_limit_witness(KappaSchedule.parse("constant:0"), 3, n_cap=5)
        data = report.as_dict()
        assert data["limit"] == "upper:0"
        assert data["converged_at"] == 3
        assert all(entry["deviation"] == 0 for entry in data["deviations"])

    def test_invalid(self):
        with pytest.raises(ParameterError):
            martin_limit_witness(KappaSchedule.parse("constant:1"), 0)
        with pytest.raises(ParameterError):
            martin_limit_witness(KappaSchedule.parse("constant:9"), 4, n_cap=6)


class TestConcentration:
    """Test <N,kappa>/(kappa+1)^N approaching 1"""

    @pytest.mark.parametrize("kappa", [0, 1, 2, 3])
    def test_exceeds_threshold_at_sixty(self, kappa, table):
        report = concentration_witness(kappa, 60, table=table)
        assert report.ok
        assert report.final_value > Fraction(999, 1000)
        assert report.final_value <= 1

    def test_values(self):
        assert concentration_witness(1, 2).values == [(2, Fraction(1, 4))]
        report = concentration_witness(1, 5)
        assert [v for _, v in report.values] == [
            Fraction(1, 4),
            Fraction(4, 8),
            Fraction(11, 16),
            Fraction(26, 32),
        ]

    def test_short_range_fails_threshold(self):
        report = concentration_witness(3, 10)
        assert not report.exceeds_threshold
        assert not report.ok

    def test_invalid(self):
        with pytest.raises(ParameterError):
            concentration_witness(3, 3)
        with pytest.raises(ParameterError):
            concentration_witness(-1, 5)

"""
Unit tests for the backward chain, coupling and the permutation/path bijection
"""

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eulerboundary.arrangements.descents import descent_count
from eulerboundary.boundary.extreme import tilde_transform
from eulerboundary.boundary.martin import truncated_solution
from eulerboundary.chain.backward import (
    backward_step,
    coupled_run,
    coupling_summary,
    left_edge_probabilities,
    passes_vertex,
    propagate_exact,
    run_backward_chain,
    stay_probability,
    verify_left_edge_monotonicity,
)
from eulerboundary.chain.bijection import (
    LabeledPath,
    insertion_slots,
    labeled_paths,
    path_to_perm,
    perm_to_path,
    preimage_split,
    verify_bijection,
    verify_preimage_split,
)
from eulerboundary.core.errors import ParameterError, PathError
from eulerboundary.core.rng import RngStream
from eulerboundary.core.triangle import EulerianTable, TriangleIndex, eulerian

V = TriangleIndex


@pytest.fixture(scope="module")
def table():
    return EulerianTable(20)


class TestBackwardChain:
    """Test single trajectories and exact propagation"""

    def test_from_two_zero(self):
        assert run_backward_chain(V(2, 0), RngStream(1)) == [V(2, 0), V(1, 0)]

    def test_trajectory_shape(self, table):
        path = run_backward_chain(V(12, 5), RngStream(3), table)
        assert path[0] == V(12, 5)
        assert path[-1] == V(1, 0)
        assert len(path) == 12
        for here, there in zip(path, path[1:]):
            assert there in here.lower_neighbors()

    def test_same_seed_same_path(self, table):
        assert run_backward_chain(V(15, 7), RngStream(8), table) == run_backward_chain(V(15, 7), RngStream(8), table)

    def test_stay_probability(self, table):
        assert stay_probability(V(6, 0), table) == 1
        assert stay_probability(V(6, 5), table) == 0
        assert stay_probability(V(3, 1), table) == Fraction(1, 2)
        with pytest.raises(ParameterError):
            stay_probability(V(1, 0), table)

    def test_backward_step_threshold(self, table):
        assert backward_step(V(3, 1), 0.49, table) == V(2, 1)
        assert backward_step(V(3, 1), 0.5, table) == V(2, 0)

    @pytest.mark.parametrize("start", [V(1, 0), V(5, 2), V(10, 9), V(14, 4)], ids=str)
    def test_marginals_are_distributions(self, start, table):
        marginals = propagate_exact(start, 1, table)
        assert sorted(marginals) == list(range(1, start.n + 1))
        for n, row in marginals.items():
            assert len(row) == n
            assert sum(row) == 1

    @pytest.mark.parametrize("n_levels", range(1, 13))
    def test_marginals_match_truncated_solution(self, n_levels, table):
        for kappa in range(n_levels):
            tilde = tilde_transform(truncated_solution(n_levels, kappa, table=table), table)
            marginals = propagate_exact(V(n_levels, kappa), 1, table)
            for n in range(1, n_levels + 1):
                assert marginals[n] == tilde.row(n), (n_levels, kappa, n)

    def test_partial_propagation(self, table):
        marginals = propagate_exact(V(8, 3), 5, table)
        assert sorted(marginals) == [5, 6, 7, 8]
        with pytest.raises(ParameterError):
            propagate_exact(V(8, 3), 9, table)

    def test_passes_vertex(self):
        path = run_backward_chain(V(4, 0), RngStream(0))
        assert passes_vertex(path, V(3, 0))
        assert not passes_vertex(path, V(3, 1))

    def test_sampled_marginal(self, table):
        """Empirical level-1..N occupation of (n, 0) against the exact marginal"""
        stream = RngStream(42)
        runs = 4000
        hits = [0] * 8
        for _ in range(runs):
            for vertex in run_backward_chain(V(8, 3), stream, table):
                hits[vertex.n - 1] += vertex.k == 0
        exact = propagate_exact(V(8, 3), 1, table)
        for n in range(1, 9):
            p = float(exact[n][0])
            sigma = math.sqrt(p * (1 - p) / runs)
            assert abs(hits[n - 1] / runs - p) <= 5 * sigma + 1e-12


class TestCoupling:
    """Test coupled runs from (N, kappa_a) and (N, kappa_b)"""

    def test_single_run(self, table):
        trace = coupled_run(10, 2, 6, RngStream(5), table)
        assert len(trace.trajectory_a) == len(trace.trajectory_b) == 10
        assert trace.trajectory_a[0] == V(10, 2)
        assert trace.trajectory_b[0] == V(10, 6)
        assert trace.ordering_holds()
        assert trace.left_edge_implication()
        if trace.merge_level is not None:
            level = trace.merge_level
            assert trace.trajectory_a[10 - level] == trace.trajectory_b[10 - level]

    def test_invariants_over_many_runs(self, table):
        summary = coupling_summary(10, 2, 6, 10_000, RngStream(2024), table)
        assert summary.ordering_violations == 0
        assert summary.implication_failures == 0
        assert summary.ok
        assert summary.merged == 10_000
        assert summary.left_edge_hits_a[0] == summary.left_edge_hits_b[0] == 10_000

    def test_left_edge_frequencies(self, table):
        summary = coupling_summary(10, 1, 5, 5000, RngStream(7), table)
        data = summary.as_dict()
        for level in data["left_edge"]:
            for side in ("a", "b"):
                p = float(level[f"exact_{side}"])
                sigma = math.sqrt(p * (1 - p) / summary.runs)
                assert abs(level[f"frequency_{side}"] - p) <= 5 * sigma + 1e-12

    def test_invalid(self):
        with pytest.raises(ParameterError):
            coupled_run(5, 3, 3)
        with pytest.raises(ParameterError):
            coupled_run(5, 1, 5)
        with pytest.raises(ParameterError):
            coupling_summary(5, 0, 1, 0)


class TestLeftEdgeMonotonicity:
    """V^{N kappa}_{n0} does not increase with kappa"""

    def test_all_levels_up_to_twelve(self, table):
        assert all(verify_left_edge_monotonicity(n_levels, table) for n_levels in range(1, 13))

    def test_columns(self, table):
        columns = left_edge_probabilities(4, table)
        assert columns[0] == (1, 1, 1, 1)
        assert columns[3] == (1, 0, 0, 0)
        assert columns[1][3] == 0
        assert columns[1][0] == 1


class TestBijection:
    """Test permutations <-> labeled standard paths"""

    def test_example(self):
        path = perm_to_path((2, 1, 3))
        assert path.vertices == (V(1, 0), V(2, 1), V(3, 1))
        assert path.labels == (0, 1)
        assert path_to_perm(path) == (2, 1, 3)

    def test_insertion_slots(self):
        preserving, increasing = insertion_slots((2, 1, 3))
        assert preserving == [1, 3]
        assert increasing == [0, 2]

    @pytest.mark.parametrize("n", range(1, 8))
    def test_roundtrips(self, n):
        assert verify_bijection(n)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_paths_to_vertex_give_distinct_permutations(self, n):
        for k in range(n):
            perms = {path_to_perm(path) for path in labeled_paths(n, k)}
            assert len(perms) == eulerian(n, k)
            assert all(descent_count(p) == k for p in perms)

    def test_preimage_split(self):
        assert preimage_split((1, 2)) == (1, 2)
        assert preimage_split((2, 1)) == (2, 1)
        assert all(verify_preimage_split(n) for n in range(1, 9))

    def test_path_end_tracks_descents(self):
        for perm in itertools.permutations(range(1, 6)):
            path = perm_to_path(perm)
            assert path.end == V(5, descent_count(perm))
            assert path.truncate() == perm_to_path(tuple(v for v in perm if v != 5))

    @given(st.integers(min_value=1, max_value=9).flatmap(lambda n: st.permutations(list(range(1, n + 1)))))
    def test_roundtrip_property(self, perm):
        assert path_to_perm(perm_to_path(perm)) == tuple(perm)


class TestLabeledPath:
    def test_validation(self):
        with pytest.raises(PathError):
            LabeledPath((), ())
        with pytest.raises(PathError):
            LabeledPath.from_ks([0, 1], [])
        with pytest.raises(PathError):
            LabeledPath.from_ks([0, 0, 2], [0, 0])
        with pytest.raises(PathError):
            LabeledPath.from_ks([0, 0], [1])

    def test_levels_and_truncate(self):
        path = LabeledPath.from_ks([0, 1, 1, 2], [0, 1, 0])
        assert path.start_level == 1
        assert path.end_level == 4
        assert path.end == V(4, 2)
        assert path.truncate().end == V(3, 1)
        with pytest.raises(PathError):
            LabeledPath.from_ks([0], []).truncate()

    def test_must_start_at_root(self):
        path = LabeledPath((V(2, 0), V(3, 0)), (0,))
        assert path.start_level == 2
        with pytest.raises(PathError):
            path_to_perm(path)

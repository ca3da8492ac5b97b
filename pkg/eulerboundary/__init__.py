"""
eulerboundary - exact boundary theory of the Eulerian triangle

Eulerian numbers, the extreme solutions of the dual recursion, truncated
solutions and their limits, left-column reconstruction and mixture
decomposition, random D-arrangements and the backward Markov chain.
"""

__version__ = "0.1.0"

from eulerboundary.arrangements import BucketSortArrangement, ExchangeableArrangement, arrangement_for
from eulerboundary.boundary.extreme import extreme_solution, tilde_transform, unified_formula
from eulerboundary.boundary.martin import KappaSchedule, concentration_witness, martin_limit_witness, truncated_solution
from eulerboundary.chain.backward import coupled_run, propagate_exact, run_backward_chain
from eulerboundary.chain.bijection import LabeledPath, path_to_perm, perm_to_path
from eulerboundary.core.arrays import LeftColumn, SolutionArray, TriangularArray
from eulerboundary.core.config import Settings
from eulerboundary.core.errors import EulerBoundaryError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.rng import RngStream
from eulerboundary.core.triangle import EulerianTable, TriangleIndex, eulerian
from eulerboundary.core.workbench import Workbench
from eulerboundary.reconstruct.decompose import decompose, decompose_exact, mix
from eulerboundary.reconstruct.nabla import in_v_check, nabla

__all__ = [
    "BoundaryParam",
    "BucketSortArrangement",
    "EulerBoundaryError",
    "EulerianTable",
    "ExchangeableArrangement",
    "KappaSchedule",
    "LabeledPath",
    "LeftColumn",
    "RngStream",
    "Settings",
    "SolutionArray",
    "TriangleIndex",
    "TriangularArray",
    "Workbench",
    "arrangement_for",
    "concentration_witness",
    "coupled_run",
    "decompose",
    "decompose_exact",
    "eulerian",
    "extreme_solution",
    "in_v_check",
    "martin_limit_witness",
    "mix",
    "nabla",
    "path_to_perm",
    "perm_to_path",
    "propagate_exact",
    "run_backward_chain",
    "tilde_transform",
    "truncated_solution",
    "unified_formula",
]

"""
Runtime settings
"""

import os
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

OUTPUT_DIR_ENV = "EULERBOUNDARY_OUTPUT_DIR"


@dataclass(frozen=True)
class Settings:
    """
    Caps, thresholds and trial counts shared by all modules

    Attributes:
        kappa_cap: Largest kappa accepted by boundary operations; bounds (kappa+1)^n denominators
        enumeration_max_row: Largest level for brute-force path enumeration
        stabilization_threshold: Successive-row difference below which decompose calls a weight stable
        stabilization_window: Number of trailing rows compared by decompose
        martin_n_cap: Largest N tried by martin_limit_witness
        martin_tolerance: Default convergence tolerance for martin_limit_witness
        concentration_epsilon: concentration_witness must exceed 1 - concentration_epsilon at Nmax
        sigma_bound: Width of Monte Carlo acceptance bands, in standard errors
        batch_size: Monte Carlo draws per vectorised batch
        decimal_digits: Significant digits of decimal strings in reports
        output_dir: Default directory for CLI output files
    """

    kappa_cap: int = 64
    enumeration_max_row: int = 9
    stabilization_threshold: Fraction = Fraction(1, 10**9)
    stabilization_window: int = 3
    martin_n_cap: int = 60
    martin_tolerance: Fraction = Fraction(1, 10**6)
    concentration_epsilon: Fraction = Fraction(1, 1000)
    sigma_bound: float = 4.0
    batch_size: int = 100_000
    decimal_digits: int = 12
    output_dir: Optional[str] = None

    @classmethod
    def from_env(cls, **overrides) -> "Settings":
        """Build settings, taking the default output directory from the environment"""
        settings = cls(output_dir=os.environ.get(OUTPUT_DIR_ENV) or None)
        return replace(settings, **overrides) if overrides else settings

    def with_overrides(self, **overrides) -> "Settings":
        """Copy with some fields replaced"""
        return replace(self, **overrides)


DEFAULT_SETTINGS = Settings()

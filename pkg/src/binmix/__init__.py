"""Exact confidence intervals for a weighted sum of two binomial proportions.

The estimand is vartheta = w1*theta1 + w2*theta2 observed through two
independent binomial samples.  The package provides the averaged
distribution of the weighted estimator, exact standard / shortest /
randomized-shortest confidence intervals, and exact coverage and
expected-length curves, plus a small CLI (``binmix``).
"""

from .binom import binom_cdf, binom_cdf_strict, binom_pmf
from .ci import (
    Interval,
    IntervalRequest,
    RootBracketFailure,
    SolverConfig,
    classify_sidedness,
    endpoint_lower,
    endpoint_upper,
    reflect,
    resolve_y,
    shortest_ci,
    shortest_randomized_ci,
    standard_ci,
)
from .coverage import CoveragePoint, SweepConfig, coverage_at, sweep, write_csv
from .mixture import (
    DegenerateRange,
    Model,
    NotASupportPoint,
    QuadratureConfig,
    QuadratureFailure,
    SupportGrid,
    ThetaRange,
    cdf,
    cdf_strict,
    neighbors,
    pmf,
    pmf_all,
    randomized_cdf,
    smoothed_cdf_down,
    smoothed_cdf_up,
    support_grid,
    theta1_range,
)
from .oracle import DesignTooLarge, McConfig, brute_coverage, mc_cdf

__version__ = "0.1.0"

__all__ = [
    "Interval",
    "IntervalRequest",
    "RootBracketFailure",
    "SolverConfig",
    "classify_sidedness",
    "endpoint_lower",
    "endpoint_upper",
    "reflect",
    "resolve_y",
    "shortest_ci",
    "shortest_randomized_ci",
    "standard_ci",
    "CoveragePoint",
    "SweepConfig",
    "coverage_at",
    "sweep",
    "write_csv",
    "DegenerateRange",
    "Model",
    "NotASupportPoint",
    "QuadratureConfig",
    "QuadratureFailure",
    "SupportGrid",
    "ThetaRange",
    "cdf",
    "cdf_strict",
    "neighbors",
    "pmf",
    "pmf_all",
    "randomized_cdf",
    "smoothed_cdf_down",
    "smoothed_cdf_up",
    "support_grid",
    "theta1_range",
    "DesignTooLarge",
    "McConfig",
    "brute_coverage",
    "mc_cdf",
    "binom_pmf",
    "binom_cdf",
    "binom_cdf_strict",
    "__version__",
]

"""hetmed: median-based location estimation for heteroscedastic samples.

The package bundles the point estimators, closed-form deviation bounds,
exact combinatorial oracles, and reproducible Monte Carlo experiments that
together quantify how well the empirical median estimates a common location
when every observation has its own unknown scale.
"""

from .bounds import (
    BOUND_NAMES,
    BoundReport,
    DominanceCheck,
    VarianceProfile,
    compare_all,
    devroye_bound,
    dominance_check,
    mean_deviation_bound,
    median_lower_bound_gaussian,
    median_upper_bound,
    median_upper_bound_gaussian,
    mle_deviation_bound,
    trimmed_inverse_scale_sum,
    xia_bound,
)
from .estimators import Dataset, empirical_mean, empirical_median, mle_oracle
from .oracles import (
    AnticoncentrationCheck,
    CountingIdentityCheck,
    ExactTail,
    ProbabilityRangeCheck,
    corollary2_range_check,
    lemma1_exact_check,
    lemma2_equivalence_check,
    poisson_binomial_pmf,
)
from .simulation import (
    ComparisonReport,
    CoverageCell,
    CoverageReport,
    ProfileSpec,
    QuantileRow,
    SimulationConfig,
    clopper_pearson,
    constant_c_for,
    generate_dataset,
    materialize_profile,
    run_coverage,
    run_estimator_comparison,
)

__version__ = "0.1.0"

__all__ = [
    "BOUND_NAMES",
    "AnticoncentrationCheck",
    "BoundReport",
    "ComparisonReport",
    "CountingIdentityCheck",
    "CoverageCell",
    "CoverageReport",
    "Dataset",
    "DominanceCheck",
    "ExactTail",
    "ProbabilityRangeCheck",
    "ProfileSpec",
    "QuantileRow",
    "SimulationConfig",
    "VarianceProfile",
    "clopper_pearson",
    "compare_all",
    "constant_c_for",
    "corollary2_range_check",
    "devroye_bound",
    "dominance_check",
    "empirical_mean",
    "empirical_median",
    "generate_dataset",
    "lemma1_exact_check",
    "lemma2_equivalence_check",
    "materialize_profile",
    "mean_deviation_bound",
    "median_lower_bound_gaussian",
    "median_upper_bound",
    "median_upper_bound_gaussian",
    "mle_deviation_bound",
    "mle_oracle",
    "poisson_binomial_pmf",
    "run_coverage",
    "run_estimator_comparison",
    "trimmed_inverse_scale_sum",
    "xia_bound",
]

"""Layered Hill estimators for heavy-tail exponent estimation.

The k-th layered Hill estimator generalizes the classical Hill estimator
to the k-th layer of clustered extremes: it averages log-ratios of the
top m^k minimum norms over k-point subsets satisfying a geometric
constraint.  Higher layers are robust to missing extremes in the
outermost layer.
"""

from .constraints import (
    ALWAYS_ONE,
    CONNECTIVITY,
    DIAMETER,
    PAIR_DISTANCE,
    Constraint,
    constraint_from_spec,
)
from .estimation import (
    EstimateReport,
    GeometricConstants,
    Regime,
    alpha_hat,
    confidence_interval,
    estimate_from_stream,
    geometric_constants,
    inverse_normal_cdf,
    layered_hill,
    limit_coeff_Lkl,
    normalized_statistic,
    select_regime,
    theoretical_radius_Rk,
    variance_constant_A,
)
from .geometry import GridIndex, PointCloud, build_index, load_points_csv, neighbors_within
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    config_from_dict,
    coverage_experiment,
    export_normalized_samples,
    ks_statistic,
    run_experiment,
    run_replicate,
)
from .order_stats import (
    OrderStatStream,
    brute_force_tuple_values,
    count_exceedances,
    top_tuple_values,
)
from .samplers import (
    RadialModel,
    censor_count,
    remove_top_extremes,
    replicate_rng,
    sample_cloud,
)
from .sk import LayeredHillEstimator

__version__ = "0.1.0"

__all__ = [
    "ALWAYS_ONE",
    "CONNECTIVITY",
    "DIAMETER",
    "PAIR_DISTANCE",
    "Constraint",
    "constraint_from_spec",
    "EstimateReport",
    "GeometricConstants",
    "Regime",
    "alpha_hat",
    "confidence_interval",
    "estimate_from_stream",
    "geometric_constants",
    "inverse_normal_cdf",
    "layered_hill",
    "limit_coeff_Lkl",
    "normalized_statistic",
    "select_regime",
    "theoretical_radius_Rk",
    "variance_constant_A",
    "GridIndex",
    "PointCloud",
    "build_index",
    "load_points_csv",
    "neighbors_within",
    "ExperimentConfig",
    "ExperimentReport",
    "config_from_dict",
    "coverage_experiment",
    "export_normalized_samples",
    "ks_statistic",
    "run_experiment",
    "run_replicate",
    "OrderStatStream",
    "brute_force_tuple_values",
    "count_exceedances",
    "top_tuple_values",
    "RadialModel",
    "censor_count",
    "remove_top_extremes",
    "replicate_rng",
    "sample_cloud",
    "LayeredHillEstimator",
    "__version__",
]

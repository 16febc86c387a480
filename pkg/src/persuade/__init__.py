"""Explainable signaling policies for posterior-mean information design.

Solvers for cut-based (partitional) and unrestricted signaling at a fixed
signal budget, a conversion from bi-pooling to partitional policies with a
provable half-value guarantee, price-of-explainability measurement, and an
exact-rational generator of Partition-reduction hard instances.
"""

from .analysis import (
    PoeResult,
    builtin_instance,
    discretize_utility,
    poe,
    random_instance,
    tight_instance,
)
from .conversion import (
    ConversionReport,
    conversion_certificate,
    convert_bipooling_to_partitional,
)
from .dp import (
    brute_force_partitional,
    dp_backend,
    interval_value_table,
    solve_partitional_dp,
)
from .exceptions import (
    BudgetExceededError,
    ConversionError,
    DegenerateIntervalError,
    DomainError,
    InfeasibleTargetError,
    InvalidPolicyError,
    PersuadeError,
    SchemaError,
    SolverToleranceError,
)
from .grids import DpGrid, default_grid
from .measures import (
    ROOT_TOL,
    SNAP_TOL,
    Instance,
    Prior,
    Utility,
    interval_mass,
    interval_mean,
    solve_left_endpoint,
    solve_right_endpoint,
    utility_eval,
)
from .partition_reduction import (
    PartitionInput,
    ReductionArtifacts,
    decode_policy,
    encode_solution,
    find_certificate,
    reduce_partition,
    verify_certificate,
)
from .policies import (
    BiPoolingPolicy,
    BiPoolingSegment,
    MeanDistribution,
    MpcReport,
    PartitionalPolicy,
    check_mpc,
    evaluate_bipooling,
    evaluate_partitional,
    induced_mean_distribution,
    one_signal_segment,
    two_point_feasible,
    two_signal_segment,
)
from .unrestricted import (
    SegmentChoice,
    best_two_signal,
    brute_force_unrestricted,
    solve_bipooling_dp,
)

__version__ = "0.1.0"

__all__ = [
    "BiPoolingPolicy", "BiPoolingSegment", "BudgetExceededError",
    "ConversionError", "ConversionReport", "DegenerateIntervalError",
    "DomainError", "DpGrid", "InfeasibleTargetError", "Instance",
    "InvalidPolicyError", "MeanDistribution", "MpcReport", "PartitionInput",
    "PartitionalPolicy", "PersuadeError", "PoeResult", "Prior",
    "ReductionArtifacts", "ROOT_TOL", "SchemaError", "SegmentChoice",
    "SNAP_TOL", "SolverToleranceError", "Utility",
    "best_two_signal", "brute_force_partitional", "brute_force_unrestricted",
    "builtin_instance", "check_mpc", "conversion_certificate",
    "convert_bipooling_to_partitional", "decode_policy", "default_grid",
    "discretize_utility", "dp_backend", "encode_solution",
    "evaluate_bipooling", "evaluate_partitional", "find_certificate",
    "induced_mean_distribution", "interval_mass", "interval_mean",
    "interval_value_table", "one_signal_segment", "poe", "random_instance",
    "reduce_partition", "solve_bipooling_dp", "solve_left_endpoint",
    "solve_partitional_dp", "solve_right_endpoint", "tight_instance",
    "two_point_feasible", "two_signal_segment", "utility_eval",
    "verify_certificate",
]

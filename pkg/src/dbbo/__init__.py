"""Benchmarking suite for discrete black-box optimization heuristics.

Implements the (1+lambda) EA>0 family (static, two-rate self-adjusting,
and adaptive-offspring-size variants) plus randomized local search on
generalized OneMax and LeadingOnes, with fixed-target run profiling,
cross-run aggregation, and exact expected-runtime formulas to validate
the empirical data against.
"""

from .algorithms import (
    AlgorithmSpec,
    ConfigurationError,
    GenerationState,
    RatePolicy,
    next_lambda,
    next_two_rate_r,
    parse_algorithm,
    run,
    step,
)
from .core import BitString, RngStream, derive_seed, hamming_distance, random_bitstring
from .problems import (
    LEADINGONES,
    ONEMAX,
    ProblemInstance,
    evaluate,
    generate_instance,
    parse_instance,
)
from .profiler import (
    DEFAULT_MASTER_SEED,
    CellResult,
    ConsistencyError,
    ExperimentCell,
    ExperimentConfig,
    ProblemSet,
    RunRecord,
    expand_cells,
    fixed_budget_value,
    read_raw_csv,
    record_evaluation,
    run_experiment,
)
from .stats import (
    FixedTargetTable,
    OptTimeSummary,
    fixed_target_curve,
    gradient,
    mean_optimization_time,
    read_fixed_target_csv,
    relative_difference,
    rolling_gradient,
    write_fixed_target_csv,
)
from .theory import BoundQuery, eval_oea_closed_form, eval_theorem1, tabulate_table1
from .variation import mutate, sample_binomial, sample_conditional_binomial

__version__ = "0.1.0"

__all__ = [
    "AlgorithmSpec",
    "BitString",
    "BoundQuery",
    "CellResult",
    "ConfigurationError",
    "ConsistencyError",
    "DEFAULT_MASTER_SEED",
    "ExperimentCell",
    "ExperimentConfig",
    "FixedTargetTable",
    "GenerationState",
    "LEADINGONES",
    "ONEMAX",
    "OptTimeSummary",
    "ProblemInstance",
    "ProblemSet",
    "RatePolicy",
    "RngStream",
    "RunRecord",
    "derive_seed",
    "eval_oea_closed_form",
    "eval_theorem1",
    "evaluate",
    "expand_cells",
    "fixed_budget_value",
    "fixed_target_curve",
    "generate_instance",
    "gradient",
    "hamming_distance",
    "mean_optimization_time",
    "mutate",
    "next_lambda",
    "next_two_rate_r",
    "parse_algorithm",
    "parse_instance",
    "random_bitstring",
    "read_fixed_target_csv",
    "read_raw_csv",
    "record_evaluation",
    "relative_difference",
    "rolling_gradient",
    "run",
    "run_experiment",
    "sample_binomial",
    "sample_conditional_binomial",
    "step",
    "tabulate_table1",
    "write_fixed_target_csv",
]

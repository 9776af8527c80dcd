"""Linear regression with shuffled labels: estimators, diagnostics, experiments."""

from .estimators import (
    AltMinRecord,
    AltMinResult,
    EstimationResult,
    RankDeficiencyError,
    alternating_minimization,
    build_onestep_cost,
    complete_orthonormal_basis,
    least_squares_signal,
    one_step_estimate,
    oracle_permutation_estimate,
    reduce_known_direction,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    SweepResult,
    SweepRow,
    TrialResult,
    load_config,
    parse_csv,
    reproduce_failure_demo,
    run_sweep,
    run_trial,
    sigma_for_snr,
    write_csv,
)
from .lap import Assignment, lap_brute_force, lap_maximize
from .matrixio import read_matrix, read_permutation, write_matrix, write_permutation
from .metrics import (
    NOISELESS,
    NoiselessMarker,
    RegimeLabel,
    RegimeThresholds,
    classify_regime,
    hamming_distance,
    logdet_ratio,
    minimax_logdet_threshold,
    relative_signal_error,
    snr,
    stable_rank,
)
from .model import (
    DistributionKind,
    Permutation,
    ProblemInstance,
    apply_permutation,
    build_canonical_signal,
    sample_design_matrix,
    sample_permutation_with_hamming_weight,
    synthesize_instance,
)
from .rng import derive_seed, generator

__version__ = "0.1.0"

__all__ = [
    "AltMinRecord",
    "AltMinResult",
    "Assignment",
    "ConfigError",
    "DistributionKind",
    "EstimationResult",
    "ExperimentConfig",
    "NOISELESS",
    "NoiselessMarker",
    "Permutation",
    "ProblemInstance",
    "RankDeficiencyError",
    "RegimeLabel",
    "RegimeThresholds",
    "SweepResult",
    "SweepRow",
    "TrialResult",
    "alternating_minimization",
    "apply_permutation",
    "build_canonical_signal",
    "build_onestep_cost",
    "classify_regime",
    "complete_orthonormal_basis",
    "derive_seed",
    "generator",
    "hamming_distance",
    "lap_brute_force",
    "lap_maximize",
    "least_squares_signal",
    "load_config",
    "logdet_ratio",
    "minimax_logdet_threshold",
    "one_step_estimate",
    "oracle_permutation_estimate",
    "parse_csv",
    "read_matrix",
    "read_permutation",
    "reduce_known_direction",
    "relative_signal_error",
    "reproduce_failure_demo",
    "run_sweep",
    "run_trial",
    "sample_design_matrix",
    "sample_permutation_with_hamming_weight",
    "sigma_for_snr",
    "snr",
    "stable_rank",
    "synthesize_instance",
    "write_csv",
    "write_matrix",
    "write_permutation",
]

"""Calibrated Gaussian noise for differential privacy.

The package calibrates additive Gaussian noise to an (epsilon, delta)
budget exactly (via root-finding on the normal CDF), applies it to vector
queries, post-processes releases with shrinkage and thresholding
estimators, and benchmarks the resulting estimation error.
"""

from .bench import (
    ALL_METHODS,
    EstimationConfig,
    ExperimentRecord,
    SummaryRow,
    SweepConfig,
    SweepRow,
    gen_histogram_dataset,
    gen_mean_dataset,
    records_to_csv_text,
    records_to_jsonl_text,
    run_calibration_sweep,
    run_estimation_experiment,
    summarize,
    write_records_csv,
    write_records_jsonl,
)
from .calibrate import (
    Branch,
    CalibrationResult,
    PrivacySpec,
    SensitivityProfile,
    achieved_delta,
    calibrate_analytic,
    calibrate_classical,
    calibrate_laplace,
    delta_zero,
    lower_bound_delta_threshold,
    privacy_loss_tails,
)
from .denoise import (
    DenoiserChoice,
    DenoiserKind,
    bayes_risk,
    default_threshold,
    denoise_bayes_gaussian_prior,
    denoise_james_stein,
    denoise_soft_threshold,
    estimate_mse,
    james_stein_mse,
)
from .errors import BracketingError, CalibrationError, DomainError
from .gaussnum import (
    BisectionOutcome,
    bracket_and_bisect,
    log_std_gaussian_cdf,
    std_gaussian_cdf,
)
from .mechanism import (
    Mechanism,
    QueryKind,
    QuerySpec,
    Release,
    empirical_privacy_loss_check,
    evaluate_query,
    perturb_gaussian,
    perturb_laplace,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_METHODS",
    "BisectionOutcome",
    "BracketingError",
    "Branch",
    "CalibrationError",
    "CalibrationResult",
    "DomainError",
    "EstimationConfig",
    "ExperimentRecord",
    "Mechanism",
    "PrivacySpec",
    "QueryKind",
    "QuerySpec",
    "Release",
    "SensitivityProfile",
    "SummaryRow",
    "SweepConfig",
    "SweepRow",
    "achieved_delta",
    "bayes_risk",
    "bracket_and_bisect",
    "calibrate_analytic",
    "calibrate_classical",
    "calibrate_laplace",
    "default_threshold",
    "delta_zero",
    "DenoiserChoice",
    "DenoiserKind",
    "denoise_bayes_gaussian_prior",
    "denoise_james_stein",
    "denoise_soft_threshold",
    "empirical_privacy_loss_check",
    "estimate_mse",
    "evaluate_query",
    "gen_histogram_dataset",
    "gen_mean_dataset",
    "james_stein_mse",
    "log_std_gaussian_cdf",
    "lower_bound_delta_threshold",
    "perturb_gaussian",
    "perturb_laplace",
    "privacy_loss_tails",
    "records_to_csv_text",
    "records_to_jsonl_text",
    "run_calibration_sweep",
    "run_estimation_experiment",
    "std_gaussian_cdf",
    "summarize",
    "write_records_csv",
    "write_records_jsonl",
]

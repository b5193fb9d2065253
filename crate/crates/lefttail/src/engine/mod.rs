//! Estimator-agnostic Monte Carlo runner: statistics, baseline estimators,
//! the Chernoff diagnostic, the deterministic convolution oracle, and the
//! experiment-plan dispatcher.

mod baselines;
mod oracle;
mod plan;
mod stats;

pub use baselines::{chernoff_scv_lower_bound, estimate_naive, estimate_truncation};
pub use oracle::{convolution_oracle, OracleResult};
pub use plan::{run, run_with_workers, ExperimentPlan, Method, SweepAxis, SweepVariable, WORKERS_ENV};
pub use stats::{
    run_sharded, shard_stream, CompensatedSum, EstimatorResult, Moments, SHARD_SIZE,
};

use crate::distributions::DistributionError;
use crate::numerics::NumericsError;

/// Error type shared by every estimator entry point.
#[derive(Debug, thiserror::Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("tilt solve failed: {0}")]
    Tilt(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(
        "acceptance-rejection envelope violated after re-estimation: \
         log density ratio {log_ratio} > log envelope {log_envelope}"
    )]
    EnvelopeViolation { log_ratio: f64, log_envelope: f64 },
    #[error(
        "convolution oracle error estimate {error_estimate:e} exceeds 10% of alpha {alpha:e}; \
         increase grid_points"
    )]
    OracleInaccurate { alpha: f64, error_estimate: f64 },
}

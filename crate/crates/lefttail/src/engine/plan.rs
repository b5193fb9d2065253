//! Experiment plans and the estimator dispatcher.

use serde::{Deserialize, Serialize};

use super::{EstimatorError, EstimatorResult};
use crate::distributions::{make_distribution, DistributionSpec};

/// Environment variable overriding the worker-thread count for a run.
pub const WORKERS_ENV: &str = "LEFTTAIL_WORKERS";

/// Estimator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Naive,
    Truncation,
    ExpTwist,
    GammaIs,
    LnBiased,
    LnGammaKstar,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Naive,
        Method::Truncation,
        Method::ExpTwist,
        Method::GammaIs,
        Method::LnBiased,
        Method::LnGammaKstar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Truncation => "truncation",
            Method::ExpTwist => "exp-twist",
            Method::GammaIs => "gamma-is",
            Method::LnBiased => "ln-biased",
            Method::LnGammaKstar => "ln-gamma-kstar",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.name() == name)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sweep axis variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    N,
    Gamma,
}

/// One sweep axis: the variable and its values, in output order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

/// A fully specified estimation run (plus an optional sweep axis used by the
/// CLI front end).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub method: Method,
    pub dist: DistributionSpec,
    pub n: u32,
    pub gamma: f64,
    pub samples: u64,
    /// Relative-error target; drives `recommended_m` and the `ln-biased`
    /// bias budget.
    pub epsilon: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<SweepAxis>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        self.dist.validate()?;
        if self.n == 0 {
            return Err(EstimatorError::InvalidPlan("n must be >= 1".into()));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(EstimatorError::InvalidPlan(format!(
                "gamma must be a positive real, got {}",
                self.gamma
            )));
        }
        if self.samples == 0 {
            return Err(EstimatorError::InvalidPlan("samples must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(EstimatorError::InvalidPlan(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        let is_lognormal = matches!(self.dist, DistributionSpec::LogNormal);
        match self.method {
            Method::LnBiased | Method::LnGammaKstar if !is_lognormal => {
                Err(EstimatorError::InvalidPlan(format!(
                    "{} requires the lognormal family, got {}",
                    self.method,
                    self.dist.family_name()
                )))
            }
            Method::GammaIs => {
                let d = make_distribution(self.dist.clone())?;
                if d.poly_asymptote().is_none() && !is_lognormal {
                    Err(EstimatorError::InvalidPlan(format!(
                        "gamma-is requires a polynomial zero-asymptote or the lognormal \
                         (k*) route, got {}",
                        self.dist.family_name()
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Runs the plan's estimator, deterministic given `(plan, seed)`.
///
/// Reads [`WORKERS_ENV`] for an optional worker-count override; the estimate
/// is bit-identical regardless of the worker count (only `wall_seconds` and
/// `wnrv` vary).
pub fn run(plan: &ExperimentPlan) -> Result<EstimatorResult, EstimatorError> {
    let workers = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0);
    run_with_workers(plan, workers)
}

/// [`run`] with an explicit worker-count override.
pub fn run_with_workers(
    plan: &ExperimentPlan,
    workers: Option<usize>,
) -> Result<EstimatorResult, EstimatorError> {
    plan.validate()?;
    let execute = || dispatch(plan);
    let mut result = match workers {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| EstimatorError::InvalidPlan(e.to_string()))?;
            pool.install(execute)?
        }
        None => execute()?,
    };
    // Recommended sample count (1.96)²·SCV/ε² for the plan's accuracy target;
    // the biased estimator already reports it against ε/2.
    if result.recommended_m.is_none() {
        result.recommended_m = result
            .scv
            .map(|s| (1.96f64 * 1.96 * s / (plan.epsilon * plan.epsilon)).ceil());
    }
    Ok(result)
}

fn dispatch(plan: &ExperimentPlan) -> Result<EstimatorResult, EstimatorError> {
    let d = make_distribution(plan.dist.clone())?;
    let (gamma, n, m, seed) = (plan.gamma, plan.n, plan.samples, plan.seed);
    match plan.method {
        Method::Naive => super::estimate_naive(&d, gamma, n, m, seed),
        Method::Truncation => super::estimate_truncation(&d, gamma, n, m, seed),
        Method::ExpTwist => crate::twisting::estimate_exp_twist(&d, gamma, n, m, seed),
        Method::GammaIs => crate::gamma_is::estimate_gamma_is(&d, gamma, n, m, seed),
        Method::LnBiased => {
            crate::lognormal_is::estimate_biased_truncated(gamma, n, plan.epsilon, m, seed)
        }
        Method::LnGammaKstar => crate::lognormal_is::estimate_gamma_kstar(gamma, n, m, seed),
    }
}

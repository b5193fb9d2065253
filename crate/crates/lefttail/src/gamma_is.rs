//! Gamma importance sampling keyed to the summand's polynomial behavior at
//! zero: proposal `Gamma(p+1, γ/(N(p+1)))`, whose mean per summand is exactly
//! `γ/N`, plus the empirical second-moment comparison against the
//! exponential-twisting estimator.

use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution as RandDistribution, Gamma as RandGamma};

use crate::distributions::{Distribution, DistributionSpec, PolyAsymptote};
use crate::engine::{run_sharded, EstimatorError, EstimatorResult, Moments};
use crate::numerics::log_gamma;
use crate::twisting::{solve_tilt, TiltedSampler};

/// How the proposal parameters were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamProvenance {
    /// Shape `p+1` read off the density's zero-asymptote.
    AsymptoteDerived,
    /// Optimized shape `k*` for the Log-normal summand.
    KStarOptimized,
}

/// Parameters of the Gamma IS proposal density.
#[derive(Debug, Clone, Copy)]
pub struct GammaISParams {
    /// Gamma shape (`p+1`, or `k*` for the Log-normal).
    pub shape: f64,
    /// Gamma scale; `shape·scale = γ/N` so the proposal mean per summand is
    /// the per-summand budget.
    pub scale: f64,
    /// Tilt `θ̃ = −1/scale` implied by the proposal.
    pub tilt: f64,
    pub provenance: ParamProvenance,
}

impl GammaISParams {
    /// `ln M̃(θ̃)` with `M̃(θ̃) = Γ(shape)/(−θ̃)^shape = Γ(shape)·scale^shape`.
    pub fn log_normalizer(&self) -> f64 {
        log_gamma(self.shape).expect("shape > 0") + self.shape * self.scale.ln()
    }

    /// `ln g̃(x)` of the proposal density.
    pub fn log_proposal_pdf(&self, x: f64) -> f64 {
        (self.shape - 1.0) * x.ln() - x / self.scale - self.log_normalizer()
    }
}

/// Proposal parameters from the zero-asymptote: shape `p+1`,
/// tilt `θ̃ = −(N/γ)(p+1)`, scale `γ/(N(p+1))`.
///
/// For `p = 0` this degenerates to an exponential proposal with rate `N/γ`.
pub fn gamma_is_params(
    asym: &PolyAsymptote,
    gamma: f64,
    n: u32,
) -> Result<GammaISParams, EstimatorError> {
    if !(gamma > 0.0) || n == 0 {
        return Err(EstimatorError::InvalidPlan(format!(
            "gamma_is_params requires gamma > 0 and n >= 1, got gamma = {gamma}, n = {n}"
        )));
    }
    if !(asym.p > -1.0) {
        return Err(EstimatorError::InvalidPlan(format!(
            "gamma_is_params requires a polynomial exponent p > -1, got {}",
            asym.p
        )));
    }
    let shape = asym.p + 1.0;
    let scale = gamma / n as f64 / shape;
    Ok(GammaISParams {
        shape,
        scale,
        tilt: -1.0 / scale,
        provenance: ParamProvenance::AsymptoteDerived,
    })
}

/// Proposal parameters for a distribution object; Log-normal summands route
/// to the optimized shape `k*` since they carry no polynomial asymptote.
pub fn params_for_distribution(
    d: &Distribution,
    gamma: f64,
    n: u32,
) -> Result<GammaISParams, EstimatorError> {
    match d.poly_asymptote() {
        Some(asym) => gamma_is_params(asym, gamma, n),
        None => match d.spec() {
            DistributionSpec::LogNormal => Ok(crate::lognormal_is::kstar_params(gamma, n)),
            _ => Err(EstimatorError::InvalidPlan(format!(
                "{} has no polynomial zero-asymptote; only the Log-normal has an \
                 optimized-shape route (optimal_shape_k)",
                d.spec().family_name()
            ))),
        },
    }
}

/// Log likelihood ratio `Σᵢ [ln f(xᵢ) − ln g̃(xᵢ)]` of one IS sample vector.
pub fn log_weight(
    d: &Distribution,
    params: &GammaISParams,
    x_vec: &[f64],
) -> Result<f64, EstimatorError> {
    let mut acc = 0.0;
    for &x in x_vec {
        if !(x > 0.0) {
            return Err(EstimatorError::InvalidPlan(format!(
                "log_weight requires every coordinate > 0, got {x}"
            )));
        }
        acc += d.log_pdf_raw(x) - params.log_proposal_pdf(x);
    }
    Ok(acc)
}

/// Algebraically equal form factored through the proposal normalizer:
/// `N·ln M̃(θ̃) + Σᵢ [ln f(xᵢ) − θ̃xᵢ − p·ln xᵢ]`.
pub fn log_weight_mgf_form(
    d: &Distribution,
    params: &GammaISParams,
    x_vec: &[f64],
) -> Result<f64, EstimatorError> {
    let p = params.shape - 1.0;
    let mut acc = x_vec.len() as f64 * params.log_normalizer();
    for &x in x_vec {
        if !(x > 0.0) {
            return Err(EstimatorError::InvalidPlan(format!(
                "log_weight requires every coordinate > 0, got {x}"
            )));
        }
        acc += d.log_pdf_raw(x) - params.tilt * x - p * x.ln();
    }
    Ok(acc)
}

/// Gamma-IS estimator of `α(γ, N)` with explicit proposal parameters:
/// per sample, draw `N` Gamma variates, apply the indicator `Σxᵢ ≤ γ`, and
/// weight by the likelihood ratio (assembled in log domain).
pub fn estimate_gamma_is_with_params(
    d: &Distribution,
    params: &GammaISParams,
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    let proposal = RandGamma::new(params.shape, params.scale)
        .map_err(|e| EstimatorError::InvalidPlan(e.to_string()))?;
    let log_norm = params.log_normalizer();
    let shape = params.shape;
    let scale = params.scale;

    let (moments, wall) = run_sharded(
        m,
        seed,
        |_shard| (),
        |_, rng: &mut ChaCha12Rng, _acc: &mut Moments| -> Result<f64, EstimatorError> {
            let mut sum = 0.0f64;
            let mut log_f = 0.0f64;
            let mut log_x = 0.0f64;
            for _ in 0..n {
                let x = proposal.sample(rng);
                if !(x > 0.0) {
                    return Err(EstimatorError::InvalidPlan(format!(
                        "proposal produced a nonpositive draw {x}"
                    )));
                }
                sum += x;
                log_f += d.log_pdf_raw(x);
                log_x += x.ln();
            }
            if sum <= gamma {
                // Σ[ln f − ln g̃] with the proposal terms batched.
                let log_w =
                    log_f - (shape - 1.0) * log_x + sum / scale + n as f64 * log_norm;
                Ok(log_w.exp())
            } else {
                Ok(0.0)
            }
        },
    );
    Ok(EstimatorResult::from_moments(&moments?, wall, seed, None))
}

/// Gamma-IS estimator with parameters derived from the summand itself
/// (asymptote shape, or `k*` for the Log-normal).
pub fn estimate_gamma_is(
    d: &Distribution,
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    let params = params_for_distribution(d, gamma, n)?;
    estimate_gamma_is_with_params(d, &params, gamma, n, m, seed)
}

/// Empirical second moment `Â₁` of the Gamma-IS estimator on `m` samples.
pub fn second_moment_gamma_is(
    d: &Distribution,
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<f64, EstimatorError> {
    let params = params_for_distribution(d, gamma, n)?;
    let r = estimate_gamma_is_with_params(d, &params, gamma, n, m, seed)?;
    Ok(second_moment(&r))
}

/// Empirical second moment `Â₂` of the exponential-twisting estimator.
pub fn second_moment_exp_twist(
    d: &Distribution,
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<f64, EstimatorError> {
    let tilt = solve_tilt(d, gamma, n)?;
    let sampler = TiltedSampler::new(d, &tilt)?;
    let log_norm_total = n as f64 * tilt.normalizer.ln();
    let theta = tilt.theta;
    let (moments, _wall) = run_sharded(
        m,
        seed,
        |_shard| sampler.clone(),
        |s: &mut TiltedSampler, rng: &mut ChaCha12Rng, acc: &mut Moments| -> Result<f64, EstimatorError> {
            let mut sum = 0.0f64;
            for _ in 0..n {
                let (x, proposals) = s.draw(rng)?;
                acc.ar_proposals += proposals;
                acc.ar_accepts += 1;
                sum += x;
            }
            if sum <= gamma {
                Ok((log_norm_total - theta * sum).exp())
            } else {
                Ok(0.0)
            }
        },
    );
    let moments = moments?;
    Ok(moments.sum_weight_sq() / moments.count as f64)
}

/// Ratio `Â₁/Â₂` of the empirical second moments of the Gamma-IS and
/// exponential-twisting estimators, each on `m` fresh samples.
pub fn second_moment_ratio(
    d: &Distribution,
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<f64, EstimatorError> {
    let a1 = second_moment_gamma_is(d, gamma, n, m, seed)?;
    let a2 = second_moment_exp_twist(d, gamma, n, m, seed.wrapping_add(0x51ab_17ed))?;
    Ok(a1 / a2)
}

fn second_moment(r: &EstimatorResult) -> f64 {
    // E[w²] = Var + mean², recovered from the report.
    r.variance_of_mean * r.samples as f64 + r.estimate * r.estimate
}

//! Baseline estimators (naive Monte Carlo and conditional truncation) and
//! the Chernoff lower bound on the truncation estimator's SCV.

use rand_chacha::ChaCha12Rng;

use super::{run_sharded, EstimatorError, EstimatorResult, Moments};
use crate::distributions::{ConditionalScaledSampler, Distribution};
use crate::numerics::integrate_finite;

/// Naive Monte Carlo: empirical frequency of `{Σxᵢ ≤ γ}` under the summand
/// density itself. Unbiased with variance `p(1−p)/M`.
pub fn estimate_naive(
    d: &Distribution,
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    let (moments, wall) = run_sharded(
        m,
        seed,
        |_shard| (),
        |_, rng: &mut ChaCha12Rng, _acc: &mut Moments| {
            let mut sum = 0.0f64;
            for _ in 0..n {
                sum += d.sample(rng);
            }
            Ok::<f64, EstimatorError>(if sum <= gamma { 1.0 } else { 0.0 })
        },
    );
    Ok(EstimatorResult::from_moments(&moments?, wall, seed, None))
}

/// Conditional-truncation estimator: `α = F(γ)^N · P(Σwᵢ ≤ 1)` with
/// `wᵢ = Xᵢ/γ | Xᵢ ≤ γ`. The prefactor is computed as `exp(N·ln F(γ))` and
/// the `wᵢ` come from the cached conditional sampler.
pub fn estimate_truncation(
    d: &Distribution,
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    let sampler = ConditionalScaledSampler::new(d, gamma)?;
    let prefactor = (n as f64 * sampler.f_gamma().ln()).exp();
    let (moments, wall) = run_sharded(
        m,
        seed,
        |_shard| sampler.clone(),
        |s: &mut ConditionalScaledSampler, rng: &mut ChaCha12Rng, _acc: &mut Moments| {
            let mut sum = 0.0f64;
            for _ in 0..n {
                sum += s.draw(rng);
            }
            Ok::<f64, EstimatorError>(if sum <= 1.0 { prefactor } else { 0.0 })
        },
    );
    Ok(EstimatorResult::from_moments(&moments?, wall, seed, None))
}

/// Lower bound on the truncation estimator's asymptotic SCV from the
/// Chernoff bound at `η = 1`: `exp(−1 − N·ln E_{f_w}[e^{-w}])`, with the
/// expectation computed by quadrature of `f_w` on `[0, 1]`.
pub fn chernoff_scv_lower_bound(
    d: &Distribution,
    gamma: f64,
    n: u32,
) -> Result<f64, EstimatorError> {
    if !(gamma > 0.0) || n == 0 {
        return Err(EstimatorError::InvalidPlan(format!(
            "chernoff_scv_lower_bound requires gamma > 0 and n >= 1, got {gamma}, {n}"
        )));
    }
    let f_gamma = d.cdf(gamma)?;
    if f_gamma <= 0.0 {
        return Err(EstimatorError::Distribution(
            crate::distributions::DistributionError::CdfUnderflow { gamma },
        ));
    }
    // E[e^{-w}] under f_w(w) = γ f(γw)/F(γ) on [0, 1].
    let integral = integrate_finite(
        |w| (-w).exp() * gamma * d.log_pdf_raw(gamma * w).exp(),
        0.0,
        1.0,
        1e-11,
    )?;
    let expectation = integral.value / f_gamma;
    Ok((-1.0 - n as f64 * expectation.ln()).exp())
}

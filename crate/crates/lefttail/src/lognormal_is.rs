//! Log-normal specializations: the bias-controlled truncated estimator with
//! a first-order-Taylor tilted proposal, and the unbiased Gamma proposal
//! with optimized shape `k*`.
//!
//! The summand is the standard Log-normal (`exp(Z)`, `Z ~ N(0,1)`); its
//! density vanishes at zero faster than any polynomial, so the
//! asymptote-derived Gamma shape does not exist and these two routes take
//! its place.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::distributions::{make_distribution, DistributionSpec};
use crate::engine::{run_sharded, EstimatorError, EstimatorResult, Moments};
use crate::gamma_is::{estimate_gamma_is_with_params, GammaISParams, ParamProvenance};
use crate::numerics::{inv_log_std_normal_cdf, log_std_normal_cdf, std_normal_cdf};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
/// The truncation point must sit strictly below e⁻¹ so that the derivative of
/// the truncated density at the cut is positive.
const A_MAX: f64 = 0.367_879_441_171_442_32;

/// Truncation plan: support cut `a = δγ/N` with the relative bias certified
/// at `ε/2`.
#[derive(Debug, Clone, Copy)]
pub struct TruncationPlan {
    /// Truncation point `δγ/N`.
    pub a: f64,
    /// Truncation fraction `δ ∈ [0, 1)`.
    pub delta: f64,
    /// Global relative error target `ε`.
    pub epsilon: f64,
    /// Certified relative bias bound (equals `ε/2` by construction).
    pub bias_bound: f64,
    pub n: u32,
    pub gamma: f64,
}

/// First-order tilted proposal at the truncation point: a mixture of a
/// shifted exponential and a shifted Gamma(2) with common rate `−θ`.
#[derive(Debug, Clone, Copy)]
pub struct TaylorTilt {
    /// Tilt parameter solving the mean condition in closed form.
    pub theta: f64,
    /// Truncated density at the cut, `f̄(a)`.
    pub f_bar_at_a: f64,
    /// Derivative of the truncated density at the cut, `f̄′(a) > 0`.
    pub f_bar_prime_at_a: f64,
    /// Normalizer `M̃(θ)` of the unnormalized proposal.
    pub normalizer: f64,
    /// `c = (γ/N)(1 − δ)`, the mean budget left after the shift to `a`.
    pub c: f64,
    pub mix_weight_1: f64,
    pub mix_weight_2: f64,
    a: f64,
}

/// Chooses `δ` so the relative truncation bias is certified at `ε/2`:
/// `δ = (N/γ)·exp(Φ⁻¹((ε/2N)·Φ(ln(γ/N))^N / Φ(ln γ)^{N−1}))`.
///
/// Assembled entirely in log domain: the `Φ⁻¹` argument is
/// `exp(ln(ε/2N) + N·lnΦ(ln(γ/N)) − (N−1)·lnΦ(ln γ))`, inverted through the
/// asymptotic inverse of `lnΦ`, which keeps the construction alive far past
/// the linear-domain underflow threshold.
pub fn delta_for_bias(epsilon: f64, n: u32, gamma: f64) -> Result<TruncationPlan, EstimatorError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(EstimatorError::InvalidPlan(format!(
            "delta_for_bias requires epsilon in (0, 1), got {epsilon}"
        )));
    }
    if n == 0 || !(gamma > 0.0) || !gamma.is_finite() {
        return Err(EstimatorError::InvalidPlan(format!(
            "delta_for_bias requires n >= 1 and gamma > 0, got n = {n}, gamma = {gamma}"
        )));
    }
    let nf = n as f64;
    let log_q = (epsilon / (2.0 * nf)).ln() + nf * log_std_normal_cdf((gamma / nf).ln())
        - (nf - 1.0) * log_std_normal_cdf(gamma.ln());
    let x = inv_log_std_normal_cdf(log_q)?;
    // δ = (N/γ)·e^x; refuse (reporting ln δ) if it underflows.
    let log_delta = (nf / gamma).ln() + x;
    if log_delta < f64::MIN_POSITIVE.ln() {
        return Err(EstimatorError::InvalidPlan(format!(
            "delta underflows double precision: ln(delta) = {log_delta:.6e}; \
             the truncation construction cannot represent this regime"
        )));
    }
    let delta = log_delta.exp();
    let a = x.exp(); // a = δγ/N exactly
    if !(delta < 1.0) {
        return Err(EstimatorError::InvalidPlan(format!(
            "delta = {delta} is not in [0, 1); the requested (epsilon, N, gamma) does not \
             describe a truncation plan"
        )));
    }
    if !(a < A_MAX) {
        return Err(EstimatorError::InvalidPlan(format!(
            "truncation point a = {a} violates the standing assumption a < e^-1 \
             (needed so the truncated density has positive slope at the cut)"
        )));
    }
    // Re-evaluate the bias chain N·Φ(ln a)·Φ(ln γ)^{N−1}/Φ(ln(γ/N))^N through
    // the full log-domain path; it must reproduce ε/2.
    let bias_bound = (nf.ln() + log_std_normal_cdf(a.ln())
        + (nf - 1.0) * log_std_normal_cdf(gamma.ln())
        - nf * log_std_normal_cdf((gamma / nf).ln()))
    .exp();
    Ok(TruncationPlan { a, delta, epsilon, bias_bound, n, gamma })
}

/// Closed-form tilt for `f̄ + (x−a)f̄′` given the positive root of the mean
/// condition quadratic; `f_bar_prime = 0` degenerates to `θ = −1/c` (a pure
/// shifted exponential).
pub(crate) fn solve_taylor_theta(f_bar: f64, f_bar_prime: f64, c: f64) -> f64 {
    let q = f_bar - c * f_bar_prime;
    let s = 8.0 * f_bar * f_bar_prime * c;
    if q > 0.0 {
        -(q + (q * q + s).sqrt()) / (2.0 * c * f_bar)
    } else {
        // Conjugate form avoids cancellation when q ≤ 0.
        -4.0 * f_bar_prime / ((q * q + s).sqrt() - q)
    }
}

/// Builds the tilted proposal at the plan's truncation point.
pub fn taylor_tilt(plan: &TruncationPlan) -> Result<TaylorTilt, EstimatorError> {
    let a = plan.a;
    let ln_a = a.ln();
    let survival = 1.0 - std_normal_cdf(ln_a);
    let log_f_a = -ln_a - 0.5 * ln_a * ln_a - LN_SQRT_2PI;
    let f_bar = log_f_a.exp() / survival;
    if !(f_bar > 0.0) || !f_bar.is_finite() {
        return Err(EstimatorError::InvalidPlan(format!(
            "truncated density underflows at a = {a:e} (ln f = {log_f_a:.3e})"
        )));
    }
    // f̄′(x) = −f̄(x)·(1 + ln x)/x; positive for a < e⁻¹.
    let f_bar_prime = -f_bar * (1.0 + ln_a) / a;
    if !(f_bar_prime > 0.0) {
        return Err(EstimatorError::InvalidPlan(format!(
            "f_bar_prime = {f_bar_prime} must be positive; contract violated at a = {a}"
        )));
    }
    let c = plan.gamma / plan.n as f64 * (1.0 - plan.delta);
    let theta = solve_taylor_theta(f_bar, f_bar_prime, c);
    let exp_theta_a = (theta * a).exp();
    let mass_1 = -exp_theta_a * f_bar / theta;
    let mass_2 = exp_theta_a * f_bar_prime / (theta * theta);
    let normalizer = mass_1 + mass_2;
    let mix_weight_1 = mass_1 / normalizer;
    let mix_weight_2 = mass_2 / normalizer;
    // Mean condition M̃′(θ)/M̃(θ) = γ/N, satisfied by the closed-form θ.
    let target = plan.gamma / plan.n as f64;
    let mean = mix_weight_1 * (a - 1.0 / theta) + mix_weight_2 * (a - 2.0 / theta);
    if (mean - target).abs() > 1e-9 * target {
        return Err(EstimatorError::Tilt(format!(
            "taylor tilt mean {mean} does not match gamma/N = {target}"
        )));
    }
    Ok(TaylorTilt {
        theta,
        f_bar_at_a: f_bar,
        f_bar_prime_at_a: f_bar_prime,
        normalizer,
        c,
        mix_weight_1,
        mix_weight_2,
        a,
    })
}

impl TaylorTilt {
    /// `ln f̃(x)` of the normalized proposal for `x > a`.
    pub fn log_proposal_pdf(&self, x: f64) -> f64 {
        ((self.f_bar_at_a + (x - self.a) * self.f_bar_prime_at_a).ln() + self.theta * x)
            - self.normalizer.ln()
    }
}

/// One draw from the tilted proposal: with probability `mix_weight_1` a
/// shifted exponential `a + Exp(−θ)`, otherwise a shifted `Gamma(2, −θ)`.
/// Every draw exceeds the truncation point.
pub fn sample_taylor_tilt<R: Rng + ?Sized>(
    tilt: &TaylorTilt,
    plan: &TruncationPlan,
    rng: &mut R,
) -> f64 {
    let rate = -tilt.theta;
    let pick: f64 = rng.random();
    let u1: f64 = rng.random();
    let e1 = -(-u1).ln_1p() / rate;
    if pick < tilt.mix_weight_1 {
        plan.a + e1
    } else {
        let u2: f64 = rng.random();
        let e2 = -(-u2).ln_1p() / rate;
        plan.a + e1 + e2
    }
}

/// Biased truncated estimator of `α(γ, N)`:
/// `(1 − F(δγ/N))^N · (1/M) Σ 1{Σxᵢ ≤ γ} Π f̄(xᵢ)/f̃(xᵢ)`, flagged `biased`
/// with the certified relative bias attached. The statistical error target is
/// `ε/2`, so the recommended sample count uses `(1.96)²·SCV/(ε/2)²`.
pub fn estimate_biased_truncated(
    gamma: f64,
    n: u32,
    epsilon: f64,
    m: u64,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    let plan = delta_for_bias(epsilon, n, gamma)?;
    let tilt = taylor_tilt(&plan)?;
    let survival = 1.0 - std_normal_cdf(plan.a.ln());
    let log_prefactor = n as f64 * survival.ln();
    let log_norm = tilt.normalizer.ln();
    let log_survival = survival.ln();

    let (moments, wall) = run_sharded(
        m,
        seed,
        |_shard| (),
        |_, rng: &mut ChaCha12Rng, _acc: &mut Moments| {
            let mut sum = 0.0f64;
            let mut log_ratio = 0.0f64;
            for _ in 0..n {
                let x = sample_taylor_tilt(&tilt, &plan, rng);
                sum += x;
                // ln f̄(x) − ln f̃(x) with f̄ the truncated Log-normal.
                let lx = x.ln();
                let log_f_bar = -lx - 0.5 * lx * lx - LN_SQRT_2PI - log_survival;
                let log_f_tilde = (tilt.f_bar_at_a
                    + (x - plan.a) * tilt.f_bar_prime_at_a)
                    .ln()
                    + tilt.theta * x
                    - log_norm;
                log_ratio += log_f_bar - log_f_tilde;
            }
            if sum <= gamma {
                Ok::<f64, EstimatorError>((log_prefactor + log_ratio).exp())
            } else {
                Ok(0.0)
            }
        },
    );
    let mut result =
        EstimatorResult::from_moments(&moments?, wall, seed, Some(epsilon / 2.0));
    result.biased = true;
    result.bias_bound = plan.bias_bound;
    Ok(result)
}

/// Optimized Gamma shape for Log-normal summands:
/// `k* = (ln(N/γ) + sqrt(ln²(N/γ) + 2))/2`, which grows like `ln(N/γ)` in the
/// rare regime.
pub fn optimal_shape_k(n: u32, gamma: f64) -> f64 {
    optimal_shape_for_ratio(n as f64 / gamma)
}

pub(crate) fn optimal_shape_for_ratio(n_over_gamma: f64) -> f64 {
    let l = n_over_gamma.ln();
    0.5 * (l + (l * l + 2.0).sqrt())
}

/// Gamma-IS parameters with the optimized shape: `Gamma(k*, γ/(N·k*))`.
pub fn kstar_params(gamma: f64, n: u32) -> GammaISParams {
    let shape = optimal_shape_k(n, gamma);
    let scale = gamma / n as f64 / shape;
    GammaISParams {
        shape,
        scale,
        tilt: -1.0 / scale,
        provenance: ParamProvenance::KStarOptimized,
    }
}

/// Unbiased Gamma-IS estimator for standard Log-normal summands with the
/// optimized shape `k*`.
pub fn estimate_gamma_kstar(
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    let d = make_distribution(DistributionSpec::LogNormal)?;
    let params = kstar_params(gamma, n);
    estimate_gamma_is_with_params(&d, &params, gamma, n, m, seed)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen reference values
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn bias_bound_identity() {
        // The certified chain reproduces ε/2 to 1e-6 relative.
        let plan = delta_for_bias(0.05, 9, 0.5).unwrap();
        let ratio = plan.bias_bound / (0.05 / 2.0);
        assert!((ratio - 1.0).abs() <= 1e-6, "ratio = {ratio}");
        // mpmath cross-check of the construction itself.
        assert_relative_eq!(plan.delta, 1.033698335574463e-3, max_relative = 1e-9);
        assert_relative_eq!(plan.a, 5.742768530969242e-5, max_relative = 1e-9);
    }

    #[test]
    fn delta_in_unit_interval_and_a_below_cutoff() {
        let plan = delta_for_bias(0.05, 2, 1.0).unwrap();
        assert!(plan.delta > 0.0 && plan.delta < 1.0);
        assert!(plan.a < A_MAX);
    }

    #[test]
    fn halving_epsilon_decreases_delta() {
        let d1 = delta_for_bias(0.05, 5, 0.5).unwrap().delta;
        let d2 = delta_for_bias(0.025, 5, 0.5).unwrap().delta;
        assert!(d2 < d1, "delta({}) !< delta({})", d2, d1);
    }

    #[test]
    fn invalid_epsilon_rejected() {
        assert!(delta_for_bias(0.0, 5, 0.5).is_err());
        assert!(delta_for_bias(1.0, 5, 0.5).is_err());
        assert!(delta_for_bias(0.05, 0, 0.5).is_err());
    }

    #[test]
    fn delta_underflow_refused_with_log_reported() {
        // Deep enough in (N, γ) the construction leaves no representable δ;
        // the error reports ln(δ) instead of a silent zero.
        let err = delta_for_bias(0.5, 6000, 0.01).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("ln(delta)"), "unexpected message: {msg}");
    }

    #[test]
    fn taylor_theta_degenerate_limit() {
        // With f̄′ forced to zero the quadratic collapses to θ = −1/c and the
        // first mixture component alone has mean a + c = γ/N.
        let c = 0.055;
        let theta = solve_taylor_theta(1.4e-17, 0.0, c);
        assert_relative_eq!(theta, -1.0 / c, max_relative = 1e-12);
    }

    #[test]
    fn mixture_collapse_is_a_pure_shifted_exponential() {
        // mix_weight_2 = 0 edge: every draw is a + Exp(−θ), with mean
        // a + 1/(−θ).
        let plan = delta_for_bias(0.05, 9, 0.5).unwrap();
        let base = taylor_tilt(&plan).unwrap();
        let tilt = TaylorTilt { mix_weight_1: 1.0, mix_weight_2: 0.0, ..base };
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(78);
        let m = 50_000;
        let mut sum = 0.0;
        for _ in 0..m {
            sum += sample_taylor_tilt(&tilt, &plan, &mut rng);
        }
        let mean = sum / m as f64;
        let want = plan.a + 1.0 / (-tilt.theta);
        let se = 1.0 / (-tilt.theta) / (m as f64).sqrt();
        assert!((mean - want).abs() <= 4.0 * se, "mean {mean} vs {want}");
    }

    #[test]
    fn taylor_tilt_reference_case() {
        // mpmath worked example at (ε, N, γ) = (0.05, 9, 0.5).
        let plan = delta_for_bias(0.05, 9, 0.5).unwrap();
        let tilt = taylor_tilt(&plan).unwrap();
        assert_relative_eq!(tilt.theta, -36.03299870234521, max_relative = 1e-8);
        assert_relative_eq!(tilt.f_bar_at_a, 1.3668862773814176e-17, max_relative = 1e-8);
        assert_relative_eq!(
            tilt.f_bar_prime_at_a,
            2.0862300739938980e-12,
            max_relative = 1e-8
        );
        assert_relative_eq!(tilt.normalizer, 1.6038554581037569e-15, max_relative = 1e-8);
        assert_relative_eq!(tilt.mix_weight_2, 0.9997639695311578, max_relative = 1e-8);
        // Mixture weights sum to one.
        assert!((tilt.mix_weight_1 + tilt.mix_weight_2 - 1.0).abs() <= 1e-12);
        // Residual of the mean condition.
        let target = 0.5 / 9.0;
        let mean = tilt.mix_weight_1 * (plan.a - 1.0 / tilt.theta)
            + tilt.mix_weight_2 * (plan.a - 2.0 / tilt.theta);
        assert!((mean - target).abs() <= 1e-10 * target);
    }

    #[test]
    fn mixture_masses_reconstruct_normalizer() {
        for (eps, n, gamma) in [(0.05, 9u32, 0.5), (0.01, 5, 1.0), (0.05, 2, 1.0)] {
            let plan = delta_for_bias(eps, n, gamma).unwrap();
            let t = taylor_tilt(&plan).unwrap();
            let m1 = -(t.theta * plan.a).exp() * t.f_bar_at_a / t.theta;
            let m2 = (t.theta * plan.a).exp() * t.f_bar_prime_at_a / (t.theta * t.theta);
            assert_relative_eq!(m1 + m2, t.normalizer, max_relative = 1e-12);
        }
    }

    #[test]
    fn density_reconstruction_identity() {
        // M̃(θ)·f̃(x) = (f̄ + (x−a)f̄′)e^{θx} pointwise on a grid.
        let plan = delta_for_bias(0.05, 9, 0.5).unwrap();
        let t = taylor_tilt(&plan).unwrap();
        for i in 0..200 {
            let x = plan.a + i as f64 * 0.002;
            let lhs = t.normalizer * t.log_proposal_pdf(x).exp();
            let rhs =
                (t.f_bar_at_a + (x - plan.a) * t.f_bar_prime_at_a) * (t.theta * x).exp();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        }
    }

    #[test]
    fn taylor_samples_exceed_cut_and_match_mean() {
        let plan = delta_for_bias(0.05, 9, 0.5).unwrap();
        let tilt = taylor_tilt(&plan).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
        let m = 100_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..m {
            let x = sample_taylor_tilt(&tilt, &plan, &mut rng);
            assert!(x > plan.a);
            sum += x;
            sq += x * x;
        }
        let mean = sum / m as f64;
        let sd = (sq / m as f64 - mean * mean).sqrt();
        let target = 0.5 / 9.0;
        assert!(
            (mean - target).abs() <= 4.0 * sd / (m as f64).sqrt(),
            "taylor-tilt mean {mean} vs {target}"
        );
    }

    #[test]
    fn optimal_shape_reference_values() {
        // N/γ = 1 kills the log term, leaving sqrt(2)/2.
        assert_relative_eq!(
            optimal_shape_for_ratio(1.0),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-14
        );
        // N/γ = e gives (1 + sqrt(3))/2.
        assert_relative_eq!(
            optimal_shape_for_ratio(std::f64::consts::E),
            1.3660254037844386,
            epsilon = 1e-14
        );
        assert_relative_eq!(optimal_shape_k(9, 0.5), 3.0540868158335518, epsilon = 1e-10);
    }

    #[test]
    fn kstar_grows_like_log_ratio() {
        let r = 1e4;
        let k = optimal_shape_for_ratio(r);
        let ratio = k / r.ln();
        assert!((0.9..=1.2).contains(&ratio), "k*/ln(N/γ) = {ratio}");
    }
}

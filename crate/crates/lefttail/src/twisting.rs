//! Exponential-twisting machinery: MGF evaluation, tilt-parameter solving,
//! acceptance-rejection sampling from the tilted density
//! `f*(x) ∝ f(x)·e^{θx}`, and the twisted importance-sampling estimator.
//!
//! A tilt solution and its acceptance-rejection envelope are computed once
//! and shared read-only; sampling workers own private streams and report
//! acceptance counts through the shard moments.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution as RandDistribution, Gamma as RandGamma};

use crate::distributions::{make_distribution, Distribution, DistributionSpec};
use crate::engine::{run_sharded, EstimatorError, EstimatorResult, Moments};
use crate::numerics::{find_root_bracketed, integrate_semi_infinite, log_gamma};

/// Quadrature tolerance for MGF integrals (relative).
const MGF_TOL: f64 = 1e-11;
/// Tilts below this switch the MGF integrand to a rescaled variable.
const RESCALE_THETA: f64 = -100.0;
/// Bracket expansion cap: beyond this the tilt equation is numerically
/// degenerate.
const THETA_CAP: f64 = -1e12;
/// Acceptance-rejection envelope: grid size, quantile window, safety factor.
const ENVELOPE_GRID: usize = 4096;
const ENVELOPE_QUANTILE: f64 = 1e-12;
const ENVELOPE_SAFETY: f64 = 1.05;

/// A solved tilt parameter with its normalizer `M(θ)`.
#[derive(Debug, Clone, Copy)]
pub struct TiltSolution {
    /// Tilt parameter; negative in the left-tail regime.
    pub theta: f64,
    /// `M(θ) = E[e^{θX}]`.
    pub normalizer: f64,
    /// `M′(θ)/M(θ) − γ/N` at the returned tilt.
    pub residual: f64,
    /// Achieved mean of the tilted density (`≈ γ/N`).
    pub mean_under_tilt: f64,
}

/// Acceptance-rejection accounting for a batch of tilted draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ARReport {
    pub proposals: u64,
    pub accepts: u64,
    pub envelope_constant: f64,
}

/// `M(θ) = E[exp(θX)]` for `θ ≤ 0`: closed form for Exponential and Gamma
/// summands, semi-infinite quadrature otherwise (relative error `≤ 1e-10`).
pub fn mgf(d: &Distribution, theta: f64) -> Result<f64, EstimatorError> {
    mgf_moment(d, theta, 0)
}

/// `M′(θ) = E[X·exp(θX)]` for `θ ≤ 0`.
pub fn mgf_derivative(d: &Distribution, theta: f64) -> Result<f64, EstimatorError> {
    mgf_moment(d, theta, 1)
}

fn mgf_moment(d: &Distribution, theta: f64, order: u32) -> Result<f64, EstimatorError> {
    if !(theta <= 0.0) || !theta.is_finite() {
        return Err(EstimatorError::Tilt(format!(
            "mgf requires theta <= 0 in the left-tail regime, got {theta}"
        )));
    }
    match *d.spec() {
        DistributionSpec::Exponential { k } => Ok(match order {
            0 => k / (k - theta),
            _ => k / ((k - theta) * (k - theta)),
        }),
        DistributionSpec::Gamma { k, beta } => Ok(match order {
            0 => (1.0 - beta * theta).powf(-k),
            _ => k * beta * (1.0 - beta * theta).powf(-k - 1.0),
        }),
        _ => {
            if theta == 0.0 && order == 0 {
                return Ok(1.0);
            }
            let moment = |x: f64| if order == 0 { 1.0 } else { x };
            let r = if theta < RESCALE_THETA {
                // Rescale u = -θx so the sharp peak near zero sits at unit
                // scale for the quadrature.
                let s = -theta;
                integrate_semi_infinite(
                    |u| {
                        let x = u / s;
                        moment(x) * (d.log_pdf_raw(x) - u).exp() / s
                    },
                    MGF_TOL,
                )?
            } else {
                integrate_semi_infinite(
                    |x| moment(x) * (d.log_pdf_raw(x) + theta * x).exp(),
                    MGF_TOL,
                )?
            };
            Ok(r.value)
        }
    }
}

/// Mean of the tilted density, `M′(θ)/M(θ)`.
fn tilted_mean(d: &Distribution, theta: f64) -> Result<f64, EstimatorError> {
    Ok(mgf_derivative(d, theta)? / mgf(d, theta)?)
}

/// Solves `M′(θ)/M(θ) = γ/N` for the tilt `θ`.
///
/// Requires `γ/N` strictly below the untilted mean `E[X]` (otherwise the
/// solution would not be a left-tail tilt). The bracket is found by doubling
/// `θ` downward from −1 until the tilted mean falls below `γ/N`.
pub fn solve_tilt(d: &Distribution, gamma: f64, n: u32) -> Result<TiltSolution, EstimatorError> {
    if !(gamma > 0.0) || n == 0 {
        return Err(EstimatorError::Tilt(format!(
            "solve_tilt requires gamma > 0 and n >= 1, got gamma = {gamma}, n = {n}"
        )));
    }
    let target = gamma / n as f64;
    if !(target < d.mean()) {
        return Err(EstimatorError::Tilt(format!(
            "gamma/N = {target} is not below E[X] = {}; the tilt would be nonnegative, \
             outside the left-tail regime",
            d.mean()
        )));
    }
    // Closed-form special case: tilting Exponential(k) gives θ* = k − N/γ.
    if let DistributionSpec::Exponential { k } = *d.spec() {
        let theta = k - 1.0 / target;
        return Ok(TiltSolution {
            theta,
            normalizer: k / (k - theta),
            residual: 1.0 / (k - theta) - target,
            mean_under_tilt: 1.0 / (k - theta),
        });
    }

    let mut hi = 0.0f64;
    let mut lo = -1.0f64;
    loop {
        let mean = tilted_mean(d, lo)?;
        if mean <= target {
            break;
        }
        hi = lo;
        lo *= 2.0;
        if lo < THETA_CAP {
            return Err(EstimatorError::Tilt(format!(
                "tilt bracket expansion passed {THETA_CAP:e}; the tilt equation is \
                 numerically degenerate for gamma/N = {target:e}"
            )));
        }
    }
    let root = find_root_bracketed(
        |theta| tilted_mean(d, theta).unwrap_or(f64::NAN) - target,
        lo,
        hi,
        1e-10 * target,
    )?;
    let theta = root.root;
    let mean_under_tilt = tilted_mean(d, theta)?;
    Ok(TiltSolution {
        theta,
        normalizer: mgf(d, theta)?,
        residual: mean_under_tilt - target,
        mean_under_tilt,
    })
}

/// Exact sampler for the tilted density `f*(x) = f(x)e^{θx}/M(θ)` by
/// acceptance-rejection from a Gamma proposal.
///
/// The proposal reuses the Gamma-IS construction: shape `p+1` from the
/// summand's zero-asymptote (the optimized shape `k*` for the Log-normal),
/// scale chosen so the proposal mean equals the tilted mean. In the
/// rare-event regime the proposal converges to the tilted target, so the
/// acceptance rate approaches a constant instead of degrading.
#[derive(Debug, Clone)]
pub struct TiltedSampler {
    dist: Distribution,
    theta: f64,
    log_normalizer: f64,
    shape: f64,
    scale: f64,
    proposal: RandGamma<f64>,
    log_proposal_norm: f64,
    log_envelope: f64,
    reestimated: bool,
}

impl TiltedSampler {
    /// Precomputes the envelope constant: the supremum of the density ratio
    /// over a log-spaced grid spanning the proposal's `[1e-12, 1 − 1e-12]`
    /// quantile range, inflated by a 5% safety factor.
    pub fn new(d: &Distribution, tilt: &TiltSolution) -> Result<Self, EstimatorError> {
        let shape = match d.poly_asymptote() {
            Some(a) => a.p + 1.0,
            None => match d.spec() {
                DistributionSpec::LogNormal => {
                    crate::lognormal_is::optimal_shape_for_ratio(1.0 / tilt.mean_under_tilt)
                }
                _ => {
                    return Err(EstimatorError::Tilt(
                        "tilted sampling needs a polynomial zero-asymptote or the \
                         Log-normal optimized shape"
                            .to_string(),
                    ))
                }
            },
        };
        let scale = tilt.mean_under_tilt / shape;
        let proposal =
            RandGamma::new(shape, scale).map_err(|e| EstimatorError::Tilt(e.to_string()))?;
        let log_proposal_norm = log_gamma(shape)? + shape * scale.ln();
        let mut sampler = TiltedSampler {
            dist: d.clone(),
            theta: tilt.theta,
            log_normalizer: tilt.normalizer.ln(),
            shape,
            scale,
            proposal,
            log_proposal_norm,
            log_envelope: 0.0,
            reestimated: false,
        };
        sampler.log_envelope = sampler.estimate_log_envelope()? + ENVELOPE_SAFETY.ln();
        Ok(sampler)
    }

    /// `ln[f*(x)/g(x)]` where `g` is the Gamma proposal density.
    fn log_ratio(&self, x: f64) -> f64 {
        let log_target = self.dist.log_pdf_raw(x) + self.theta * x - self.log_normalizer;
        let log_proposal =
            (self.shape - 1.0) * x.ln() - x / self.scale - self.log_proposal_norm;
        log_target - log_proposal
    }

    fn estimate_log_envelope(&self) -> Result<f64, EstimatorError> {
        let proposal_dist = make_distribution(DistributionSpec::Gamma {
            k: self.shape,
            beta: self.scale,
        })?;
        let lo = proposal_dist.quantile(ENVELOPE_QUANTILE)?;
        let hi = proposal_dist.quantile(1.0 - ENVELOPE_QUANTILE)?;
        let (log_lo, log_hi) = (lo.ln(), hi.ln());
        let mut sup = f64::NEG_INFINITY;
        for i in 0..ENVELOPE_GRID {
            let t = i as f64 / (ENVELOPE_GRID - 1) as f64;
            let x = (log_lo + t * (log_hi - log_lo)).exp();
            sup = sup.max(self.log_ratio(x));
        }
        if !sup.is_finite() {
            return Err(EstimatorError::Tilt(format!(
                "degenerate envelope for tilt {}: sup log-ratio = {sup}",
                self.theta
            )));
        }
        Ok(sup)
    }

    /// Envelope constant `C` with `f*(x) ≤ C·g(x)` on the working range.
    pub fn envelope_constant(&self) -> f64 {
        self.log_envelope.exp()
    }

    /// One exact draw from `f*`. Returns the draw and the number of proposals
    /// consumed. An observed ratio above the envelope triggers one automatic
    /// envelope re-estimation; a second violation is a hard failure.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(f64, u64), EstimatorError> {
        let mut proposals = 0u64;
        loop {
            proposals += 1;
            let x = self.proposal.sample(rng);
            let log_ratio = self.log_ratio(x);
            if log_ratio > self.log_envelope {
                if self.reestimated {
                    return Err(EstimatorError::EnvelopeViolation {
                        log_ratio,
                        log_envelope: self.log_envelope,
                    });
                }
                self.reestimated = true;
                self.log_envelope = log_ratio + ENVELOPE_SAFETY.ln();
            }
            let u: f64 = rng.random();
            if u.ln() <= log_ratio - self.log_envelope {
                return Ok((x, proposals));
            }
        }
    }
}

/// One draw from the tilted density with its acceptance-rejection report.
///
/// Batch consumers should build one [`TiltedSampler`] and reuse it; this
/// convenience form re-estimates the envelope on every call.
pub fn sample_tilted<R: Rng + ?Sized>(
    d: &Distribution,
    tilt: &TiltSolution,
    rng: &mut R,
) -> Result<(f64, ARReport), EstimatorError> {
    let mut sampler = TiltedSampler::new(d, tilt)?;
    let envelope_constant = sampler.envelope_constant();
    let (x, proposals) = sampler.draw(rng)?;
    Ok((x, ARReport { proposals, accepts: 1, envelope_constant }))
}

/// Exponential-twisting IS estimator of `α(γ, N)`:
/// `(1/M) Σ 1{Σxᵢ ≤ γ}·M(θ*)^N·exp(−θ*·Σxᵢ)` with `xᵢ` drawn from the
/// tilted density. Weights are assembled in log domain and exponentiated per
/// sample.
pub fn estimate_exp_twist(
    d: &Distribution,
    gamma: f64,
    n: u32,
    m: u64,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    let tilt = solve_tilt(d, gamma, n)?;
    let sampler = TiltedSampler::new(d, &tilt)?;
    let log_norm_total = n as f64 * tilt.normalizer.ln();
    let theta = tilt.theta;

    let (moments, wall) = run_sharded(
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
    Ok(EstimatorResult::from_moments(&moments?, wall, seed, None))
}

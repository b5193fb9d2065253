//! The summand-distribution zoo: density, CDF, exact sampling, and the
//! polynomial behavior `f(x) ~ b·x^p` of each family at zero.
//!
//! `Distribution` objects are immutable after construction and safe for
//! shared concurrent reads; random streams are owned by exactly one caller
//! at a time.

mod conditional;
mod interp;

pub use conditional::{conditional_scaled_sampler, ConditionalScaledSampler};
pub use interp::CdfTable;

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution as RandDistribution, Gamma as RandGamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::numerics::{
    self, integrate_finite, integrate_semi_infinite, log_bessel_i, log_bessel_k,
    log_std_normal_cdf, reg_lower_incomplete_gamma, std_normal_cdf, std_normal_cdf_inv,
    NumericsError,
};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Errors produced by distribution construction and evaluation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum DistributionError {
    /// One or more parameter constraints are violated; every violation is
    /// listed.
    #[error("invalid distribution parameters: {}", violations.join("; "))]
    Validation { violations: Vec<String> },
    #[error("domain error: {0}")]
    Domain(String),
    /// `F_X(γ)` underflowed to zero, so conditioning on `{X ≤ γ}` cannot be
    /// represented. The importance-sampling estimators handle this regime.
    #[error(
        "F_X({gamma}) underflows to zero; the conditional truncation sampler cannot \
         operate this deep in the tail — use the importance-sampling estimators instead"
    )]
    CdfUnderflow { gamma: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A named summand family with its parameters.
///
/// Serializes with the family name and named parameters, e.g.
/// `{"family": "weibull", "k": 1.5, "lambda": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DistributionSpec {
    /// `k e^{-kx}`, rate `k > 0`.
    Exponential { k: f64 },
    /// `x^{k-1} e^{-x/β} / (β^k Γ(k))`, shape `k > 0`, scale `β > 0`.
    Gamma { k: f64, beta: f64 },
    /// `(k/λ)(x/λ)^{k-1} e^{-(x/λ)^k}`, shape `k > 0`, scale `λ > 0`.
    Weibull { k: f64, lambda: f64 },
    /// `2 m^m x^{2m-1} e^{-m x²/Ω} / (Γ(m) Ω^m)`, `m > 0`, `Ω > 0`.
    NakagamiM { m: f64, omega: f64 },
    /// `(p/a^d) x^{d-1} e^{-(x/a)^p} / Γ(d/p)`, `a, d, p > 0`.
    GeneralizedGamma { a: f64, d: f64, p: f64 },
    /// `(x/σ²) e^{-(x²+ν²)/(2σ²)} I₀(xν/σ²)`, `σ > 0`, `ν ≥ 0`
    /// (`ν = 0` reduces to Rayleigh).
    Rice { sigma: f64, nu: f64 },
    /// Product of two independent Gamma variates with mean `Ω`;
    /// requires `m > k > 0` and `m - k` not an integer.
    GammaGamma { k: f64, m: f64, omega: f64 },
    /// Noncentral-χ² envelope family with `κ, μ > 0` and mean square `Ω > 0`.
    KappaMu { kappa: f64, mu: f64, omega: f64 },
    /// Standard Log-normal: `exp(Z)` with `Z ~ N(0, 1)`.
    #[serde(rename = "lognormal")]
    LogNormal,
}

impl DistributionSpec {
    /// Canonical family name, as used in configs and CSV output.
    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::Gamma { .. } => "gamma",
            Self::Weibull { .. } => "weibull",
            Self::NakagamiM { .. } => "nakagami-m",
            Self::GeneralizedGamma { .. } => "generalized-gamma",
            Self::Rice { .. } => "rice",
            Self::GammaGamma { .. } => "gamma-gamma",
            Self::KappaMu { .. } => "kappa-mu",
            Self::LogNormal => "lognormal",
        }
    }

    /// Builds a spec from a family name and `key=value` parameters, as
    /// supplied on a command line. Family names are matched case-insensitively
    /// and with or without hyphens.
    pub fn from_name_params(
        name: &str,
        params: &BTreeMap<String, f64>,
    ) -> Result<Self, DistributionError> {
        let canon = name.to_ascii_lowercase().replace(['-', '_'], "");
        let mut violations = Vec::new();
        let mut seen: Vec<&str> = Vec::new();
        let mut get = |key: &'static str| -> f64 {
            seen.push(key);
            match params.get(key) {
                Some(&v) => v,
                None => {
                    violations.push(format!("missing parameter `{key}`"));
                    f64::NAN
                }
            }
        };
        let spec = match canon.as_str() {
            "exponential" | "exp" => Self::Exponential { k: get("k") },
            "gamma" => Self::Gamma { k: get("k"), beta: get("beta") },
            "weibull" => Self::Weibull { k: get("k"), lambda: get("lambda") },
            "nakagamim" | "nakagami" => Self::NakagamiM { m: get("m"), omega: get("omega") },
            "generalizedgamma" | "gengamma" => {
                Self::GeneralizedGamma { a: get("a"), d: get("d"), p: get("p") }
            }
            "rice" => Self::Rice { sigma: get("sigma"), nu: get("nu") },
            "gammagamma" => {
                Self::GammaGamma { k: get("k"), m: get("m"), omega: get("omega") }
            }
            "kappamu" => {
                Self::KappaMu { kappa: get("kappa"), mu: get("mu"), omega: get("omega") }
            }
            "lognormal" => Self::LogNormal,
            other => {
                return Err(DistributionError::Validation {
                    violations: vec![format!("unknown distribution family `{other}`")],
                })
            }
        };
        for key in params.keys() {
            if !seen.contains(&key.as_str()) {
                violations.push(format!(
                    "unknown parameter `{key}` for family `{}`",
                    spec.family_name()
                ));
            }
        }
        if !violations.is_empty() {
            return Err(DistributionError::Validation { violations });
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Named parameters in declaration order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::Exponential { k } => vec![("k", k)],
            Self::Gamma { k, beta } => vec![("k", k), ("beta", beta)],
            Self::Weibull { k, lambda } => vec![("k", k), ("lambda", lambda)],
            Self::NakagamiM { m, omega } => vec![("m", m), ("omega", omega)],
            Self::GeneralizedGamma { a, d, p } => vec![("a", a), ("d", d), ("p", p)],
            Self::Rice { sigma, nu } => vec![("sigma", sigma), ("nu", nu)],
            Self::GammaGamma { k, m, omega } => vec![("k", k), ("m", m), ("omega", omega)],
            Self::KappaMu { kappa, mu, omega } => {
                vec![("kappa", kappa), ("mu", mu), ("omega", omega)]
            }
            Self::LogNormal => vec![],
        }
    }

    /// Checks every parameter constraint, reporting all violations at once.
    pub fn validate(&self) -> Result<(), DistributionError> {
        let mut violations = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0) || !v.is_finite() {
                violations.push(format!("`{name}` must be a positive finite real, got {v}"));
            }
        };
        match *self {
            Self::Exponential { k } => positive("k", k),
            Self::Gamma { k, beta } => {
                positive("k", k);
                positive("beta", beta);
            }
            Self::Weibull { k, lambda } => {
                positive("k", k);
                positive("lambda", lambda);
            }
            Self::NakagamiM { m, omega } => {
                positive("m", m);
                positive("omega", omega);
            }
            Self::GeneralizedGamma { a, d, p } => {
                positive("a", a);
                positive("d", d);
                positive("p", p);
            }
            Self::Rice { sigma, nu } => {
                positive("sigma", sigma);
                if !(nu >= 0.0) || !nu.is_finite() {
                    violations.push(format!("`nu` must be a nonnegative finite real, got {nu}"));
                }
            }
            Self::GammaGamma { k, m, omega } => {
                positive("k", k);
                positive("m", m);
                positive("omega", omega);
                if k.is_finite() && m.is_finite() {
                    if !(m > k) {
                        violations.push(format!("requires m > k, got m = {m}, k = {k}"));
                    } else if (m - k) == (m - k).trunc() {
                        violations.push(format!(
                            "requires m - k not an integer, got m - k = {}",
                            m - k
                        ));
                    }
                }
            }
            Self::KappaMu { kappa, mu, omega } => {
                positive("kappa", kappa);
                positive("mu", mu);
                positive("omega", omega);
            }
            Self::LogNormal => {}
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(DistributionError::Validation { violations })
        }
    }
}

/// Leading polynomial behavior of a density at zero: `f(x) ~ b·x^p` as
/// `x → 0⁺`, with `p > -1` and `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyAsymptote {
    /// Polynomial exponent at zero.
    pub p: f64,
    /// Leading constant, read off the density formula exactly.
    pub b: f64,
}

/// Pre-built sampler state, derived from the spec at construction time.
#[derive(Debug, Clone)]
enum Sampler {
    InverseCdf,
    Gamma(RandGamma<f64>),
    /// `sqrt` of a Gamma draw (Nakagami-m).
    GammaSqrt(RandGamma<f64>),
    /// `a · G^{1/p}` with `G ~ Gamma(d/p, 1)` (generalized Gamma).
    GammaPower { g: RandGamma<f64>, a: f64, inv_p: f64 },
    Rice { sigma: f64, nu: f64 },
    /// `scale · G₁ · G₂` (Gamma-Gamma).
    GammaProduct { g1: RandGamma<f64>, g2: RandGamma<f64>, scale: f64 },
    /// `sqrt(scale · Gamma(μ + J, 2))` with `J ~ Poisson(μκ)` (κ-μ).
    NoncentralChi { pois: Poisson<f64>, mu: f64, scale: f64 },
    LogNormal,
}

/// An immutable summand distribution: density, CDF, exact sampler, mean, and
/// zero-asymptote metadata.
#[derive(Debug, Clone)]
pub struct Distribution {
    spec: DistributionSpec,
    asymptote: Option<PolyAsymptote>,
    mean: f64,
    sampler: Sampler,
}

/// Validates `spec` and builds the immutable [`Distribution`] object.
pub fn make_distribution(spec: DistributionSpec) -> Result<Distribution, DistributionError> {
    spec.validate()?;
    let asymptote = compute_asymptote(&spec);
    let sampler = build_sampler(&spec);
    let mean = compute_mean(&spec)?;
    Ok(Distribution { spec, asymptote, mean, sampler })
}

impl Distribution {
    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    /// `E[X]` under the summand density (closed form where available,
    /// quadrature of `x·f(x)` otherwise).
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// The `(p, b)` asymptote of the density at zero; `None` exactly for the
    /// Log-normal, whose density vanishes faster than any polynomial.
    pub fn poly_asymptote(&self) -> Option<&PolyAsymptote> {
        self.asymptote.as_ref()
    }

    /// Density at `x ≥ 0`. Families with `p < 0` diverge at the origin, where
    /// this returns `+∞`.
    pub fn pdf(&self, x: f64) -> Result<f64, DistributionError> {
        self.check_nonnegative(x)?;
        Ok(self.log_pdf_raw(x).exp())
    }

    /// `ln f(x)`, computed without intermediate under/overflow for
    /// `x ∈ [1e-300, 1e300]`.
    pub fn log_pdf(&self, x: f64) -> Result<f64, DistributionError> {
        self.check_nonnegative(x)?;
        Ok(self.log_pdf_raw(x))
    }

    /// CDF at `x ≥ 0`: closed form via the regularized incomplete gamma or
    /// `Φ` where available, quadrature of the density otherwise.
    pub fn cdf(&self, x: f64) -> Result<f64, DistributionError> {
        self.check_nonnegative(x)?;
        Ok(self.cdf_raw(x)?)
    }

    /// `ln F(x)`, relatively accurate deep in the left tail for the
    /// closed-form families.
    pub fn log_cdf(&self, x: f64) -> Result<f64, DistributionError> {
        self.check_nonnegative(x)?;
        if let DistributionSpec::LogNormal = self.spec {
            return Ok(if x == 0.0 {
                f64::NEG_INFINITY
            } else {
                log_std_normal_cdf(x.ln())
            });
        }
        let f = self.cdf_raw(x)?;
        Ok(f.ln())
    }

    /// One exact draw from the summand density.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.sampler {
            Sampler::InverseCdf => {
                let u: f64 = rng.random();
                match self.spec {
                    DistributionSpec::Exponential { k } => -(-u).ln_1p() / k,
                    DistributionSpec::Weibull { k, lambda } => {
                        lambda * (-(-u).ln_1p()).powf(1.0 / k)
                    }
                    _ => unreachable!("inverse-CDF sampler only built for Exponential/Weibull"),
                }
            }
            Sampler::Gamma(g) => g.sample(rng),
            Sampler::GammaSqrt(g) => g.sample(rng).sqrt(),
            Sampler::GammaPower { g, a, inv_p } => a * g.sample(rng).powf(*inv_p),
            Sampler::Rice { sigma, nu } => {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                ((sigma * z1 + nu).powi(2) + (sigma * z2).powi(2)).sqrt()
            }
            Sampler::GammaProduct { g1, g2, scale } => scale * g1.sample(rng) * g2.sample(rng),
            Sampler::NoncentralChi { pois, mu, scale } => {
                let j = pois.sample(rng);
                let g = RandGamma::new(mu + j, 2.0).expect("valid shape");
                (scale * g.sample(rng)).sqrt()
            }
            Sampler::LogNormal => {
                let z: f64 = rng.sample(StandardNormal);
                z.exp()
            }
        }
    }

    /// Quantile `F⁻¹(q)` for `q ∈ [0, 1)`: closed-form inverse where the CDF
    /// has one, bracketed root finding on the CDF otherwise.
    pub fn quantile(&self, q: f64) -> Result<f64, DistributionError> {
        if !(0.0..1.0).contains(&q) {
            return Err(DistributionError::Domain(format!(
                "quantile requires q in [0, 1), got {q}"
            )));
        }
        if q == 0.0 {
            return Ok(0.0);
        }
        match self.spec {
            DistributionSpec::Exponential { k } => Ok(-(-q).ln_1p() / k),
            DistributionSpec::Weibull { k, lambda } => Ok(lambda * (-(-q).ln_1p()).powf(1.0 / k)),
            DistributionSpec::LogNormal => Ok(std_normal_cdf_inv(q)?.exp()),
            _ => {
                // Bracket [0, hi] by doubling from the mean scale.
                let mut hi = self.mean.max(1e-8);
                for _ in 0..200 {
                    if self.cdf_raw(hi)? >= q {
                        break;
                    }
                    hi *= 2.0;
                }
                let r = numerics::find_root_bracketed(
                    |x| self.cdf_raw(x.max(0.0)).unwrap_or(f64::NAN) - q,
                    0.0,
                    hi,
                    1e-13,
                )?;
                Ok(r.root.max(0.0))
            }
        }
    }

    fn check_nonnegative(&self, x: f64) -> Result<(), DistributionError> {
        if x < 0.0 || x.is_nan() {
            Err(DistributionError::Domain(format!(
                "{} is supported on x >= 0, got x = {x}",
                self.spec.family_name()
            )))
        } else {
            Ok(())
        }
    }

    /// Whether the CDF requires quadrature of the density.
    pub(crate) fn cdf_needs_quadrature(&self) -> bool {
        matches!(
            self.spec,
            DistributionSpec::Rice { .. }
                | DistributionSpec::GammaGamma { .. }
                | DistributionSpec::KappaMu { .. }
        )
    }

    pub(crate) fn log_pdf_raw(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        match self.spec {
            DistributionSpec::Exponential { k } => k.ln() - k * x,
            DistributionSpec::Gamma { k, beta } => {
                if x == 0.0 {
                    return zero_limit(k - 1.0, self.asymptote.as_ref());
                }
                (k - 1.0) * x.ln() - x / beta - k * beta.ln() - numerics_lgamma(k)
            }
            DistributionSpec::Weibull { k, lambda } => {
                if x == 0.0 {
                    return zero_limit(k - 1.0, self.asymptote.as_ref());
                }
                let z = x / lambda;
                k.ln() - lambda.ln() + (k - 1.0) * z.ln() - z.powf(k)
            }
            DistributionSpec::NakagamiM { m, omega } => {
                if x == 0.0 {
                    return zero_limit(2.0 * m - 1.0, self.asymptote.as_ref());
                }
                std::f64::consts::LN_2 + m * (m / omega).ln() - numerics_lgamma(m)
                    + (2.0 * m - 1.0) * x.ln()
                    - m * x * x / omega
            }
            DistributionSpec::GeneralizedGamma { a, d, p } => {
                if x == 0.0 {
                    return zero_limit(d - 1.0, self.asymptote.as_ref());
                }
                p.ln() - d * a.ln() - numerics_lgamma(d / p) + (d - 1.0) * x.ln()
                    - (x / a).powf(p)
            }
            DistributionSpec::Rice { sigma, nu } => {
                if x == 0.0 {
                    return zero_limit(1.0, self.asymptote.as_ref());
                }
                let s2 = sigma * sigma;
                let log_i0 = log_bessel_i(0.0, x * nu / s2).expect("order 0, x >= 0");
                x.ln() - 2.0 * sigma.ln() - (x * x + nu * nu) / (2.0 * s2) + log_i0
            }
            DistributionSpec::GammaGamma { k, m, omega } => {
                if x == 0.0 {
                    return zero_limit(k - 1.0, self.asymptote.as_ref());
                }
                let half_sum = 0.5 * (k + m);
                let arg = 2.0 * (k * m * x / omega).sqrt();
                let log_k = log_bessel_k(k - m, arg).expect("x > 0");
                std::f64::consts::LN_2 + half_sum * (k * m).ln() - numerics_lgamma(k)
                    - numerics_lgamma(m)
                    - omega.ln()
                    + (half_sum - 1.0) * (x / omega).ln()
                    + log_k
            }
            DistributionSpec::KappaMu { kappa, mu, omega } => {
                if x == 0.0 {
                    return zero_limit(2.0 * mu - 1.0, self.asymptote.as_ref());
                }
                let c = 2.0 * mu * (kappa * (kappa + 1.0) / omega).sqrt();
                let log_i = log_bessel_i(mu - 1.0, c * x).expect("order > -1, x >= 0");
                std::f64::consts::LN_2 + mu.ln() + 0.5 * (mu + 1.0) * (1.0 + kappa).ln()
                    - 0.5 * (mu + 1.0) * omega.ln()
                    - 0.5 * (mu - 1.0) * kappa.ln()
                    - mu * kappa
                    + mu * x.ln()
                    - (1.0 + kappa) * mu * x * x / omega
                    + log_i
            }
            DistributionSpec::LogNormal => {
                if x == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let lx = x.ln();
                -lx - 0.5 * lx * lx - LN_SQRT_2PI
            }
        }
    }

    pub(crate) fn cdf_raw(&self, x: f64) -> Result<f64, NumericsError> {
        if x == 0.0 {
            return Ok(0.0);
        }
        match self.spec {
            DistributionSpec::Exponential { k } => Ok(-(-k * x).exp_m1()),
            DistributionSpec::Gamma { k, beta } => reg_lower_incomplete_gamma(k, x / beta),
            DistributionSpec::Weibull { k, lambda } => Ok(-(-((x / lambda).powf(k))).exp_m1()),
            DistributionSpec::NakagamiM { m, omega } => {
                reg_lower_incomplete_gamma(m, m * x * x / omega)
            }
            DistributionSpec::GeneralizedGamma { a, d, p } => {
                reg_lower_incomplete_gamma(d / p, (x / a).powf(p))
            }
            DistributionSpec::LogNormal => Ok(std_normal_cdf(x.ln())),
            _ => {
                if x.is_infinite() {
                    return Ok(1.0);
                }
                let r = integrate_finite(|t| self.log_pdf_raw(t).exp(), 0.0, x, 1e-11)?;
                Ok(r.value.clamp(0.0, 1.0))
            }
        }
    }
}

fn numerics_lgamma(x: f64) -> f64 {
    crate::numerics::log_gamma(x).expect("positive by validation")
}

/// Limit of `ln f(x)` as `x → 0⁺` given the polynomial exponent.
fn zero_limit(p: f64, asym: Option<&PolyAsymptote>) -> f64 {
    if p > 0.0 {
        f64::NEG_INFINITY
    } else if p == 0.0 {
        asym.map(|a| a.b.ln()).unwrap_or(f64::NEG_INFINITY)
    } else {
        f64::INFINITY
    }
}

fn compute_asymptote(spec: &DistributionSpec) -> Option<PolyAsymptote> {
    match *spec {
        DistributionSpec::Exponential { k } => Some(PolyAsymptote { p: 0.0, b: k }),
        DistributionSpec::Gamma { k, beta } => Some(PolyAsymptote {
            p: k - 1.0,
            b: (-k * beta.ln() - numerics_lgamma(k)).exp(),
        }),
        DistributionSpec::Weibull { k, lambda } => Some(PolyAsymptote {
            p: k - 1.0,
            b: (k.ln() - k * lambda.ln()).exp(),
        }),
        DistributionSpec::NakagamiM { m, omega } => Some(PolyAsymptote {
            p: 2.0 * m - 1.0,
            b: (std::f64::consts::LN_2 + m * (m / omega).ln() - numerics_lgamma(m)).exp(),
        }),
        DistributionSpec::GeneralizedGamma { a, d, p } => Some(PolyAsymptote {
            p: d - 1.0,
            b: (p.ln() - d * a.ln() - numerics_lgamma(d / p)).exp(),
        }),
        // I₀(z) ~ 1 at z = 0, so the constant comes from the series leading
        // term of the Bessel factor.
        DistributionSpec::Rice { sigma, nu } => Some(PolyAsymptote {
            p: 1.0,
            b: (-nu * nu / (2.0 * sigma * sigma)).exp() / (sigma * sigma),
        }),
        // K_{k-m}(z) ~ Γ(m-k)/2 · (z/2)^{k-m} as z → 0 (m > k, non-integer gap).
        DistributionSpec::GammaGamma { k, m, omega } => Some(PolyAsymptote {
            p: k - 1.0,
            b: (numerics_lgamma(m - k) + k * (k * m / omega).ln()
                - numerics_lgamma(k)
                - numerics_lgamma(m))
            .exp(),
        }),
        // I_{μ-1}(z) ~ (z/2)^{μ-1}/Γ(μ) as z → 0.
        DistributionSpec::KappaMu { kappa, mu, omega } => {
            let log_c_half = mu.ln() + 0.5 * (kappa * (kappa + 1.0) / omega).ln();
            let log_b = std::f64::consts::LN_2 + mu.ln()
                + 0.5 * (mu + 1.0) * (1.0 + kappa).ln()
                - 0.5 * (mu + 1.0) * omega.ln()
                - 0.5 * (mu - 1.0) * kappa.ln()
                - mu * kappa
                + (mu - 1.0) * log_c_half
                - numerics_lgamma(mu);
            Some(PolyAsymptote { p: 2.0 * mu - 1.0, b: log_b.exp() })
        }
        DistributionSpec::LogNormal => None,
    }
}

fn build_sampler(spec: &DistributionSpec) -> Sampler {
    match *spec {
        DistributionSpec::Exponential { .. } | DistributionSpec::Weibull { .. } => {
            Sampler::InverseCdf
        }
        DistributionSpec::Gamma { k, beta } => {
            Sampler::Gamma(RandGamma::new(k, beta).expect("validated"))
        }
        DistributionSpec::NakagamiM { m, omega } => {
            Sampler::GammaSqrt(RandGamma::new(m, omega / m).expect("validated"))
        }
        DistributionSpec::GeneralizedGamma { a, d, p } => Sampler::GammaPower {
            g: RandGamma::new(d / p, 1.0).expect("validated"),
            a,
            inv_p: 1.0 / p,
        },
        DistributionSpec::Rice { sigma, nu } => Sampler::Rice { sigma, nu },
        DistributionSpec::GammaGamma { k, m, omega } => Sampler::GammaProduct {
            g1: RandGamma::new(k, 1.0).expect("validated"),
            g2: RandGamma::new(m, 1.0).expect("validated"),
            scale: omega / (k * m),
        },
        DistributionSpec::KappaMu { kappa, mu, omega } => Sampler::NoncentralChi {
            pois: Poisson::new(mu * kappa).expect("validated"),
            mu,
            scale: omega / (2.0 * mu * (1.0 + kappa)),
        },
        DistributionSpec::LogNormal => Sampler::LogNormal,
    }
}

fn compute_mean(spec: &DistributionSpec) -> Result<f64, DistributionError> {
    Ok(match *spec {
        DistributionSpec::Exponential { k } => 1.0 / k,
        DistributionSpec::Gamma { k, beta } => k * beta,
        DistributionSpec::Weibull { k, lambda } => {
            lambda * numerics_lgamma(1.0 + 1.0 / k).exp()
        }
        DistributionSpec::NakagamiM { m, omega } => {
            (numerics_lgamma(m + 0.5) - numerics_lgamma(m)).exp() * (omega / m).sqrt()
        }
        DistributionSpec::GeneralizedGamma { a, d, p } => {
            a * (numerics_lgamma((d + 1.0) / p) - numerics_lgamma(d / p)).exp()
        }
        DistributionSpec::GammaGamma { omega, .. } => omega,
        DistributionSpec::LogNormal => (0.5f64).exp(),
        // Rice and κ-μ: first moment by quadrature of x·f(x).
        ref s @ (DistributionSpec::Rice { .. } | DistributionSpec::KappaMu { .. }) => {
            let d = Distribution {
                spec: s.clone(),
                asymptote: compute_asymptote(s),
                mean: f64::NAN,
                sampler: build_sampler(s),
            };
            integrate_semi_infinite(|x| x * d.log_pdf_raw(x).exp(), 1e-12)?.value
        }
    })
}

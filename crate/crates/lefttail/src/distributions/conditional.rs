//! Sampling of `w = X/γ` conditional on `{X ≤ γ}` by inverse-CDF
//! composition: `w = F⁻¹(u·F(γ))/γ` with `u` uniform.

use rand::Rng;

use super::{CdfTable, Distribution, DistributionError, DistributionSpec};

/// Number of interpolation cells used by the cached inverse.
const TABLE_CELLS: usize = 512;

/// Reusable sampler for `w = X/γ | X ≤ γ`, caching the CDF inverse for the
/// support window `[0, γ]` so repeated draws stay cheap.
#[derive(Debug, Clone)]
pub struct ConditionalScaledSampler {
    gamma: f64,
    f_gamma: f64,
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    /// Families with a closed-form quantile.
    ClosedForm(Distribution),
    /// Everything else inverts a cached monotone spline of CDF values.
    Table(CdfTable),
}

impl ConditionalScaledSampler {
    pub fn new(d: &Distribution, gamma: f64) -> Result<Self, DistributionError> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(DistributionError::Domain(format!(
                "conditional sampler requires gamma > 0, got {gamma}"
            )));
        }
        let f_gamma = d.cdf(gamma)?;
        if f_gamma < 1e-300 {
            return Err(DistributionError::CdfUnderflow { gamma });
        }
        let inner = match d.spec() {
            DistributionSpec::Exponential { .. }
            | DistributionSpec::Weibull { .. }
            | DistributionSpec::LogNormal => Inner::ClosedForm(d.clone()),
            _ => Inner::Table(CdfTable::build(d, gamma, TABLE_CELLS)?),
        };
        Ok(Self { gamma, f_gamma, inner })
    }

    /// `F_X(γ)` for the window.
    pub fn f_gamma(&self) -> f64 {
        self.f_gamma
    }

    /// One draw of `w ∈ [0, 1]`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw_with_u(rng.random())
    }

    /// Deterministic inverse-CDF composition for a given uniform `u ∈ [0, 1]`.
    pub fn draw_with_u(&self, u: f64) -> f64 {
        let q = u * self.f_gamma;
        let x = match &self.inner {
            Inner::ClosedForm(d) => {
                if q >= 1.0 {
                    self.gamma
                } else {
                    d.quantile(q).expect("q in [0, 1) by construction")
                }
            }
            Inner::Table(t) => t.inv_cdf(q),
        };
        (x / self.gamma).clamp(0.0, 1.0)
    }
}

/// One draw of `w = X/γ | X ≤ γ`, using bracketed root finding on the CDF
/// when the family has no closed-form quantile.
///
/// Hot loops should build a [`ConditionalScaledSampler`] once instead; this
/// convenience form pays the inversion cost on every call.
pub fn conditional_scaled_sampler<R: Rng + ?Sized>(
    d: &Distribution,
    gamma: f64,
    rng: &mut R,
) -> Result<f64, DistributionError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(DistributionError::Domain(format!(
            "conditional_scaled_sampler requires gamma > 0, got {gamma}"
        )));
    }
    let f_gamma = d.cdf(gamma)?;
    if f_gamma < 1e-300 {
        return Err(DistributionError::CdfUnderflow { gamma });
    }
    let u: f64 = rng.random();
    let q = u * f_gamma;
    let x = if q >= 1.0 { gamma } else { d.quantile(q)? };
    Ok((x / gamma).clamp(0.0, 1.0))
}

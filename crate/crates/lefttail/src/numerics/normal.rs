//! Standard normal CDF, its inverse, and log-domain variants that stay
//! accurate far into the left tail.

use super::gamma::reg_upper_incomplete_gamma;
use super::{require, NumericsError};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7; // ln sqrt(2π)
const LN_HALF: f64 = -std::f64::consts::LN_2;

/// Below this point `Φ(x)` underflows in linear arithmetic and the log-domain
/// path switches to the Mills-ratio asymptotic series.
const MILLS_CUTOFF: f64 = -37.0;

/// Standard normal density `φ(x)`.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// `ln φ(x)`.
pub fn log_std_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal CDF `Φ(x)`.
///
/// Evaluated through the regularized incomplete gamma functions at `x²/2`,
/// which keeps the result relatively (not just absolutely) accurate in both
/// tails until it underflows near `x ≈ -37.6`.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.5;
    }
    let t = 0.5 * x * x;
    if x > 0.0 {
        if t > 750.0 {
            return 1.0;
        }
        // Φ(x) = 1 − Q(1/2, t)/2; use the complement to avoid cancellation.
        1.0 - 0.5 * reg_upper_incomplete_gamma(0.5, t).expect("valid by construction")
    } else {
        if t > 750.0 {
            return 0.0;
        }
        0.5 * reg_upper_incomplete_gamma(0.5, t).expect("valid by construction")
    }
}

/// `ln Φ(x)`, accurate for arbitrarily negative `x` (down past `x = -1e8`).
pub fn log_std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 0.0 {
        let t = 0.5 * x * x;
        if t > 750.0 {
            return 0.0;
        }
        let q = reg_upper_incomplete_gamma(0.5, t).expect("valid by construction");
        return (-0.5 * q).ln_1p();
    }
    if x > MILLS_CUTOFF {
        let t = 0.5 * x * x;
        let q = reg_upper_incomplete_gamma(0.5, t).expect("valid by construction");
        (0.5 * q).ln()
    } else {
        // Φ(x) = φ(x)/(-x) · Σ (-1)^k (2k-1)!!/x^{2k}; truncate at the first
        // non-decreasing term (classical asymptotic rule).
        log_std_normal_pdf(x) - (-x).ln() + mills_series(x).ln()
    }
}

fn mills_series(x: f64) -> f64 {
    let inv_x2 = 1.0 / (x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let next = term * (2.0 * k as f64 - 1.0) * inv_x2;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += if k % 2 == 1 { -term } else { term };
        if term < f64::EPSILON * sum {
            break;
        }
    }
    sum
}

/// Inverse standard normal CDF `Φ⁻¹(p)` for `p ∈ (0, 1)`.
pub fn std_normal_cdf_inv(p: f64) -> Result<f64, NumericsError> {
    require(p > 0.0 && p < 1.0, || {
        format!("std_normal_cdf_inv requires p in (0, 1), got {p}")
    })?;
    if p == 0.5 {
        return Ok(0.0);
    }
    if p < 0.5 {
        inv_log_std_normal_cdf(p.ln())
    } else {
        Ok(-inv_log_std_normal_cdf((1.0 - p).ln())?)
    }
}

/// Solves `ln Φ(x) = log_p` for `x`, given `log_p ≤ ln(1/2)`.
///
/// Handles arguments far below the linear-domain underflow threshold
/// (`log_p` can be on the order of `-1e15`). An asymptotic first guess is
/// polished by Newton iterations on `ln Φ`.
pub fn inv_log_std_normal_cdf(log_p: f64) -> Result<f64, NumericsError> {
    require(log_p.is_finite() && log_p <= LN_HALF, || {
        format!("inv_log_std_normal_cdf requires log_p <= ln(1/2), got {log_p}")
    })?;
    if log_p == LN_HALF {
        return Ok(0.0);
    }
    // Abramowitz–Stegun 26.2.23 rational guess in t = sqrt(-2 ln p),
    // |error| < 4.5e-4.
    let t = (-2.0 * log_p).sqrt();
    let mut x = -(t - (2.515517 + t * (0.802853 + t * 0.010328))
        / (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))));
    for _ in 0..8 {
        let g = log_std_normal_cdf(x) - log_p;
        // d/dx ln Φ = φ/Φ, evaluated in log domain.
        let dg = (log_std_normal_pdf(x) - log_std_normal_cdf(x)).exp();
        let step = g / dg;
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}

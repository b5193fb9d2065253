//! Scalar numerical kernels: special functions, bracketed root finding, and
//! double-exponential quadrature.
//!
//! Everything in this module is a pure function of its arguments and safe for
//! unrestricted concurrent use.

mod bessel;
mod gamma;
mod normal;
mod quad;
mod roots;

pub use bessel::{bessel_i, bessel_k, log_bessel_i, log_bessel_k};
pub use gamma::{log_gamma, reg_lower_incomplete_gamma, reg_upper_incomplete_gamma};
pub use normal::{
    inv_log_std_normal_cdf, log_std_normal_cdf, log_std_normal_pdf, std_normal_cdf,
    std_normal_cdf_inv, std_normal_pdf,
};
pub use quad::{integrate_finite, integrate_semi_infinite, QuadratureResult, DEFAULT_QUAD_TOL};
pub use roots::{find_root_bracketed, RootResult};

/// Error type shared by the numerical kernels.
#[derive(Debug, Clone, thiserror::Error)]
pub enum NumericsError {
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result is too large to represent in an `f64`.
    #[error("overflow: {0}")]
    Overflow(String),
    /// `find_root_bracketed` was given endpoints with the same sign.
    #[error("no sign change on bracket: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    /// An iteration failed to reach its tolerance. The best estimate and its
    /// error estimate are attached.
    #[error("failed to converge: best estimate {best:e} (error estimate {error_estimate:e})")]
    NonConvergence { best: f64, error_estimate: f64 },
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), NumericsError> {
    if cond {
        Ok(())
    } else {
        Err(NumericsError::Domain(msg()))
    }
}

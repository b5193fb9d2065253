//! Cached monotone-cubic CDF table for fast repeated inversion on a fixed
//! support window.

use super::{Distribution, DistributionError};
use crate::numerics::integrate_finite;

/// CDF values and density slopes of one distribution on `[0, hi]`,
/// interpolated by a C¹ cubic Hermite spline. The first cell uses the
/// density's `b·x^p` zero-asymptote instead, which keeps the inverse accurate
/// where the cubic basis cannot represent a fractional power.
#[derive(Debug, Clone)]
pub struct CdfTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
    /// Exponent `p + 1` of the CDF in the first cell.
    cell0_pow: f64,
}

impl CdfTable {
    /// Tabulates the CDF of `d` at `cells + 1` uniform nodes on `[0, hi]`.
    pub fn build(d: &Distribution, hi: f64, cells: usize) -> Result<Self, DistributionError> {
        assert!(cells >= 8, "CdfTable needs at least 8 cells");
        assert!(hi > 0.0 && hi.is_finite());
        let n = cells + 1;
        let xs: Vec<f64> = (0..n).map(|i| hi * i as f64 / cells as f64).collect();
        let mut cdf = Vec::with_capacity(n);
        if d.cdf_needs_quadrature() {
            // Accumulate per-cell masses so each call stays cheap and the
            // table is exactly nondecreasing.
            let mut acc = 0.0;
            cdf.push(0.0);
            for i in 1..n {
                let cell =
                    integrate_finite(|t| d.log_pdf_raw(t).exp(), xs[i - 1], xs[i], 1e-12)?;
                acc += cell.value.max(0.0);
                cdf.push(acc);
            }
        } else {
            for &x in &xs {
                cdf.push(d.cdf_raw(x)?);
            }
        }
        let pdf: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let v = d.log_pdf_raw(x).exp();
                if v.is_finite() {
                    v
                } else {
                    0.0 // singular node; the asymptote cell model covers it
                }
            })
            .collect();
        let cell0_pow = d.poly_asymptote().map(|a| a.p + 1.0).unwrap_or(1.0);
        Ok(Self { xs, cdf, pdf, cell0_pow })
    }

    pub fn hi(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// CDF mass of the whole window.
    pub fn total(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    /// Interpolated CDF at `x ∈ [0, hi]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.hi());
        let i = self.cell_of_x(x);
        if i == 0 {
            let x1 = self.xs[1];
            return self.cdf[1] * (x / x1).powf(self.cell0_pow);
        }
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        hermite(t, self.cdf[i], self.cdf[i + 1], h * self.pdf[i], h * self.pdf[i + 1])
            .clamp(self.cdf[i], self.cdf[i + 1])
    }

    /// Inverse CDF for `q ∈ [0, total]`, by cell bisection plus safeguarded
    /// Newton within the cell.
    pub fn inv_cdf(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, self.total());
        // Binary search for the cell with cdf[i] <= q <= cdf[i+1].
        let mut lo = 0usize;
        let mut hi = self.xs.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] <= q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let i = lo;
        if i == 0 {
            let x1 = self.xs[1];
            if self.cdf[1] <= 0.0 {
                return 0.0;
            }
            return x1 * (q / self.cdf[1]).powf(1.0 / self.cell0_pow);
        }
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (f0, f1) = (self.cdf[i], self.cdf[i + 1]);
        if f1 <= f0 {
            return x0;
        }
        let h = x1 - x0;
        let (d0, d1) = (h * self.pdf[i], h * self.pdf[i + 1]);
        // Newton in t on the Hermite cubic, bisection fallback.
        let mut t_lo = 0.0f64;
        let mut t_hi = 1.0f64;
        let mut t = (q - f0) / (f1 - f0);
        for _ in 0..40 {
            let g = hermite(t, f0, f1, d0, d1) - q;
            if g > 0.0 {
                t_hi = t;
            } else {
                t_lo = t;
            }
            let dg = hermite_deriv(t, f0, f1, d0, d1);
            let mut t_next = if dg > 0.0 { t - g / dg } else { f64::NAN };
            if !(t_next > t_lo && t_next < t_hi) {
                t_next = 0.5 * (t_lo + t_hi);
            }
            if (t_next - t).abs() < 1e-14 {
                t = t_next;
                break;
            }
            t = t_next;
        }
        x0 + t.clamp(0.0, 1.0) * h
    }

    fn cell_of_x(&self, x: f64) -> usize {
        let cells = self.xs.len() - 1;
        let raw = (x / self.hi() * cells as f64).floor() as usize;
        raw.min(cells - 1)
    }
}

fn hermite(t: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * f0
        + (t3 - 2.0 * t2 + t) * d0
        + (-2.0 * t3 + 3.0 * t2) * f1
        + (t3 - t2) * d1
}

fn hermite_deriv(t: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    (6.0 * t2 - 6.0 * t) * f0
        + (3.0 * t2 - 4.0 * t + 1.0) * d0
        + (-6.0 * t2 + 6.0 * t) * f1
        + (3.0 * t2 - 2.0 * t) * d1
}

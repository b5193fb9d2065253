//! Bracketed scalar root finding.

use super::NumericsError;

const MAX_ITER: u32 = 200;

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    /// `f(root)` at the returned point.
    pub residual: f64,
    pub iterations: u32,
}

/// Finds a root of `f` on `[lo, hi]` given `f(lo)·f(hi) ≤ 0`.
///
/// Brent's method: bisection combined with secant/inverse-quadratic
/// interpolation, so convergence is guaranteed from any valid bracket.
/// Succeeds once `|f(root)| ≤ tol` or the bracket width shrinks below `tol`.
pub fn find_root_bracketed(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<RootResult, NumericsError> {
    if !(tol > 0.0) || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(NumericsError::Domain(format!(
            "find_root_bracketed requires finite lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}"
        )));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(RootResult { root: a, residual: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(RootResult { root: b, residual: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange { lo, hi, f_lo: fa, f_hi: fb });
    }

    // Invariant: b is the best iterate, [b, c] brackets the root.
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xm = 0.5 * (c - b);
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        if xm.abs() <= tol1 || fb.abs() <= tol {
            return Ok(RootResult { root: b, residual: fb, iterations: iter });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt interpolation.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                // Secant.
                (2.0 * xm * s, 1.0 - s)
            } else {
                // Inverse quadratic.
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Err(NumericsError::NonConvergence { best: b, error_estimate: fb.abs() })
}

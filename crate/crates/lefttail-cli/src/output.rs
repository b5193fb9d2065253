//! CSV and JSON rendering of estimator results.

use lefttail::engine::{EstimatorResult, Method};

/// Sweep/compare CSV header. Byte-identical across runs and methods.
pub const CSV_HEADER: &str = "method,family,n,gamma,samples,seed,estimate,scv,\
ci95_half_width,wall_seconds,wnrv,biased,bias_bound,adjusted_wnrv";

/// 10 significant digits for CSV numerics.
pub fn fmt_csv(x: f64) -> String {
    format!("{x:.9e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_csv).unwrap_or_default()
}

/// One successful result row.
pub fn csv_row(
    method: Method,
    family: &str,
    n: u32,
    gamma: f64,
    result: &EstimatorResult,
) -> String {
    // The biased estimator's statistical budget is ε/2, so an equal-accuracy
    // comparison multiplies its cost by four.
    let adjusted = result.wnrv.map(|w| {
        if matches!(method, Method::LnBiased) {
            4.0 * w
        } else {
            w
        }
    });
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        method.name(),
        family,
        n,
        fmt_csv(gamma),
        result.samples,
        result.seed,
        fmt_csv(result.estimate),
        fmt_opt(result.scv),
        fmt_csv(result.ci95_half_width),
        fmt_csv(result.wall_seconds),
        fmt_opt(result.wnrv),
        result.biased,
        fmt_csv(result.bias_bound),
        fmt_opt(adjusted),
    )
}

/// A failed row: identity fields only, metric fields left empty.
pub fn csv_row_failed(
    method: Method,
    family: &str,
    n: u32,
    gamma: f64,
    samples: u64,
    seed: u64,
) -> String {
    format!(
        "{},{},{},{},{},{},,,,,,,,",
        method.name(),
        family,
        n,
        fmt_csv(gamma),
        samples,
        seed,
    )
}

/// Machine-readable error object for nonzero exits.
pub fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

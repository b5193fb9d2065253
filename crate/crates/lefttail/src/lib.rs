//! Estimation of left-tail probabilities `P(Σ X_i ≤ γ)` for sums of
//! nonnegative i.i.d. random variables.
//!
//! The crate provides:
//!
//! - a summand-distribution zoo ([`distributions`]) with densities, CDFs,
//!   exact samplers, and each family's polynomial behavior at zero;
//! - exponential-twisting machinery ([`twisting`]): MGF evaluation,
//!   tilt-parameter solving, acceptance-rejection sampling from the tilted
//!   density, and the twisted importance-sampling estimator;
//! - the Gamma importance-sampling proposal keyed to the summand's
//!   zero-asymptote ([`gamma_is`]);
//! - two Log-normal specializations ([`lognormal_is`]): a bias-controlled
//!   truncated estimator and an unbiased Gamma proposal with optimized shape;
//! - an estimator-agnostic Monte Carlo runner with baseline estimators, an
//!   efficiency-metric report (SCV, WNRV), and a deterministic convolution
//!   oracle ([`engine`]).
//!
//! All estimators are deterministic given a seed: work is split into
//! fixed-size shards with per-shard random streams, so results are
//! bit-identical regardless of how many worker threads execute the shards.

// `!(x > 0.0)` style comparisons are deliberate: they reject NaN along with
// the out-of-domain values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod engine;
pub mod gamma_is;
pub mod lognormal_is;
pub mod numerics;
pub mod twisting;

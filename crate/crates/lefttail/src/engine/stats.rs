//! Weighted-moment accumulation and the per-run estimator report.
//!
//! Sample weights in the rare-event regime span many tens of orders of
//! magnitude, so first and second moments accumulate with compensated
//! (Neumaier) summation per shard; shard totals merge by plain addition in
//! fixed shard order, which makes results independent of the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fixed shard size: work is always split into `ceil(M / SHARD_SIZE)` shards
/// regardless of how many threads execute them.
pub const SHARD_SIZE: u64 = 8192;

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Moment sums accumulated by one shard (and the merged totals).
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    weight: CompensatedSum,
    weight_sq: CompensatedSum,
    pub count: u64,
    /// Acceptance-rejection bookkeeping; stays zero for direct samplers.
    pub ar_proposals: u64,
    pub ar_accepts: u64,
}

impl Moments {
    pub fn add_weight(&mut self, w: f64) {
        self.weight.add(w);
        self.weight_sq.add(w * w);
        self.count += 1;
    }

    pub fn sum_weight(&self) -> f64 {
        self.weight.total()
    }

    pub fn sum_weight_sq(&self) -> f64 {
        self.weight_sq.total()
    }

    fn merge(&mut self, other: &Moments) {
        self.weight.add(other.weight.total());
        self.weight_sq.add(other.weight_sq.total());
        self.count += other.count;
        self.ar_proposals += other.ar_proposals;
        self.ar_accepts += other.ar_accepts;
    }
}

/// Independent random stream for one shard of one run.
pub fn shard_stream(seed: u64, shard: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Runs `m` weighted samples split into fixed-size shards, in parallel, and
/// merges moments in shard order. `setup` builds per-shard scratch state;
/// `sample` produces one weight per call and may bump the AR counters.
///
/// Deterministic: the result depends only on `(m, seed)` and the closures,
/// never on the number of worker threads.
pub fn run_sharded<S, E, Setup, Sample>(
    m: u64,
    seed: u64,
    setup: Setup,
    sample: Sample,
) -> (Result<Moments, E>, f64)
where
    S: Send,
    E: Send,
    Setup: Fn(u64) -> S + Sync,
    Sample: Fn(&mut S, &mut ChaCha12Rng, &mut Moments) -> Result<f64, E> + Sync,
{
    let shards = m.div_ceil(SHARD_SIZE);
    let started = std::time::Instant::now();
    let results: Vec<Result<Moments, E>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = shard_stream(seed, shard);
            let mut state = setup(shard);
            let mut acc = Moments::default();
            let count = SHARD_SIZE.min(m - shard * SHARD_SIZE);
            for _ in 0..count {
                let w = sample(&mut state, &mut rng, &mut acc)?;
                acc.add_weight(w);
            }
            Ok(acc)
        })
        .collect();
    let wall = started.elapsed().as_secs_f64();

    let mut total = Moments::default();
    for r in results {
        match r {
            Ok(shard_moments) => total.merge(&shard_moments),
            Err(e) => return (Err(e), wall),
        }
    }
    (Ok(total), wall)
}

/// Full report for one estimator run.
///
/// `scv` and `wnrv` are undefined (serialized as `null`) when every sample
/// missed the event and the estimate is exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub estimate: f64,
    pub variance_of_mean: f64,
    pub scv: Option<f64>,
    pub ci95_half_width: f64,
    pub samples: u64,
    pub wall_seconds: f64,
    pub wnrv: Option<f64>,
    pub seed: u64,
    pub biased: bool,
    /// Relative bias bound (0 for unbiased estimators).
    pub bias_bound: f64,
    /// `(1.96)²·SCV/ε²`: samples needed for relative error `ε` at 95%
    /// confidence. Present when the run had an accuracy target.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub recommended_m: Option<f64>,
}

impl EstimatorResult {
    /// Builds the report from merged moments. `epsilon_target` is the
    /// statistical relative-error target used for `recommended_m`.
    pub fn from_moments(
        moments: &Moments,
        wall_seconds: f64,
        seed: u64,
        epsilon_target: Option<f64>,
    ) -> Self {
        let m = moments.count as f64;
        let estimate = moments.sum_weight() / m;
        let sample_var = (moments.sum_weight_sq() / m - estimate * estimate).max(0.0);
        let variance_of_mean = sample_var / m;
        let scv = if estimate > 0.0 {
            Some(sample_var / (estimate * estimate))
        } else {
            None
        };
        let wnrv = scv.map(|s| s / m * wall_seconds);
        let recommended_m = match (scv, epsilon_target) {
            (Some(s), Some(eps)) => Some((1.96f64 * 1.96 * s / (eps * eps)).ceil()),
            _ => None,
        };
        EstimatorResult {
            estimate,
            variance_of_mean,
            scv,
            ci95_half_width: 1.96 * variance_of_mean.sqrt(),
            samples: moments.count,
            wall_seconds,
            wnrv,
            seed,
            biased: false,
            bias_bound: 0.0,
            recommended_m,
        }
    }

    /// Estimated standard error of the estimate.
    pub fn standard_error(&self) -> f64 {
        self.variance_of_mean.sqrt()
    }
}

#![allow(clippy::excessive_precision)] // frozen reference values
//! Estimator correctness against independent oracles: Erlang closed forms,
//! the deterministic convolution oracle, and cross-estimator agreement.

use lefttail::distributions::{make_distribution, Distribution, DistributionSpec};
use lefttail::engine::{
    chernoff_scv_lower_bound, convolution_oracle, estimate_naive, estimate_truncation,
    EstimatorResult,
};
use lefttail::gamma_is::{estimate_gamma_is, second_moment_gamma_is, second_moment_ratio};
use lefttail::lognormal_is::{estimate_biased_truncated, estimate_gamma_kstar};
use lefttail::twisting::{estimate_exp_twist, solve_tilt, TiltedSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

const ERLANG_4_AT_1: f64 = 0.018988156876153808; // 1 − e⁻¹(1+1+1/2+1/6)
const EXP_CDF_AT_1: f64 = 0.6321205588285577;

fn dist(spec: DistributionSpec) -> Distribution {
    make_distribution(spec).unwrap()
}

fn exp1() -> Distribution {
    dist(DistributionSpec::Exponential { k: 1.0 })
}

fn weibull15() -> Distribution {
    dist(DistributionSpec::Weibull { k: 1.5, lambda: 1.0 })
}

fn assert_within_3se(r: &EstimatorResult, want: f64, label: &str) {
    let tol = 3.0 * r.standard_error();
    assert!(
        (r.estimate - want).abs() <= tol,
        "{label}: estimate {:e} vs {want:e} (3 SE = {tol:e})",
        r.estimate
    );
}

#[test]
fn exp_twist_erlang_oracle() {
    let d = exp1();
    let r = estimate_exp_twist(&d, 1.0, 4, 100_000, 101).unwrap();
    assert_within_3se(&r, ERLANG_4_AT_1, "exp-twist Erlang(4)");
    // Single summand, γ below the mean (γ/N = E[X] is outside the tilt
    // contract): α = F(0.9) = 1 − e^{-0.9}.
    let r = estimate_exp_twist(&d, 0.9, 1, 100_000, 102).unwrap();
    assert_within_3se(&r, 0.5934303402594009, "exp-twist single summand");
    // At the contract boundary the tilt solve (and hence the estimator)
    // reports the non-rare-regime error.
    assert!(estimate_exp_twist(&d, 1.0, 1, 1_000, 102).is_err());
}

#[test]
fn exp_twist_weibull_against_convolution_oracle() {
    let d = weibull15();
    let oracle = convolution_oracle(&d, 0.5, 5, 4096).unwrap();
    let r = estimate_exp_twist(&d, 0.5, 5, 100_000, 103).unwrap();
    let tol = 3.0 * r.standard_error() + oracle.richardson_error_estimate;
    assert!(
        (r.estimate - oracle.alpha).abs() <= tol,
        "estimate {:e} vs oracle {:e} (tol {tol:e})",
        r.estimate,
        oracle.alpha
    );
}

#[test]
fn tilted_mean_identity_for_every_family() {
    // Sample mean of tilted draws converges to γ/N for every supported
    // family (Log-normal goes through the k* proposal shape).
    let specs = vec![
        DistributionSpec::Exponential { k: 1.0 },
        DistributionSpec::Gamma { k: 2.0, beta: 1.0 },
        DistributionSpec::Weibull { k: 1.5, lambda: 1.0 },
        DistributionSpec::NakagamiM { m: 2.5, omega: 2.0 },
        DistributionSpec::GeneralizedGamma { a: 1.2, d: 2.2, p: 1.4 },
        DistributionSpec::Rice { sigma: 1.0, nu: 1.0 },
        DistributionSpec::GammaGamma { k: 1.7, m: 4.0, omega: 1.0 },
        DistributionSpec::KappaMu { kappa: 1.5, mu: 1.3, omega: 1.0 },
        DistributionSpec::LogNormal,
    ];
    for (i, spec) in specs.into_iter().enumerate() {
        let d = dist(spec);
        let name = d.spec().family_name().to_string();
        let n = 5u32;
        let gamma = 0.3 * d.mean() * n as f64;
        let tilt = solve_tilt(&d, gamma, n).unwrap();
        assert!(tilt.theta < 0.0, "{name}: theta = {}", tilt.theta);
        assert!(
            tilt.residual.abs() <= 1e-10 * (gamma / n as f64),
            "{name}: residual {:e}",
            tilt.residual
        );
        let mut sampler = TiltedSampler::new(&d, &tilt).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(500 + i as u64);
        let m = 30_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        let mut finite_log_weights = true;
        for _ in 0..m {
            let (x, _) = sampler.draw(&mut rng).unwrap();
            sum += x;
            sq += x * x;
            // Log-weight finiteness for every accepted sample.
            let lw = d.log_pdf(x).unwrap() + tilt.theta * x - tilt.normalizer.ln();
            finite_log_weights &= lw.is_finite();
        }
        assert!(finite_log_weights, "{name}: non-finite log weight");
        let mean = sum / m as f64;
        let sd = (sq / m as f64 - mean * mean).sqrt();
        let target = gamma / n as f64;
        assert!(
            (mean - target).abs() <= 4.0 * sd / (m as f64).sqrt(),
            "{name}: tilted mean {mean} vs {target}"
        );
    }
}

#[test]
fn gamma_is_erlang_oracle() {
    let d = exp1();
    let r = estimate_gamma_is(&d, 1.0, 4, 100_000, 104).unwrap();
    assert_within_3se(&r, ERLANG_4_AT_1, "gamma-is Erlang(4)");
    let r = estimate_gamma_is(&d, 1.0, 1, 100_000, 105).unwrap();
    assert_within_3se(&r, EXP_CDF_AT_1, "gamma-is single summand");
}

#[test]
fn gamma_is_rare_weibull_against_convolution_oracle() {
    let d = weibull15();
    let oracle = convolution_oracle(&d, 0.5, 12, 4096).unwrap();
    let r = estimate_gamma_is(&d, 0.5, 12, 100_000, 106).unwrap();
    let tol = 3.0 * r.standard_error() + oracle.richardson_error_estimate;
    assert!(
        (r.estimate - oracle.alpha).abs() <= tol,
        "estimate {:e} vs oracle {:e}",
        r.estimate,
        oracle.alpha
    );
    // Relative standard error stays small deep in the rare regime.
    let rel_se = r.standard_error() / r.estimate;
    assert!(rel_se <= 0.05, "relative SE = {rel_se}");
}

#[test]
fn gamma_is_agrees_with_naive_on_non_rare_grid() {
    // Unbiasedness cross-check on instances with α ≥ 0.01.
    let cases: Vec<(DistributionSpec, u32, f64)> = vec![
        (DistributionSpec::Exponential { k: 1.0 }, 2, 1.0),
        (DistributionSpec::Exponential { k: 1.0 }, 4, 2.5),
        (DistributionSpec::Exponential { k: 2.5 }, 3, 1.0),
        (DistributionSpec::Gamma { k: 2.0, beta: 1.0 }, 2, 2.0),
        (DistributionSpec::Gamma { k: 0.7, beta: 2.0 }, 2, 1.0),
        (DistributionSpec::Weibull { k: 1.5, lambda: 1.0 }, 3, 1.5),
        (DistributionSpec::Weibull { k: 0.5, lambda: 1.0 }, 2, 0.8),
        (DistributionSpec::NakagamiM { m: 2.5, omega: 2.0 }, 2, 1.8),
        (DistributionSpec::GeneralizedGamma { a: 1.2, d: 2.2, p: 1.4 }, 2, 1.2),
        (DistributionSpec::Rice { sigma: 1.0, nu: 1.0 }, 2, 1.6),
    ];
    for (i, (spec, n, gamma)) in cases.into_iter().enumerate() {
        let d = dist(spec);
        let name = d.spec().family_name().to_string();
        let naive = estimate_naive(&d, gamma, n, 200_000, 600 + i as u64).unwrap();
        assert!(naive.estimate >= 0.01, "{name}: case not non-rare ({:e})", naive.estimate);
        let is = estimate_gamma_is(&d, gamma, n, 20_000, 700 + i as u64).unwrap();
        let tol = 3.0 * (naive.variance_of_mean + is.variance_of_mean).sqrt();
        assert!(
            (naive.estimate - is.estimate).abs() <= tol,
            "{name} (n={n}, gamma={gamma}): naive {:e} vs gamma-is {:e} (tol {tol:e})",
            naive.estimate,
            is.estimate
        );
    }
}

#[test]
fn gamma_is_scv_stays_stable_as_n_grows() {
    // Near-flat SCV along N is the point of the proposal.
    let d = weibull15();
    let scv_2 = estimate_gamma_is(&d, 0.5, 2, 100_000, 107).unwrap().scv.unwrap();
    let scv_12 = estimate_gamma_is(&d, 0.5, 12, 100_000, 108).unwrap().scv.unwrap();
    assert!(
        scv_12 <= 10.0 * scv_2,
        "SCV grew too fast: scv(N=2) = {scv_2}, scv(N=12) = {scv_12}"
    );
}

#[test]
fn weight_positivity_and_finiteness() {
    let d = weibull15();
    let r = estimate_gamma_is(&d, 0.05, 12, 50_000, 109).unwrap();
    // α ~ 1e-33 at this depth: weights must neither vanish entirely nor
    // produce non-finite moments.
    assert!(r.estimate.is_finite() && r.estimate > 0.0);
    assert!(r.variance_of_mean.is_finite());
    assert!(r.scv.unwrap().is_finite());
}

#[test]
fn second_moment_ratio_exponential_is_near_one() {
    // For exponential summands the two IS densities coincide, so the
    // second-moment ratio deviates from 1 only by Monte Carlo noise.
    let d = exp1();
    let ratio = second_moment_ratio(&d, 1.0, 4, 100_000, 110).unwrap();
    assert!((0.9..=1.1).contains(&ratio), "ratio = {ratio}");
}

#[test]
fn second_moment_ratio_weibull_rare_regime() {
    let d = weibull15();
    let ratio = second_moment_ratio(&d, 0.05, 12, 100_000, 111).unwrap();
    assert!((0.5..=2.0).contains(&ratio), "ratio = {ratio}");
}

#[test]
fn second_moment_self_ratio_is_exactly_one() {
    let d = weibull15();
    let a = second_moment_gamma_is(&d, 0.5, 6, 20_000, 112).unwrap();
    let b = second_moment_gamma_is(&d, 0.5, 6, 20_000, 112).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn lognormal_estimators_against_oracle() {
    let d = dist(DistributionSpec::LogNormal);

    // N = 1, γ = 1: α = Φ(log 1) = 1/2 analytically.
    let r = estimate_gamma_kstar(1.0, 1, 100_000, 113).unwrap();
    assert_within_3se(&r, 0.5, "ln-gamma-kstar N=1");
    let rb = estimate_biased_truncated(1.0, 1, 0.05, 100_000, 114).unwrap();
    assert!(rb.biased);
    let tol = 3.0 * rb.standard_error() + rb.bias_bound * rb.estimate;
    assert!((rb.estimate - 0.5).abs() <= tol, "ln-biased N=1: {:e}", rb.estimate);

    // N = 2, γ = 1 against the convolution oracle.
    let oracle = convolution_oracle(&d, 1.0, 2, 4096).unwrap();
    let r = estimate_gamma_kstar(1.0, 2, 100_000, 115).unwrap();
    let tol = 3.0 * r.standard_error() + oracle.richardson_error_estimate;
    assert!((r.estimate - oracle.alpha).abs() <= tol);
    let rb = estimate_biased_truncated(1.0, 2, 0.05, 100_000, 116).unwrap();
    let tol = 3.0 * rb.standard_error()
        + rb.bias_bound * rb.estimate
        + oracle.richardson_error_estimate;
    assert!(
        (rb.estimate - oracle.alpha).abs() <= tol,
        "ln-biased N=2: {:e} vs {:e} (tol {tol:e})",
        rb.estimate,
        oracle.alpha
    );

    // N = 9, γ = 0.5: deep tail.
    let oracle = convolution_oracle(&d, 0.5, 9, 4096).unwrap();
    let r = estimate_gamma_kstar(0.5, 9, 100_000, 117).unwrap();
    let rel_se = r.standard_error() / r.estimate;
    assert!(rel_se <= 0.05, "relative SE = {rel_se}");
    let tol = 3.0 * r.standard_error() + oracle.richardson_error_estimate;
    assert!(
        (r.estimate - oracle.alpha).abs() <= tol,
        "ln-gamma-kstar N=9: {:e} vs {:e}",
        r.estimate,
        oracle.alpha
    );
    let rb = estimate_biased_truncated(0.5, 9, 0.05, 100_000, 118).unwrap();
    assert!(rb.scv.unwrap().is_finite());
    let tol = 3.0 * rb.standard_error()
        + rb.bias_bound * rb.estimate
        + oracle.richardson_error_estimate;
    assert!(
        (rb.estimate - oracle.alpha).abs() <= tol,
        "ln-biased N=9: {:e} vs {:e}",
        rb.estimate,
        oracle.alpha
    );
}

#[test]
fn lognormal_scv_comparison() {
    // The optimized-shape proposal beats the biased route by a wide margin
    // and stays within a factor of two of the exactly-tilted estimator,
    // which is the variance-optimal reference once its normalizer is
    // computed deterministically. (With a noisy, estimated normalizer the
    // tilted baseline would instead sit far above both — that construction
    // is out of scope here, so no ordering against it is asserted.)
    let d = dist(DistributionSpec::LogNormal);
    let kstar = estimate_gamma_kstar(0.5, 9, 100_000, 119).unwrap().scv.unwrap();
    let biased = estimate_biased_truncated(0.5, 9, 0.05, 100_000, 120)
        .unwrap()
        .scv
        .unwrap();
    let twist = estimate_exp_twist(&d, 0.5, 9, 100_000, 121).unwrap().scv.unwrap();
    println!("SCV at (N=9, gamma=0.5): kstar={kstar:.3} biased={biased:.3} exp-twist={twist:.3}");
    assert!(
        kstar <= 2.0 * biased,
        "kstar SCV {kstar} should beat the biased route {biased}"
    );
    assert!(
        kstar <= 2.0 * twist,
        "kstar SCV {kstar} should stay within 2x of the tilted reference {twist}"
    );
}

#[test]
fn lognormal_second_moments_match_exact_quadrature() {
    // Exact 2-D quadrature references (mpmath, 25 digits) at N=2, γ=0.5:
    //   α = 0.015413218969442668
    //   SCV(exact tilt)  = 1.2592389548975212
    //   SCV(Gamma k*)    = 2.1098376751591350
    // The empirical SCVs must reproduce these constants, confirming that the
    // relative standing of the two estimators is the mathematics of the
    // estimators themselves and not an implementation artifact.
    let d = dist(DistributionSpec::LogNormal);
    let twist = estimate_exp_twist(&d, 0.5, 2, 200_000, 123).unwrap();
    assert_within_3se(&twist, 0.015413218969442668, "exp-twist LN N=2");
    let twist_scv = twist.scv.unwrap();
    assert!(
        (twist_scv / 1.2592389548975212 - 1.0).abs() <= 0.10,
        "twist SCV {twist_scv} vs exact 1.2592"
    );
    let kstar = estimate_gamma_kstar(0.5, 2, 200_000, 124).unwrap();
    assert_within_3se(&kstar, 0.015413218969442668, "kstar LN N=2");
    let kstar_scv = kstar.scv.unwrap();
    assert!(
        (kstar_scv / 2.1098376751591350 - 1.0).abs() <= 0.10,
        "kstar SCV {kstar_scv} vs exact 2.1098"
    );
}

#[test]
fn truncation_scv_exceeds_chernoff_bound() {
    let d = exp1();
    let bound = chernoff_scv_lower_bound(&d, 0.5, 8).unwrap();
    let r = estimate_truncation(&d, 0.5, 8, 300_000, 122).unwrap();
    let scv = r.scv.unwrap();
    assert!(scv >= bound, "empirical SCV {scv} below Chernoff bound {bound}");
}

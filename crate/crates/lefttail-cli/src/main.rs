//! `lefttail`: left-tail sum-probability estimation from the command line.
//!
//! Subcommands: `estimate` (one JSON result), `sweep` (CSV over an `n` or
//! `gamma` axis), `compare` (CSV, several methods at one configuration), and
//! `oracle` (deterministic convolution ground truth).
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 runtime
//! estimator error.

mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use lefttail::distributions::DistributionSpec;
use lefttail::engine::{
    convolution_oracle, run, ExperimentPlan, Method, SweepAxis, SweepVariable,
};
use output::{csv_row, csv_row_failed, error_json, CSV_HEADER};

#[derive(Parser)]
#[command(name = "lefttail", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one estimator and print the result as JSON.
    Estimate(RunArgs),
    /// Sweep an axis (`n` or `gamma`) and print CSV, one row per
    /// (method, axis value).
    Sweep(RunArgs),
    /// Compare two or more methods at a fixed configuration (CSV).
    Compare(RunArgs),
    /// Deterministic convolution oracle for `alpha(gamma, N)`.
    Oracle(OracleArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Estimator: naive | truncation | exp-twist | gamma-is | ln-biased |
    /// ln-gamma-kstar. Repeatable for sweep/compare.
    #[arg(long = "method")]
    methods: Vec<String>,
    /// Summand family (e.g. weibull, lognormal, gamma-gamma).
    #[arg(long)]
    dist: Option<String>,
    /// Family parameter, repeatable: --param k=1.5 --param lambda=1.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Number of summands N.
    #[arg(long)]
    n: Option<u32>,
    /// Threshold γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Sample budget M.
    #[arg(long)]
    samples: Option<u64>,
    /// Relative-error target ε (bias budget for ln-biased, recommended-M
    /// reporting for the rest).
    #[arg(long)]
    epsilon: Option<f64>,
    /// RNG seed; identical (plan, seed) replays identical estimates.
    #[arg(long)]
    seed: Option<u64>,
    /// Sweep variable: n | gamma.
    #[arg(long = "sweep-var")]
    sweep_var: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long = "sweep-values", value_delimiter = ',')]
    sweep_values: Vec<f64>,
    /// JSON config file; explicit flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the merged configuration as JSON and exit.
    #[arg(long)]
    dump_config: bool,
    /// Write CSV to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    dist: Option<String>,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Convolution grid cells (power of two, ≥ 1024).
    #[arg(long, default_value_t = 4096)]
    grid: u64,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|e| format!("invalid numeric value in `{s}`: {e}"))?;
    Ok((key.to_string(), value))
}

/// Full configuration of a run, as merged from a config file and flags.
/// `--dump-config` emits exactly this shape.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct RunConfig {
    methods: Vec<Method>,
    dist: DistributionSpec,
    n: u32,
    gamma: f64,
    samples: u64,
    epsilon: f64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sweep: Option<SweepAxis>,
}

enum CliError {
    /// Configuration problems: exit status 2.
    Validation(String),
    /// Estimator/oracle runtime failures: exit status 3.
    Runtime(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Validation(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Runtime(msg) => {
                println!("{}", error_json("estimator", &msg));
                eprintln!("error: {msg}");
                ExitCode::from(3)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Sweep(args) => cmd_sweep(args, false),
        Command::Compare(args) => cmd_sweep(args, true),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => e.report(),
    }
}

/// Builds the merged run configuration: config file first, flags override.
fn merge_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let file: Option<RunConfig> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read --config {}: {e}", path.display()))
            })?;
            Some(serde_json::from_str(&text).map_err(|e| {
                CliError::Validation(format!("cannot parse --config {}: {e}", path.display()))
            })?)
        }
        None => None,
    };

    let methods = if args.methods.is_empty() {
        file.as_ref()
            .map(|f| f.methods.clone())
            .ok_or_else(|| CliError::Validation("missing required --method".into()))?
    } else {
        args.methods
            .iter()
            .map(|name| {
                Method::from_name(name).ok_or_else(|| {
                    CliError::Validation(format!(
                        "unknown --method `{name}` (expected one of {})",
                        Method::ALL.map(|m| m.name()).join(", ")
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    if methods.is_empty() {
        return Err(CliError::Validation("missing required --method".into()));
    }

    let dist = match (&args.dist, &file) {
        (Some(name), _) => {
            let params: BTreeMap<String, f64> = args.params.iter().cloned().collect();
            DistributionSpec::from_name_params(name, &params)
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
        (None, Some(f)) => f.dist.clone(),
        (None, None) => return Err(CliError::Validation("missing required --dist".into())),
    };

    let n = args
        .n
        .or(file.as_ref().map(|f| f.n))
        .ok_or_else(|| CliError::Validation("missing required --n".into()))?;
    let gamma = args
        .gamma
        .or(file.as_ref().map(|f| f.gamma))
        .ok_or_else(|| CliError::Validation("missing required --gamma".into()))?;
    let samples = args
        .samples
        .or(file.as_ref().map(|f| f.samples))
        .unwrap_or(100_000);
    let epsilon = args
        .epsilon
        .or(file.as_ref().map(|f| f.epsilon))
        .unwrap_or(0.05);
    let seed = args.seed.or(file.as_ref().map(|f| f.seed)).unwrap_or(0);

    let sweep = match (&args.sweep_var, args.sweep_values.is_empty()) {
        (Some(var), _) => {
            let variable = match var.as_str() {
                "n" => SweepVariable::N,
                "gamma" => SweepVariable::Gamma,
                other => {
                    return Err(CliError::Validation(format!(
                        "--sweep-var must be `n` or `gamma`, got `{other}`"
                    )))
                }
            };
            Some(SweepAxis { variable, values: args.sweep_values.clone() })
        }
        (None, false) => {
            return Err(CliError::Validation(
                "--sweep-values given without --sweep-var".into(),
            ))
        }
        (None, true) => file.as_ref().and_then(|f| f.sweep.clone()),
    };

    Ok(RunConfig { methods, dist, n, gamma, samples, epsilon, seed, sweep })
}

fn plan_for(config: &RunConfig, method: Method, n: u32, gamma: f64) -> ExperimentPlan {
    ExperimentPlan {
        method,
        dist: config.dist.clone(),
        n,
        gamma,
        samples: config.samples,
        epsilon: config.epsilon,
        seed: config.seed,
        sweep: None,
    }
}

fn dump_config(config: &RunConfig) -> Result<ExitCode, CliError> {
    let json = serde_json::to_string_pretty(config)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_estimate(args: RunArgs) -> Result<ExitCode, CliError> {
    let config = merge_config(&args)?;
    if args.dump_config {
        return dump_config(&config);
    }
    if config.methods.len() != 1 {
        return Err(CliError::Validation(
            "estimate takes exactly one --method; use compare for several".into(),
        ));
    }
    let plan = plan_for(&config, config.methods[0], config.n, config.gamma);
    plan.validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let result = run(&plan).map_err(|e| CliError::Runtime(e.to_string()))?;
    let json = serde_json::to_string_pretty(&result)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: RunArgs, compare: bool) -> Result<ExitCode, CliError> {
    let config = merge_config(&args)?;
    if args.dump_config {
        return dump_config(&config);
    }

    // Row set: (method, n, gamma) in deterministic order — methods outer,
    // axis values inner. `compare` is a sweep with a single fixed axis value
    // and at least two methods.
    let mut rows: Vec<(Method, u32, f64)> = Vec::new();
    if compare {
        if config.methods.len() < 2 {
            return Err(CliError::Validation("compare needs at least two --method".into()));
        }
        for &m in &config.methods {
            rows.push((m, config.n, config.gamma));
        }
    } else {
        let sweep = config.sweep.clone().ok_or_else(|| {
            CliError::Validation("sweep requires --sweep-var and --sweep-values".into())
        })?;
        if sweep.values.is_empty() {
            return Err(CliError::Validation("sweep axis must be nonempty".into()));
        }
        for &m in &config.methods {
            for &v in &sweep.values {
                match sweep.variable {
                    SweepVariable::N => {
                        if !(v.fract() == 0.0 && v >= 1.0 && v <= u32::MAX as f64) {
                            return Err(CliError::Validation(format!(
                                "sweep value {v} is not a valid summand count"
                            )));
                        }
                        rows.push((m, v as u32, config.gamma));
                    }
                    SweepVariable::Gamma => rows.push((m, config.n, v)),
                }
            }
        }
    }

    // Rows execute concurrently; output is buffered and emitted in axis
    // order. Each row is itself internally sharded, so the per-row worker
    // pool is left alone here.
    use rayon::prelude::*;
    let family = config.dist.family_name().to_string();
    let outputs: Vec<(String, Option<String>)> = rows
        .par_iter()
        .map(|&(method, n, gamma)| {
            let plan = plan_for(&config, method, n, gamma);
            match plan.validate().map_err(|e| e.to_string()).and_then(|()| {
                run(&plan).map_err(|e| e.to_string())
            }) {
                Ok(result) => (csv_row(method, &family, n, gamma, &result), None),
                Err(msg) => (
                    csv_row_failed(method, &family, n, gamma, config.samples, config.seed),
                    Some(format!("row (method={}, n={n}, gamma={gamma}): {msg}", method)),
                ),
            }
        })
        .collect();

    let mut csv = String::with_capacity(outputs.len() * 128 + CSV_HEADER.len() + 1);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    let mut failures = 0usize;
    for (row, diag) in &outputs {
        csv.push_str(row);
        csv.push('\n');
        if let Some(msg) = diag {
            eprintln!("error: {msg}");
            failures += 1;
        }
    }

    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| {
                CliError::Validation(format!("cannot create --out {}: {e}", path.display()))
            })?;
            file.write_all(csv.as_bytes())
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        }
        None => print!("{csv}"),
    }

    if failures == outputs.len() {
        Err(CliError::Runtime(format!("all {failures} rows failed")))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, CliError> {
    let name = args
        .dist
        .as_deref()
        .ok_or_else(|| CliError::Validation("missing required --dist".into()))?;
    let params: BTreeMap<String, f64> = args.params.iter().cloned().collect();
    let spec = DistributionSpec::from_name_params(name, &params)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let n = args
        .n
        .ok_or_else(|| CliError::Validation("missing required --n".into()))?;
    let gamma = args
        .gamma
        .ok_or_else(|| CliError::Validation("missing required --gamma".into()))?;
    if n == 0 || n > 16 {
        return Err(CliError::Validation(format!(
            "oracle supports 1 <= n <= 16, got n = {n}"
        )));
    }
    if args.grid < 1024 || !args.grid.is_power_of_two() {
        return Err(CliError::Validation(format!(
            "--grid must be a power of two >= 1024, got {}",
            args.grid
        )));
    }
    let d = lefttail::distributions::make_distribution(spec)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let result = convolution_oracle(&d, gamma, n, args.grid)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let json =
        serde_json::to_string_pretty(&result).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

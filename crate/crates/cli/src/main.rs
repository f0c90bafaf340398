//! Command-line front end: closed-form solves with far-field closure, the
//! Runge-Kutta shooting oracle, profile files and machine-readable reports.
//!
//! Exit codes: 0 success, 2 configuration or parameter error, 3 closure
//! failure, 4 oracle (shooting) failure, 1 I/O failure.

mod config;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use marangoni_core::driver::{
    build_report, compare_profile, exact_params, momentum_profile, solve_momentum,
    solve_temperature, temperature_profile, SolveError,
};
use marangoni_core::params::{scaling_constants, PhysicalParams};
use marangoni_core::report::Timings;
use marangoni_core::scalar::Scalar;
use marangoni_core::Rational;

use config::{load_file, resolve, ResolvedRun, RunArgs, Stage};

#[derive(Parser)]
#[command(
    name = "marangoni",
    about = "Semi-analytic Marangoni boundary-layer solver with a Runge-Kutta shooting oracle",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the momentum similarity equation and sample F, F', F''.
    Momentum(RunArgs),
    /// Solve the temperature equation (momentum runs implicitly); sample g, g'.
    Temperature(RunArgs),
    /// Joint closed-form/oracle profiles and deviation statistics.
    Compare(RunArgs),
    /// Print the similarity exponents and physical scaling constants.
    Params(ParamsArgs),
}

#[derive(Args)]
struct ParamsArgs {
    /// Line-oriented key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Surface-temperature power-law exponent (k >= -1).
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Temperature gradient coefficient.
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Surface-tension temperature coefficient.
    #[arg(long = "dsigma-dt", allow_negative_numbers = true)]
    dsigma_dt: Option<f64>,
    /// Density.
    #[arg(long)]
    rho: Option<f64>,
    /// Dynamic viscosity.
    #[arg(long)]
    mu: Option<f64>,
}

enum Failure {
    Config(String),
    Solve(SolveError),
    Io(std::io::Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solve(SolveError::Params(_)) => 2,
            Failure::Solve(SolveError::Closure(_)) => 3,
            Failure::Solve(SolveError::Oracle(_)) => 4,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(msg) => msg.clone(),
            Failure::Solve(err) => err.to_string(),
            Failure::Io(err) => err.to_string(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(err: SolveError) -> Self {
        Failure::Solve(err)
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Io(err)
    }
}

impl From<config::ConfigError> for Failure {
    fn from(err: config::ConfigError) -> Self {
        Failure::Config(err.to_string())
    }
}

impl From<marangoni_core::params::ParamsError> for Failure {
    fn from(err: marangoni_core::params::ParamsError) -> Self {
        Failure::Solve(SolveError::Params(err))
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Momentum(args) => cmd_momentum(&args),
        Command::Temperature(args) => cmd_temperature(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Params(args) => cmd_params(&args),
    };
    if let Err(failure) = outcome {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.exit_code());
    }
}

fn exact_run_params(
    run: &ResolvedRun,
) -> Result<marangoni_core::params::SimilarityParams<Rational>, Failure> {
    Ok(exact_params(run.k, run.pr, run.m.unwrap_or(1.0))?)
}

fn emit_report(report: &marangoni_core::report::VimReport) -> Result<(), Failure> {
    for warning in report
        .momentum
        .warnings
        .iter()
        .chain(report.temperature.iter().flat_map(|t| t.warnings.iter()))
    {
        eprintln!("warning: {warning}");
    }
    let rendered = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    println!("{rendered}");
    Ok(())
}

fn cmd_momentum(args: &RunArgs) -> Result<(), Failure> {
    let run = resolve(Stage::Momentum, args)?;
    let params = exact_run_params(&run)?;
    let started = Instant::now();
    let momentum = solve_momentum(&params, &run.settings)?;
    let momentum_ms = started.elapsed().as_secs_f64() * 1e3;
    let profile = momentum_profile(&momentum, run.range, run.samples);
    output::write_profile(&run.out, &profile, run.format)?;
    let report = build_report(
        &params,
        run.m,
        &run.settings,
        &momentum,
        None,
        run.range,
        run.samples,
        Timings {
            momentum_ms,
            temperature_ms: None,
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    );
    emit_report(&report)
}

fn cmd_temperature(args: &RunArgs) -> Result<(), Failure> {
    let run = resolve(Stage::Temperature, args)?;
    let params = exact_run_params(&run)?;
    let started = Instant::now();
    let momentum = solve_momentum(&params, &run.settings)?;
    let momentum_ms = started.elapsed().as_secs_f64() * 1e3;
    let temp_started = Instant::now();
    let temperature = solve_temperature(&params, &momentum, &run.settings)?;
    let temperature_ms = temp_started.elapsed().as_secs_f64() * 1e3;
    let profile = temperature_profile(&temperature, run.m, run.range, run.samples);
    output::write_profile(&run.out, &profile, run.format)?;
    let report = build_report(
        &params,
        run.m,
        &run.settings,
        &momentum,
        Some(&temperature),
        run.range,
        run.samples,
        Timings {
            momentum_ms,
            temperature_ms: Some(temperature_ms),
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    );
    emit_report(&report)
}

fn cmd_compare(args: &RunArgs) -> Result<(), Failure> {
    let run = resolve(Stage::Compare, args)?;
    let params = exact_run_params(&run)?;
    let started = Instant::now();
    let momentum = solve_momentum(&params, &run.settings)?;
    let momentum_ms = started.elapsed().as_secs_f64() * 1e3;
    // the temperature branch joins the comparison when Pr was given
    let (temperature, temperature_ms) = if run.pr_given {
        let temp_started = Instant::now();
        let solved = solve_temperature(&params, &momentum, &run.settings)?;
        let ms = temp_started.elapsed().as_secs_f64() * 1e3;
        (Some(solved), Some(ms))
    } else {
        (None, None)
    };
    let profile = compare_profile(&momentum, temperature.as_ref(), run.range, run.samples);
    output::write_profile(&run.out, &profile, run.format)?;
    let report = build_report(
        &params,
        run.m,
        &run.settings,
        &momentum,
        temperature.as_ref(),
        run.range,
        run.samples,
        Timings {
            momentum_ms,
            temperature_ms,
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    );
    emit_report(&report)
}

fn cmd_params(args: &ParamsArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => load_file(path)?,
        None => Default::default(),
    };
    let value = |flag: Option<f64>, key: &str, default: f64| -> Result<f64, Failure> {
        match flag {
            Some(v) => Ok(v),
            None => match file.get(key) {
                Some(raw) => raw
                    .parse::<f64>()
                    .map_err(|e| Failure::Config(format!("config value {key}={raw:?}: {e}"))),
                None => Ok(default),
            },
        }
    };
    let k = value(args.k, "k", 0.0)?;
    let m = value(args.m, "m", 1.0)?;
    let dsigma_dt = value(args.dsigma_dt, "dsigma-dt", 1.0)?;
    let rho = value(args.rho, "rho", 1.0)?;
    let mu = value(args.mu, "mu", 1.0)?;

    let k_exact = Rational::from_double(k)
        .ok_or_else(|| Failure::Config(format!("k must be finite, got {k}")))?;
    let (a, b, t) = marangoni_core::params::derive_exponents(&k_exact)?;
    let (c1, c2) = scaling_constants(&PhysicalParams {
        dsigma_dt,
        m,
        rho,
        mu,
    })?;
    let doc = serde_json::json!({
        "k": k,
        "a": a.to_double(),
        "b": b.to_double(),
        "t": t.to_double(),
        "a_exact": a.exact_string(),
        "b_exact": b.exact_string(),
        "t_exact": t.exact_string(),
        "c1": c1,
        "c2": c2,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?
    );
    Ok(())
}

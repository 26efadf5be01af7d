//! `greencell`: figure data, single metrics and the acceptance suite.

mod compute;
mod error;
mod figures;
mod output;
mod scenario;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use greencell::channel::{ShadowConvention, RHO_HAT};
use greencell::optimizer::FixedPointKind;
use greencell::validation::{Budget, ValidationOptions};

use compute::{run_compute, ComputeOptions, Metric};
use error::CliError;
use figures::run_figure;
use scenario::Scenario;
use validate::run_validation;

/// Exit status when some grid points failed but the rest was written.
const EXIT_PARTIAL: u8 = 3;
/// Exit status when a validation check fails.
const EXIT_VALIDATION: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "greencell", version, about = "Void cells, throughput and optimal load of small-cell networks")]
struct Cli {
    /// Scenario file; the built-in urban micro preset is used without it.
    #[arg(long, global = true, env = "GREENCELL_CONFIG")]
    config: Option<PathBuf>,

    #[arg(long, global = true, env = "GREENCELL_SEED")]
    seed: Option<u64>,

    /// Simulation trials per point.
    #[arg(long, global = true, env = "GREENCELL_TRIALS")]
    trials: Option<usize>,

    /// Output directory for CSV files.
    #[arg(long, global = true, env = "GREENCELL_OUT")]
    out: Option<PathBuf>,

    /// How shadowing figures in dB are read.
    #[arg(long, global = true, env = "GREENCELL_SHADOW_CONVENTION", value_parser = ["std-db", "var-db"])]
    shadow_convention: Option<String>,

    /// Restricts the run to these curves, e.g. `nearest:0,mrp:8`.
    #[arg(long, global = true, env = "GREENCELL_CURVES", value_delimiter = ',')]
    curves: Option<Vec<String>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Writes the data behind figure 2 to 8 as CSV.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(2..=8))]
        id: u8,
    },
    /// Evaluates one metric over a grid.
    Compute {
        /// void_prob, coverage, t_c, t_u, g_c, g_u or v_star.
        metric: String,
        /// Objective for v_star: user_throughput, green_cell or green_user.
        #[arg(long, default_value = "green_user")]
        kind: String,
        /// Grid overriding the scenario's (loads, SIR thresholds in dB or user intensities).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<f64>>,
        /// Cell load for the coverage metric.
        #[arg(long, default_value_t = 1.0)]
        load: f64,
    },
    /// Runs the acceptance criteria and exits non-zero if any check fails.
    Validate {
        #[arg(long, default_value = "ci", env = "GREENCELL_BUDGET", value_parser = ["ci", "full"])]
        budget: String,
        /// Subset of criteria, e.g. `1,4,9`.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        /// Gamma shape used for the analytic void probability.
        #[arg(long, default_value_t = RHO_HAT)]
        rho_hat: f64,
    },
    /// Prints the effective scenario as TOML.
    Scenario,
}

fn effective_scenario(cli: &Cli) -> Result<Scenario, CliError> {
    let mut s = match &cli.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::preset(),
    };
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if let Some(trials) = cli.trials {
        s.trials = trials;
    }
    if let Some(out) = &cli.out {
        s.out_dir = out.display().to_string();
    }
    if let Some(conv) = &cli.shadow_convention {
        s.shadow_convention = conv.clone();
    }
    if let Some(curves) = &cli.curves {
        s.curves = curves.clone();
    }
    s.validate()
        .map_err(|(key, message)| CliError::Usage(format!("`{key}`: {message}")))?;
    let conv: ShadowConvention = s.convention().map_err(CliError::Usage)?;
    log::info!("shadowing read as {conv}");
    Ok(s)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let scenario = effective_scenario(&cli)?;
    let out = PathBuf::from(&scenario.out_dir);
    let partial = |run: figures::RunOutput| {
        for f in &run.files {
            println!("{}", f.display());
        }
        if run.failures.is_empty() {
            ExitCode::SUCCESS
        } else {
            eprintln!("{} grid points failed; see the failure manifest", run.failures.len());
            ExitCode::from(EXIT_PARTIAL)
        }
    };
    match &cli.command {
        Command::Figure { id } => Ok(partial(run_figure(*id, &scenario, &out)?)),
        Command::Compute {
            metric,
            kind,
            grid,
            load,
        } => {
            let metric: Metric = metric.parse().map_err(CliError::Usage)?;
            let kind: FixedPointKind = kind.parse().map_err(CliError::Usage)?;
            let opts = ComputeOptions {
                grid: grid.clone(),
                kind,
                load: *load,
            };
            Ok(partial(run_compute(metric, &opts, &scenario, &out)?))
        }
        Command::Validate {
            budget,
            criteria,
            rho_hat,
        } => {
            let opts = ValidationOptions {
                budget: budget.parse::<Budget>().map_err(CliError::Usage)?,
                seed: cli.seed.unwrap_or(ValidationOptions::default().seed),
                rho_hat: *rho_hat,
            };
            let run = run_validation(criteria, &opts, &out)?;
            println!("{}", run.table.display());
            if run.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("failing checks: {}", run.failing_checks().join(", "));
                Ok(ExitCode::from(EXIT_VALIDATION))
            }
        }
        Command::Scenario => {
            print!("{}", scenario.to_toml());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config { .. } | CliError::Usage(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

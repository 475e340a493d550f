//! `idm` — car-following simulation CLI.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use commands::{
    bounds_text, cmd_compare, cmd_run, cmd_sweep, exit_code, list_text, parse_eps_spec,
    resolve_scenario, CliError, Overrides,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "idm",
    about = "Simulate the intelligent driver model and its well-posedness-restoring variants",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct CommonOverrides {
    /// Replace the scenario's variant (classic, velocity-projected,
    /// acceleration-projected, velocity-regularized, distance-regularized,
    /// discontinuous)
    #[arg(long)]
    variant: Option<String>,
    /// Override the time horizon [s]
    #[arg(long)]
    horizon: Option<f64>,
    /// Relative error tolerance
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute error tolerance
    #[arg(long)]
    abs_tol: Option<f64>,
}

impl CommonOverrides {
    fn into_overrides(self) -> Overrides {
        Overrides {
            variant: self.variant,
            horizon: self.horizon,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write trajectory CSVs plus a report
    Run {
        /// Built-in scenario name or config file path
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        overrides: CommonOverrides,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Round report numbers to N decimals (CSV files stay full precision)
        #[arg(long)]
        round: Option<usize>,
    },
    /// Distance statistics for a variant x scenario grid (compare.csv)
    Compare {
        /// Comma-separated scenario names (default: case1,case2,case3)
        #[arg(long, default_value = "case1,case2,case3")]
        scenario: String,
        /// Comma-separated variant names (empty string for an empty table)
        #[arg(
            long,
            default_value = "acceleration-projected,velocity-regularized,distance-regularized,discontinuous"
        )]
        variant: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Recovery-time sweep over initial gaps (sweep.csv)
    Sweep {
        /// Base scenario (default: the velocity-projected study)
        #[arg(long, default_value = "eps-sweep")]
        scenario: String,
        /// Gap values: comma list or start:step:end range
        #[arg(long)]
        eps: String,
        #[command(flatten)]
        overrides: CommonOverrides,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the theoretical bounds for a scenario
    Bounds {
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        overrides: CommonOverrides,
    },
    /// List the built-in scenarios
    ListScenarios,
}

fn split_names(spec: &str) -> Vec<String> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run {
            scenario,
            overrides,
            out,
            round,
        } => {
            let s = resolve_scenario(&scenario, &overrides.into_overrides())?;
            let artifacts = cmd_run(&s, &out, round)?;
            println!(
                "termination: {}",
                output::termination_label(&artifacts.trajectory.termination)
            );
            for f in &artifacts.files {
                println!("wrote {}", f.display());
            }
            Ok(exit_code(&artifacts.trajectory.termination))
        }
        Command::Compare {
            scenario,
            variant,
            out,
        } => {
            let scenarios = split_names(&scenario);
            let variants = split_names(&variant);
            let (rows, path) = cmd_compare(&variants, &scenarios, &out)?;
            for (v, sc, avg, var) in &rows {
                println!("{v:<24} {sc:<12} avg distance {avg:.4} (variance {var:.4})");
            }
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Sweep {
            scenario,
            eps,
            overrides,
            out,
        } => {
            let base = resolve_scenario(&scenario, &overrides.into_overrides())?;
            let eps_values = parse_eps_spec(&eps)?;
            let (rows, path) = cmd_sweep(&base, &eps_values, &out)?;
            for (eps, t_rec, min_v) in &rows {
                println!(
                    "eps {eps:.4}: t_recover {:.6}, min velocity {min_v:.6}",
                    t_rec.unwrap_or(0.0)
                );
            }
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Bounds {
            scenario,
            overrides,
        } => {
            let s = resolve_scenario(&scenario, &overrides.into_overrides())?;
            print!("{}", bounds_text(&s));
            Ok(0)
        }
        Command::ListScenarios => {
            print!("{}", list_text());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

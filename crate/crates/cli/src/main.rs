//! `mdelab`: solves, convergence and continuity studies, weak residuals,
//! certification sweeps and standalone distances from a scenario config.
//!
//! Exit status is 0 when every enabled assertion passes, 1 when one fails
//! (a witness is written next to the outputs) and 2 on errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mdelab", version, about = "Numerical lab for measure differential equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One trajectory plus diagnostics; audits the a priori bounds.
    Solve(RunArgs),
    /// Flat distances between successive refinements and observed orders.
    Converge(RunArgs),
    /// Distance ratio of two solutions started from perturbed initial data.
    Continuity(RunArgs),
    /// Weak-form residual against a bump test function across N.
    Residual(RunArgs),
    /// Randomized sweep of the field, growth and source hypotheses.
    Certify(RunArgs),
    /// Flat (and optionally W1) distance between two measure files.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML run configuration
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// built-in scenario; replaces the scenario of --config
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// output directory (overrides outputs.dir)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// lattice parameter N
    #[arg(long, value_name = "N", conflicts_with = "n_list")]
    pub n: Option<u32>,
    /// ascending comma-separated N values
    #[arg(long, value_name = "N,N,..", value_delimiter = ',')]
    pub n_list: Option<Vec<u32>>,
    /// sweep size for certify
    #[arg(long)]
    pub samples: Option<usize>,
    /// run independent work on the calling thread
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    Flat,
    W1,
    Both,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// measure file (.csv or .json)
    pub first: PathBuf,
    pub second: PathBuf,
    #[arg(long, value_enum, default_value = "flat")]
    pub metric: MetricKind,
    /// write the optimal flat plan as CSV
    #[arg(long, value_name = "PATH")]
    pub plan: Option<PathBuf>,
}

/// The error chain, skipping causes already spelled out by their parent.
fn render(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !msg.contains(&text) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&text);
        }
    }
    msg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Converge(a) => commands::converge(&a),
        Command::Continuity(a) => commands::continuity(&a),
        Command::Residual(a) => commands::residual(&a),
        Command::Certify(a) => commands::certify(&a),
        Command::Metrics(a) => commands::metrics(&a),
    };
    match result {
        Ok(outcome) if outcome.passed() => ExitCode::SUCCESS,
        Ok(outcome) => {
            for f in &outcome.failures {
                eprintln!("FAIL {f}");
            }
            if let Some(w) = &outcome.witness {
                eprintln!("witness written to {}", w.display());
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {}", render(&e));
            ExitCode::from(2)
        }
    }
}

//! `semicoop`: simulations, predictions, verification suites, metagames,
//! plots and an interactive session against a memory strategy.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod play;
mod plot;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semicoop_core::Point2;

#[derive(Debug, Parser)]
#[command(name = "semicoop", version, about = "Memory-strategy dynamics of the repeated Prisoner's Dilemma")]
pub struct Cli {
    /// Directory for output files that are not given explicit paths.
    #[arg(long, global = true, env = "SEMICOOP_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the dynamics and write a trajectory CSV plus a summary JSON.
    Simulate(scenario::SimulateArgs),
    /// Print the β-core of a game as JSON.
    Betacore {
        /// `pd` or a path to a game JSON file.
        #[arg(long, default_value = "pd")]
        game: String,
    },
    /// Predict the limit of a semi-cooperative profile.
    Predict {
        #[arg(long, value_parser = parse_point)]
        a: Point2,
        #[arg(long, value_parser = parse_point)]
        b: Point2,
        #[arg(long, default_value_t = 0.1)]
        eps1: f64,
        #[arg(long, default_value_t = 0.1)]
        eps2: f64,
        /// Print JSON instead of a one-line summary.
        #[arg(long)]
        json: bool,
    },
    /// Run the acceptance criteria; exits 2 if any fails.
    Verify {
        /// Comma-separated subset, e.g. `1,4,7`. Default: all.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        /// Horizon of long runs. Values other than 1000000 are for smoke tests.
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; default `<out-dir>/verify.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build the metagame over an n-point β-core grid.
    Metagame {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value = "predicted")]
        mode: semicoop_core::Mode,
        #[arg(long, default_value_t = 0.1)]
        eps1: f64,
        #[arg(long, default_value_t = 0.1)]
        eps2: f64,
        /// Horizon of simulated cells.
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        /// CSV path; default `<out-dir>/metagame.csv`.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON path; default `<out-dir>/metagame.json`.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Play player 2 against a machine strategy from the terminal.
    Play(play::PlayArgs),
    /// Render a trajectory CSV as SVG.
    Plot(plot::PlotArgs),
}

pub fn parse_point(s: &str) -> Result<Point2, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `x1,x2`, got {s:?}"));
    }
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    let p = Point2::new(num(parts[0])?, num(parts[1])?);
    if !p.is_finite() {
        return Err(format!("coordinates must be finite, got {s:?}"));
    }
    Ok(p)
}

/// Outcome of a command other than success.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or input data.
    Usage(anyhow::Error),
    /// A verification ran and did not pass.
    Verification(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}

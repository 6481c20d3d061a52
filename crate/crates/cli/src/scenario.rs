//! Scenario configuration shared by `simulate` and a JSON config file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

use semicoop_core::io::parse_game_json;
use semicoop_core::strategies::parse_strategy;
use semicoop_core::{make_pd, Game, Player, Point2, Profile};

use crate::parse_point;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON scenario file; flags given on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `pd` or a path to a game JSON file.
    #[arg(long)]
    pub game: Option<String>,
    /// Player 1 strategy, e.g. `good:eps=0.1`.
    #[arg(long)]
    pub p1: Option<String>,
    /// Player 2 strategy, e.g. `semicoop:v=1.5,2.25:eps=0.1`.
    #[arg(long)]
    pub p2: Option<String>,
    #[arg(long, value_parser = parse_point)]
    pub x0: Option<Point2>,
    #[arg(long)]
    pub t0: Option<u64>,
    /// Final time T.
    #[arg(long)]
    pub steps: Option<u64>,
    /// Fraction of the run used to estimate the limit.
    #[arg(long)]
    pub tail: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// CSV path; default `<out-dir>/trajectory.csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary path; default `<out-dir>/summary.json`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// Everything needed to run one simulation. Missing fields take defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub game: Option<String>,
    pub p1: Option<String>,
    pub p2: Option<String>,
    pub x0: Option<Point2>,
    pub t0: Option<u64>,
    pub steps: Option<u64>,
    pub tail: Option<f64>,
    pub tolerance: Option<f64>,
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

/// A validated scenario.
pub struct Scenario {
    pub p1: String,
    pub p2: String,
    pub profile: Profile,
    pub x0: Point2,
    pub t0: u64,
    pub steps: u64,
    pub tail: f64,
    pub tolerance: f64,
    pub csv: PathBuf,
    pub summary: PathBuf,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn merge(self, args: SimulateArgs) -> Self {
        Self {
            game: args.game.or(self.game),
            p1: args.p1.or(self.p1),
            p2: args.p2.or(self.p2),
            x0: args.x0.or(self.x0),
            t0: args.t0.or(self.t0),
            steps: args.steps.or(self.steps),
            tail: args.tail.or(self.tail),
            tolerance: args.tolerance.or(self.tolerance),
            csv: args.csv.or(self.csv),
            summary: args.summary.or(self.summary),
        }
    }

    pub fn resolve(self, out_dir: &Path) -> anyhow::Result<Scenario> {
        let game = load_game(self.game.as_deref().unwrap_or("pd"))?;
        let (Some(p1), Some(p2)) = (self.p1, self.p2) else {
            bail!("both --p1 and --p2 are required");
        };
        let s1 = parse_strategy(Player::One, &p1).with_context(|| format!("--p1 {p1:?}"))?;
        let s2 = parse_strategy(Player::Two, &p2).with_context(|| format!("--p2 {p2:?}"))?;
        let tail = self.tail.unwrap_or(0.1);
        if !(tail > 0.0 && tail <= 1.0) {
            bail!("--tail must lie in (0, 1], got {tail}");
        }
        let tolerance = self.tolerance.unwrap_or(0.02);
        if !(tolerance > 0.0) {
            bail!("--tolerance must be > 0, got {tolerance}");
        }
        Ok(Scenario {
            p1,
            p2,
            profile: Profile::with_game(game, s1, s2)?,
            x0: self.x0.unwrap_or(Point2::new(1.0, 1.0)),
            t0: self.t0.unwrap_or(1),
            steps: self.steps.unwrap_or(1_000_000),
            tail,
            tolerance,
            csv: self.csv.unwrap_or_else(|| out_dir.join("trajectory.csv")),
            summary: self.summary.unwrap_or_else(|| out_dir.join("summary.json")),
        })
    }
}

pub fn load_game(spec: &str) -> anyhow::Result<Game> {
    if spec == "pd" {
        return Ok(make_pd());
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading game file {spec}"))?;
    parse_game_json(&text).with_context(|| format!("game file {spec}"))
}

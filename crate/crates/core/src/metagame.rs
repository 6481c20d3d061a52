//! The induced game whose actions are β-core anchors and whose payoffs are
//! the limits of the resulting semi-cooperative dynamics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{predicted_limit, simulate_tail, LimitCase, Profile, DEFAULT_LIMIT_TOLERANCE, DEFAULT_TAIL_FRACTION};
use crate::error::{Error, Result};
use crate::game::make_pd;
use crate::geometry::{Point2, ETA};
use crate::strategies::{MemoryStrategy, Player};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Predicted,
    Simulated,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "predicted" => Ok(Mode::Predicted),
            "simulated" => Ok(Mode::Simulated),
            other => Err(Error::Parse(format!("unknown mode {other:?}, expected predicted or simulated"))),
        }
    }
}

/// Start used for every simulated cell.
pub const SIMULATED_X0: Point2 = Point2::new(1.5, 1.5);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub payoff: Point2,
    /// Limit case, predicted mode only.
    pub case: Option<LimitCase>,
    /// Tail spread, simulated mode only.
    pub spread: Option<f64>,
    /// Set when a simulated run did not settle within tolerance.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetagameMatrix {
    pub mode: Mode,
    pub eps1: f64,
    pub eps2: f64,
    /// Horizon of simulated runs.
    pub steps: Option<u64>,
    /// β-core parameters of the grid points.
    pub params: Vec<f64>,
    pub grid1: Vec<Point2>,
    pub grid2: Vec<Point2>,
    /// `cells[i][j]`: player 1 anchors at `grid1[i]`, player 2 at `grid2[j]`.
    pub cells: Vec<Vec<Cell>>,
}

impl MetagameMatrix {
    /// Assembles a matrix from explicit payoffs; the grid is left unlabeled.
    pub fn from_payoffs(payoffs: Vec<Vec<Point2>>, mode: Mode) -> Result<Self> {
        let rows = payoffs.len();
        let cols = payoffs.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || payoffs.iter().any(|r| r.len() != cols) {
            return Err(Error::DegenerateInput("payoff matrix must be non-empty and rectangular".into()));
        }
        Ok(Self {
            mode,
            eps1: f64::NAN,
            eps2: f64::NAN,
            steps: None,
            params: Vec::new(),
            grid1: Vec::new(),
            grid2: Vec::new(),
            cells: payoffs
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|payoff| Cell {
                            payoff,
                            case: None,
                            spread: None,
                            flagged: false,
                        })
                        .collect()
                })
                .collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn payoff(&self, i: usize, j: usize) -> Point2 {
        self.cells[i][j].payoff
    }

    pub fn flagged(&self) -> Vec<(usize, usize)> {
        self.cells
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, c)| c.flagged).map(move |(j, _)| (i, j)))
            .collect()
    }

    /// Largest `|M[i][j] − swap(M[n−1−j][n−1−i])|`: zero when exchanging the
    /// players (which reflects the grid) maps the matrix onto itself.
    pub fn swap_symmetry_defect(&self) -> f64 {
        let n = self.rows();
        if n != self.cols() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mirrored = self.payoff(n - 1 - j, n - 1 - i).swap();
                worst = worst.max(self.payoff(i, j).dist(mirrored));
            }
        }
        worst
    }
}

/// Fills the `n×n` matrix over the grid `s = (k+0.5)/n` of the PD β-core.
pub fn build_matrix(n: usize, eps1: f64, eps2: f64, mode: Mode, steps: u64) -> Result<MetagameMatrix> {
    if n < 1 {
        return Err(Error::InvalidParameter("grid size must be ≥ 1".into()));
    }
    if !(eps1 > 0.0 && eps2 > 0.0) {
        return Err(Error::InvalidParameter("eps1 and eps2 must be > 0".into()));
    }
    let game = make_pd();
    let params: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
    let grid = params.iter().map(|&s| game.betacore_param(s)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let filled: Vec<Result<Cell>> = jobs
        .par_iter()
        .map(|&(i, j)| fill_cell(grid[i], grid[j], eps1, eps2, mode, steps))
        .collect();
    let mut cells = vec![Vec::with_capacity(n); n];
    for ((i, _), cell) in jobs.iter().zip(filled) {
        cells[*i].push(cell?);
    }
    Ok(MetagameMatrix {
        mode,
        eps1,
        eps2,
        steps: (mode == Mode::Simulated).then_some(steps),
        params,
        grid1: grid.clone(),
        grid2: grid,
        cells,
    })
}

fn fill_cell(a: Point2, b: Point2, eps1: f64, eps2: f64, mode: Mode, steps: u64) -> Result<Cell> {
    match mode {
        Mode::Predicted => {
            let pred = predicted_limit(a, b, eps1, eps2)?;
            Ok(Cell {
                payoff: pred.limit,
                case: Some(pred.case),
                spread: None,
                flagged: false,
            })
        }
        Mode::Simulated => {
            let profile = Profile::new(
                MemoryStrategy::semicoop(Player::One, a, eps1)?,
                MemoryStrategy::semicoop(Player::Two, b, eps2)?,
            )?;
            let tail = simulate_tail(&profile, SIMULATED_X0, 1, steps, DEFAULT_TAIL_FRACTION)?;
            Ok(Cell {
                payoff: tail.last,
                case: None,
                spread: Some(tail.spread),
                flagged: tail.spread > DEFAULT_LIMIT_TOLERANCE,
            })
        }
    }
}

/// Cells where no unilateral deviation gains more than `η` for the deviator.
pub fn pure_nash(m: &MetagameMatrix) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let here = m.payoff(i, j);
            let p1_gains = (0..m.rows()).any(|k| m.payoff(k, j).x1 > here.x1 + ETA);
            let p2_gains = (0..m.cols()).any(|k| m.payoff(i, k).x2 > here.x2 + ETA);
            if !p1_gains && !p2_gains {
                out.push((i, j));
            }
        }
    }
    out
}

/// All of `player`'s grid indices that maximize its payoff against the
/// opponent's index, ties (within `η`) included.
pub fn best_response(m: &MetagameMatrix, player: Player, opponent_index: usize) -> Result<Vec<usize>> {
    let (own, opp) = match player {
        Player::One => (m.rows(), m.cols()),
        Player::Two => (m.cols(), m.rows()),
    };
    if opponent_index >= opp {
        return Err(Error::InvalidParameter(format!(
            "opponent index {opponent_index} out of range 0..{opp}"
        )));
    }
    let value = |k: usize| match player {
        Player::One => m.payoff(k, opponent_index).x1,
        Player::Two => m.payoff(opponent_index, k).x2,
    };
    let best = (0..own).map(value).fold(f64::NEG_INFINITY, f64::max);
    Ok((0..own).filter(|&k| value(k) >= best - ETA).collect())
}

//! Trajectory CSV, game files, and report/matrix export.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::dynamics::{StepRecord, Trajectory};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::geometry::Point2;
use crate::metagame::MetagameMatrix;
use crate::strategies::Action;

pub const TRAJECTORY_HEADER: &str = "t,x1,x2,a1,a2,p1,p2";

/// Writes one row per step. Floats use the shortest representation that
/// parses back to the same value, so reading the file is lossless.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut w: W) -> Result<()> {
    let mut line = String::with_capacity(96);
    writeln!(w, "{TRAJECTORY_HEADER}").map_err(io_err)?;
    for r in traj.records() {
        line.clear();
        let _ = writeln!(
            line,
            "{},{},{},{},{},{},{}",
            r.t, r.point.x1, r.point.x2, r.actions.0, r.actions.1, r.payoff.x1, r.payoff.x2
        );
        w.write_all(line.as_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn trajectory_csv_string(traj: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_trajectory_csv(traj, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

pub fn read_trajectory_csv<R: BufRead>(r: R) -> Result<Trajectory> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty trajectory file".into()))?
        .map_err(io_err)?;
    if header.trim() != TRAJECTORY_HEADER {
        return Err(Error::Parse(format!("expected header {TRAJECTORY_HEADER:?}, got {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(parse_row(&line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?);
    }
    Trajectory::from_records(&rows)
}

fn parse_row(line: &str) -> std::result::Result<StepRecord, String> {
    let fields: Vec<&str> = line.trim().split(',').collect();
    if fields.len() != 7 {
        return Err(format!("expected 7 fields, got {}", fields.len()));
    }
    let num = |k: usize| -> std::result::Result<f64, String> {
        let v: f64 = fields[k].parse().map_err(|_| format!("field {} is not a number: {:?}", k + 1, fields[k]))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("field {} is not finite", k + 1))
        }
    };
    let act = |k: usize| fields[k].parse::<Action>().map_err(|e| e.to_string());
    Ok(StepRecord {
        t: fields[0].parse().map_err(|_| format!("bad step index {:?}", fields[0]))?,
        point: Point2::new(num(1)?, num(2)?),
        actions: (act(3)?, act(4)?),
        payoff: Point2::new(num(5)?, num(6)?),
    })
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(e.to_string())
}

/// On-disk game description: action labels and a row-major table of payoff
/// vectors, one entry per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub actions1: Vec<String>,
    pub actions2: Vec<String>,
    pub payoffs: Vec<Vec<Vec<f64>>>,
}

pub fn parse_game_json(text: &str) -> Result<Game> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    game_from_file(file)
}

pub fn game_from_file(file: GameFile) -> Result<Game> {
    let mut table = Vec::with_capacity(file.payoffs.len());
    for row in file.payoffs {
        let mut out = Vec::with_capacity(row.len());
        for cell in row {
            if cell.len() != 2 {
                return Err(Error::Unsupported(format!(
                    "only two-player games are supported, got a payoff vector of length {}",
                    cell.len()
                )));
            }
            out.push(Point2::new(cell[0], cell[1]));
        }
        table.push(out);
    }
    Game::new(file.actions1, file.actions2, table)
}

pub fn game_to_file(game: &Game) -> GameFile {
    GameFile {
        actions1: game.actions1().to_vec(),
        actions2: game.actions2().to_vec(),
        payoffs: game
            .payoff_table()
            .iter()
            .map(|r| r.iter().map(|p| vec![p.x1, p.x2]).collect())
            .collect(),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))
}

/// One line per cell.
pub fn matrix_csv(m: &MetagameMatrix) -> String {
    let mut out = String::from("i,j,s1,s2,a1,a2,b1,b2,u1,u2,case,spread,flagged\n");
    for (i, row) in m.cells.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let (s1, s2) = (m.params.get(i), m.params.get(j));
            let (a, b) = (m.grid1.get(i), m.grid2.get(j));
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{i},{j},{},{},{},{},{},{},{},{},{},{},{}",
                opt(s1.copied()),
                opt(s2.copied()),
                opt(a.map(|p| p.x1)),
                opt(a.map(|p| p.x2)),
                opt(b.map(|p| p.x1)),
                opt(b.map(|p| p.x2)),
                c.payoff.x1,
                c.payoff.x2,
                c.case.map(|k| k.name()).unwrap_or(""),
                opt(c.spread),
                c.flagged
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, Profile};
    use crate::game::make_pd;
    use crate::metagame::{build_matrix, Mode};
    use crate::strategies::{MemoryStrategy, Player};

    #[test]
    fn csv_round_trip_is_lossless() {
        let prof = Profile::new(
            MemoryStrategy::good(Player::One, 0.1).unwrap(),
            MemoryStrategy::good(Player::Two, 0.1).unwrap(),
        )
        .unwrap();
        let traj = simulate(&prof, Point2::new(0.3, 2.7), 1, 2_000).unwrap();
        let text = trajectory_csv_string(&traj);
        assert!(text.starts_with("t,x1,x2,a1,a2,p1,p2\n1,0.3,2.7,"));
        let back = read_trajectory_csv(text.as_bytes()).unwrap();
        assert_eq!(back, traj);
        assert!(back.recurrence_residual() <= crate::geometry::ETA);
    }

    #[test]
    fn csv_rejects_malformed() {
        assert!(read_trajectory_csv("".as_bytes()).is_err());
        assert!(read_trajectory_csv("t,x1\n".as_bytes()).is_err());
        let bad = format!("{TRAJECTORY_HEADER}\n1,0.5,0.5,C,X,2,2\n");
        let err = read_trajectory_csv(bad.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let gap = format!("{TRAJECTORY_HEADER}\n1,1,1,D,D,1,1\n3,1,1,D,D,1,1\n");
        assert!(read_trajectory_csv(gap.as_bytes()).is_err());
    }

    #[test]
    fn game_file_round_trip() {
        let pd = make_pd();
        let text = to_json(&game_to_file(&pd)).unwrap();
        assert_eq!(parse_game_json(&text).unwrap(), pd);
    }

    #[test]
    fn game_file_errors() {
        let three = r#"{"actions1":["A","B"],"actions2":["A","B"],
            "payoffs":[[[1,1,1],[0,0,0]],[[0,0,0],[1,1,1]]]}"#;
        assert!(matches!(parse_game_json(three), Err(Error::Unsupported(_))));
        let ragged = r#"{"actions1":["A","B"],"actions2":["A","B"],"payoffs":[[[1,1],[0,0]],[[0,0]]]}"#;
        assert!(parse_game_json(ragged).is_err());
        assert!(matches!(parse_game_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn matrix_csv_has_one_line_per_cell() {
        let m = build_matrix(3, 0.1, 0.1, Mode::Predicted, 0).unwrap();
        let csv = matrix_csv(&m);
        assert_eq!(csv.lines().count(), 1 + 9);
        assert!(csv.lines().nth(1).unwrap().ends_with(",same_a,,false"));
    }
}

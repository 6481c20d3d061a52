//! Interactive session: the machine is player 1, the human is player 2.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

use semicoop_core::io::to_json;
use semicoop_core::strategies::{parse_strategy, StrategyKind};
use semicoop_core::verification::{cesaro_bounds, CesaroBounds};
use semicoop_core::{make_pd, Action, Player, Point2};

use crate::commands::write_file;
use crate::{parse_point, Failure};

pub const MAX_ROUNDS: u64 = 1_000_000;

#[derive(Debug, Args)]
pub struct PlayArgs {
    /// Machine strategy for player 1: `good:...` or `semicoop:...`.
    #[arg(long, default_value = "good:eps=0.1")]
    pub machine: String,
    #[arg(long, value_parser = parse_point, default_value = "1,1")]
    pub x0: Point2,
    #[arg(long, default_value_t = MAX_ROUNDS)]
    pub max_rounds: u64,
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    /// Transcript path; default `<out-dir>/session.json`.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Print only the final report.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub t: u64,
    pub machine: Action,
    pub human: Action,
    pub payoff: Point2,
    /// Average after this round.
    pub average: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub machine: String,
    pub x0: Point2,
    pub rounds: Vec<Round>,
    pub final_average: Option<Point2>,
    /// Cesàro bounds over the trailing window, when there are enough rounds.
    pub bounds1: Option<CesaroBounds>,
    pub bounds2: Option<CesaroBounds>,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

pub fn run(args: PlayArgs, out: &Path) -> Result<(), Failure> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let transcript = session(&args, stdin.lock(), stdout.lock())?;
    let path = args.transcript.clone().unwrap_or_else(|| out.join("session.json"));
    write_file(&path, &to_json(&transcript)?)?;
    println!("transcript written to {}", path.display());
    Ok(())
}

/// Parses `C`, `D`, `q`, optionally followed by a repeat count (`D 500`).
fn parse_input(line: &str) -> Result<Option<(Action, u64)>, String> {
    let mut parts = line.split_whitespace();
    let Some(first) = parts.next() else {
        return Err("enter C, D or q".into());
    };
    if matches!(first, "q" | "quit" | "exit") {
        return Ok(None);
    }
    let action = match first {
        "c" | "C" => Action::C,
        "d" | "D" => Action::D,
        other => return Err(format!("unknown input {other:?}; enter C, D or q")),
    };
    let count = match parts.next() {
        None => 1,
        Some(n) => n.parse::<u64>().ok().filter(|&n| n >= 1).ok_or_else(|| format!("bad repeat count {n:?}"))?,
    };
    if parts.next().is_some() {
        return Err("too many fields".into());
    }
    Ok(Some((action, count)))
}

pub fn session<R: BufRead, W: Write>(args: &PlayArgs, input: R, mut out: W) -> anyhow::Result<Transcript> {
    let machine = parse_strategy(Player::One, &args.machine).context("--machine")?;
    let bound2 = match machine.kind() {
        StrategyKind::Good { .. } => 2.0,
        StrategyKind::SemiCoop { v, .. } => v.x2,
        _ => bail!("the machine must play a good or semicoop strategy"),
    };
    let game = make_pd();
    if !game.payoff_polytope().contains(args.x0) {
        bail!("x0 = ({}, {}) lies outside the payoff polytope", args.x0.x1, args.x0.x2);
    }
    let cap = args.max_rounds.min(MAX_ROUNDS);
    let mut x = args.x0;
    let mut t = 1u64;
    let mut rounds = Vec::new();
    let mut lines = input.lines();
    let mut note = None;
    'session: while (rounds.len() as u64) < cap {
        if !args.quiet {
            write!(out, "t={t} average=({:.4}, {:.4}) your move [C/D/q]: ", x.x1, x.x2)?;
            out.flush()?;
        }
        let Some(line) = lines.next() else {
            break;
        };
        let (human, count) = match parse_input(&line?) {
            Ok(Some(v)) => v,
            Ok(None) => break,
            Err(msg) => {
                if !args.quiet {
                    writeln!(out, "{msg}")?;
                }
                continue;
            }
        };
        for _ in 0..count {
            if rounds.len() as u64 >= cap {
                note = Some(format!("session capped at {cap} rounds"));
                break 'session;
            }
            let m = machine.action_at(x);
            let payoff = game.payoff(m.index(), human.index());
            let tf = t as f64;
            x = Point2::new((tf * x.x1 + payoff.x1) / (tf + 1.0), (tf * x.x2 + payoff.x2) / (tf + 1.0));
            t += 1;
            rounds.push(Round { t, machine: m, human, payoff, average: x });
        }
        if !args.quiet {
            writeln!(out, "machine played {}", rounds.last().map(|r| r.machine).expect("at least one round"))?;
        }
    }
    let transcript = report(args, bound2, rounds, note);
    writeln!(out)?;
    for line in summary_lines(&transcript) {
        writeln!(out, "{line}")?;
    }
    Ok(transcript)
}

fn report(args: &PlayArgs, bound2: f64, rounds: Vec<Round>, note: Option<String>) -> Transcript {
    let means1: Vec<f64> = rounds.iter().map(|r| r.average.x1).collect();
    let means2: Vec<f64> = rounds.iter().map(|r| r.average.x2).collect();
    let bounds1 = cesaro_bounds(&means1, 0.1).ok();
    let bounds2 = cesaro_bounds(&means2, 0.1).ok();
    let mut checks = Vec::new();
    if let (Some(b1), Some(b2)) = (&bounds1, &bounds2) {
        let tol = args.tolerance;
        checks.push(Check {
            name: "liminf x1 >= 1".into(),
            measured: b1.liminf_hat,
            bound: 1.0 - tol,
            holds: b1.liminf_hat >= 1.0 - tol,
        });
        checks.push(Check {
            name: format!("limsup x2 <= {bound2}"),
            measured: b2.limsup_hat,
            bound: bound2 + tol,
            holds: b2.limsup_hat <= bound2 + tol,
        });
    }
    let note = note.or_else(|| (bounds1.is_none()).then(|| "fewer than 100 rounds: no Cesàro bounds".into()));
    Transcript {
        machine: args.machine.clone(),
        x0: args.x0,
        final_average: rounds.last().map(|r| r.average),
        rounds,
        bounds1,
        bounds2,
        checks,
        note,
    }
}

fn summary_lines(t: &Transcript) -> Vec<String> {
    let mut out = vec![format!("rounds played: {}", t.rounds.len())];
    if let Some(x) = t.final_average {
        out.push(format!("final average: ({:.6}, {:.6})", x.x1, x.x2));
    }
    if let (Some(b1), Some(b2)) = (&t.bounds1, &t.bounds2) {
        out.push(format!("x1 in [{:.6}, {:.6}], x2 in [{:.6}, {:.6}]", b1.liminf_hat, b1.limsup_hat, b2.liminf_hat, b2.limsup_hat));
    }
    for c in &t.checks {
        out.push(format!("{}: {} (measured {:.6}, bound {:.6})", c.name, if c.holds { "holds" } else { "VIOLATED" }, c.measured, c.bound));
    }
    if let Some(n) = &t.note {
        out.push(n.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(machine: &str) -> PlayArgs {
        PlayArgs {
            machine: machine.into(),
            x0: Point2::new(1.0, 1.0),
            max_rounds: MAX_ROUNDS,
            tolerance: 0.02,
            transcript: None,
            quiet: true,
        }
    }

    #[test]
    fn input_grammar() {
        assert_eq!(parse_input("D"), Ok(Some((Action::D, 1))));
        assert_eq!(parse_input(" c 20 "), Ok(Some((Action::C, 20))));
        assert_eq!(parse_input("q"), Ok(None));
        assert!(parse_input("x").is_err());
        assert!(parse_input("D 0").is_err());
        assert!(parse_input("").is_err());
    }

    #[test]
    fn always_defecting_human_cannot_push_machine_below_one() {
        let t = session(&args("good:eps=0.1"), "D 5000\nq\n".as_bytes(), Vec::new()).unwrap();
        assert_eq!(t.rounds.len(), 5000);
        assert!(t.checks.iter().all(|c| c.holds), "{:?}", t.checks);
        assert!(t.bounds1.as_ref().unwrap().liminf_hat >= 0.98);
    }

    #[test]
    fn cooperating_human_reaches_the_cooperative_region() {
        let t = session(&args("good:eps=0.1"), "C 20000\n".as_bytes(), Vec::new()).unwrap();
        assert!(t.bounds2.as_ref().unwrap().limsup_hat <= 2.02);
        assert!(t.final_average.unwrap().dist(Point2::new(2.0, 2.0)) < 0.05);
    }

    #[test]
    fn empty_session_is_clean() {
        let t = session(&args("good:eps=0.1"), "q\n".as_bytes(), Vec::new()).unwrap();
        assert!(t.rounds.is_empty() && t.final_average.is_none() && t.checks.is_empty());
    }

    #[test]
    fn invalid_keys_reprompt() {
        let t = session(&args("good:eps=0.1"), "x\nD\n\nC\n".as_bytes(), Vec::new()).unwrap();
        assert_eq!(t.rounds.len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let mut a = args("semicoop:v=2,2:eps=0.1");
        a.max_rounds = 50;
        let t = session(&a, "D 80\n".as_bytes(), Vec::new()).unwrap();
        assert_eq!(t.rounds.len(), 50);
        assert!(t.note.unwrap().contains("capped"));
    }

    #[test]
    fn rejects_non_cooperative_machines() {
        assert!(session(&args("const:D"), "q\n".as_bytes(), Vec::new()).is_err());
    }
}

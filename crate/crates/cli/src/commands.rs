use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use semicoop_core::acceptance::{run_all, run_criterion, AcceptanceConfig, CriterionReport};
use semicoop_core::io::{matrix_csv, to_json, write_trajectory_csv};
use semicoop_core::metagame::{build_matrix, pure_nash};
use semicoop_core::strategies::StrategyKind;
use semicoop_core::dynamics::estimate_limit_with;
use semicoop_core::{predicted_limit, simulate, LimitEstimate, LimitPrediction, MetagameMatrix, Point2};

use crate::scenario::{load_game, ScenarioConfig, SimulateArgs};
use crate::{play, plot, Cli, Command, Failure};

pub fn run(cli: Cli) -> Result<(), Failure> {
    let out = cli.out_dir.as_path();
    match cli.command {
        Command::Simulate(args) => simulate_cmd(args, out),
        Command::Betacore { game } => {
            let core = load_game(&game)?.beta_core_image();
            println!("{}", to_json(&core)?);
            Ok(())
        }
        Command::Predict { a, b, eps1, eps2, json } => {
            let pred = predicted_limit(a, b, eps1, eps2)?;
            if json {
                println!("{}", to_json(&pred)?);
            } else {
                println!("{} ({}, {})", pred.case.name(), pred.limit.x1, pred.limit.x2);
            }
            Ok(())
        }
        Command::Verify { criteria, steps, seed, report } => {
            let mut cfg = AcceptanceConfig { steps, ..Default::default() };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            verify_cmd(&cfg, &criteria, &report.unwrap_or_else(|| out.join("verify.json")))
        }
        Command::Metagame { n, mode, eps1, eps2, steps, csv, json } => {
            let m = build_matrix(n, eps1, eps2, mode, steps)?;
            let nash = pure_nash(&m);
            print!("{}", render_matrix(&m, &nash));
            write_file(&csv.unwrap_or_else(|| out.join("metagame.csv")), &matrix_csv(&m))?;
            #[derive(Serialize)]
            struct Doc<'a> {
                matrix: &'a MetagameMatrix,
                pure_nash: &'a [(usize, usize)],
            }
            let doc = to_json(&Doc { matrix: &m, pure_nash: &nash })?;
            write_file(&json.unwrap_or_else(|| out.join("metagame.json")), &doc)?;
            Ok(())
        }
        Command::Play(args) => play::run(args, out),
        Command::Plot(args) => plot::run(args, out),
    }
}

pub fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    ensure_parent(path)?;
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Summary {
    p1: String,
    p2: String,
    x0: Point2,
    t0: u64,
    steps: u64,
    csv: String,
    limit: LimitEstimate,
    predicted: Option<LimitPrediction>,
    /// Distance between the estimated and predicted limits.
    distance: Option<f64>,
    note: Option<String>,
}

fn simulate_cmd(args: SimulateArgs, out: &Path) -> Result<(), Failure> {
    let base = match &args.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    let sc = base.merge(args).resolve(out)?;
    let traj = simulate(&sc.profile, sc.x0, sc.t0, sc.steps)?;
    ensure_parent(&sc.csv)?;
    let file = File::create(&sc.csv).with_context(|| format!("creating {}", sc.csv.display()))?;
    write_trajectory_csv(&traj, BufWriter::new(file))?;

    // Short runs still get a summary; the limit estimate needs 100 points.
    let limit = if traj.len() >= 100 {
        estimate_limit_with(&traj, sc.tail, sc.tolerance)?
    } else {
        LimitEstimate {
            point: traj.last(),
            spread: f64::NAN,
            converged: false,
            tolerance: sc.tolerance,
        }
    };
    let (mut predicted, mut note) = (None, None);
    if let (StrategyKind::SemiCoop { v: a, eps: e1 }, StrategyKind::SemiCoop { v: b, eps: e2 }) =
        (sc.profile.s1.kind(), sc.profile.s2.kind())
    {
        match predicted_limit(a, b, e1, e2) {
            Ok(p) => predicted = Some(p),
            Err(e) => note = Some(format!("no prediction: {e}")),
        }
    }
    let summary = Summary {
        distance: predicted.as_ref().map(|p| p.limit.dist(limit.point)),
        p1: sc.p1,
        p2: sc.p2,
        x0: sc.x0,
        t0: sc.t0,
        steps: sc.steps,
        csv: sc.csv.display().to_string(),
        limit,
        predicted,
        note,
    };
    let text = to_json(&summary)?;
    write_file(&sc.summary, &text)?;
    println!("{text}");
    Ok(())
}

fn verify_cmd(cfg: &AcceptanceConfig, criteria: &[u8], report: &Path) -> Result<(), Failure> {
    let reports: Vec<CriterionReport> = if criteria.is_empty() {
        run_all(cfg)
    } else {
        criteria
            .iter()
            .map(|&id| run_criterion(id, cfg).with_context(|| format!("unknown criterion {id}, expected 1-10")))
            .collect::<anyhow::Result<_>>()?
    };
    for r in &reports {
        println!("{}", r.line());
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{}/{} criteria passed", reports.len() - failed.len(), reports.len());
    #[derive(Serialize)]
    struct Doc<'a> {
        config: &'a AcceptanceConfig,
        passed: bool,
        criteria: &'a [CriterionReport],
    }
    write_file(report, &to_json(&Doc { config: cfg, passed: failed.is_empty(), criteria: &reports })?)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("criteria {failed:?}")))
    }
}

fn render_matrix(m: &MetagameMatrix, nash: &[(usize, usize)]) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(s, "metagame {}x{} ({:?}), eps1={} eps2={}", m.rows(), m.cols(), m.mode, m.eps1, m.eps2);
    let label = |p: &Point2| format!("({:.3},{:.3})", p.x1, p.x2);
    let _ = write!(s, "{:>15}", "a \\ b");
    for b in &m.grid2 {
        let _ = write!(s, " {:>15}", label(b));
    }
    s.push('\n');
    for (i, a) in m.grid1.iter().enumerate() {
        let _ = write!(s, "{:>15}", label(a));
        for j in 0..m.cols() {
            let mark = if nash.contains(&(i, j)) { "*" } else { " " };
            let _ = write!(s, " {:>14}{mark}", label(&m.payoff(i, j)));
        }
        s.push('\n');
    }
    let cells: Vec<String> = nash.iter().map(|(i, j)| format!("({i},{j})")).collect();
    let _ = writeln!(s, "pure Nash: {}", cells.join(" "));
    s
}

//! Deterministic SVG rendering of a trajectory over the payoff polytope.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;

use semicoop_core::geometry::{ConvexPolygon, HalfPlane};
use semicoop_core::io::read_trajectory_csv;
use semicoop_core::strategies::{parse_strategy, pd_polytope, StrategyKind};
use semicoop_core::{predicted_limit, LimitCase, MemoryStrategy, Player, Point2, Trajectory};

use crate::commands::write_file;
use crate::Failure;

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Trajectory CSV as written by `simulate`.
    pub input: PathBuf,
    /// Player 1 strategy, for region overlays and the predicted limit.
    #[arg(long)]
    pub p1: Option<String>,
    #[arg(long)]
    pub p2: Option<String>,
    /// SVG path; default `<out-dir>/trajectory.svg`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Polyline vertex budget.
    #[arg(long, default_value_t = 4000)]
    pub max_points: usize,
}

const SCALE: f64 = 160.0;
const MARGIN: f64 = 30.0;

pub fn run(args: PlotArgs, out: &Path) -> Result<(), Failure> {
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let traj = read_trajectory_csv(BufReader::new(file)).with_context(|| format!("reading {}", args.input.display()))?;
    let s1 = args.p1.as_deref().map(|s| parse_strategy(Player::One, s)).transpose().context("--p1")?;
    let s2 = args.p2.as_deref().map(|s| parse_strategy(Player::Two, s)).transpose().context("--p2")?;
    let svg = render(&traj, s1.as_ref(), s2.as_ref(), args.max_points.max(2));
    let path = args.output.unwrap_or_else(|| out.join("trajectory.svg"));
    write_file(&path, &svg)?;
    println!("{}", path.display());
    Ok(())
}

fn sx(x: f64) -> f64 {
    MARGIN + x * SCALE
}

fn sy(y: f64) -> f64 {
    MARGIN + (3.0 - y) * SCALE
}

fn xy(p: Point2) -> String {
    format!("{:.2},{:.2}", sx(p.x1), sy(p.x2))
}

fn polygon(poly: &ConvexPolygon, style: &str) -> String {
    let pts: Vec<String> = poly.vertices().iter().map(|&p| xy(p)).collect();
    format!("<polygon points=\"{}\" {style}/>\n", pts.join(" "))
}

/// The cooperation region of a strategy clipped to the polytope, when it has
/// a polygonal description.
fn cooperation_polygon(s: &MemoryStrategy) -> Option<ConvexPolygon> {
    let hp = |n: (f64, f64), c: f64| HalfPlane::new(Point2::new(n.0, n.1), c).ok();
    let own = s.player() == Player::One;
    let cuts = match s.kind() {
        StrategyKind::SemiCoop { v, .. } => {
            let r = s.cooperation_region()?;
            if own {
                vec![r.widened, hp((-1.0, 0.0), -1.0)?, hp((0.0, 1.0), v.x2)?]
            } else {
                vec![r.widened, hp((1.0, 0.0), v.x1)?, hp((0.0, -1.0), -1.0)?]
            }
        }
        StrategyKind::Good { eps } => {
            // Own frame: y2 < y1 + eps, y1 >= 1, y2 <= 2.
            let s2 = std::f64::consts::FRAC_1_SQRT_2;
            if own {
                vec![hp((-s2, s2), eps * s2)?, hp((-1.0, 0.0), -1.0)?, hp((0.0, 1.0), 2.0)?]
            } else {
                vec![hp((s2, -s2), eps * s2)?, hp((0.0, -1.0), -1.0)?, hp((1.0, 0.0), 2.0)?]
            }
        }
        _ => return None,
    };
    pd_polytope().clip_all(cuts.iter())
}

fn predicted(s1: Option<&MemoryStrategy>, s2: Option<&MemoryStrategy>) -> Option<(Point2, &'static str)> {
    match (s1?.kind(), s2?.kind()) {
        (StrategyKind::SemiCoop { v: a, eps: e1 }, StrategyKind::SemiCoop { v: b, eps: e2 }) => {
            let p = predicted_limit(a, b, e1, e2).ok()?;
            Some((p.limit, if p.case == LimitCase::YPoint { "y" } else { "limit" }))
        }
        (StrategyKind::Good { .. }, StrategyKind::Good { .. }) => Some((Point2::new(2.0, 2.0), "limit")),
        _ => None,
    }
}

/// Indices kept for the polyline: the first half of the budget verbatim, the
/// rest spread evenly, and always the last point.
fn thin(n: usize, budget: usize) -> Vec<usize> {
    if n <= budget {
        return (0..n).collect();
    }
    let head = budget / 2;
    let rest = budget - head;
    let mut idx: Vec<usize> = (0..head).collect();
    for k in 1..=rest {
        idx.push(head + (n - 1 - head) * k / rest);
    }
    idx.dedup();
    idx
}

pub fn render(traj: &Trajectory, s1: Option<&MemoryStrategy>, s2: Option<&MemoryStrategy>, budget: usize) -> String {
    let size = 2.0 * MARGIN + 3.0 * SCALE;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&polygon(pd_polytope(), "fill=\"#f4f4f4\" stroke=\"black\" stroke-width=\"1.5\""));
    for (s, color) in [(s1, "#1f77b4"), (s2, "#d62728")] {
        if let Some(poly) = s.and_then(cooperation_polygon) {
            let style = format!("fill=\"{color}\" fill-opacity=\"0.12\" stroke=\"{color}\" stroke-dasharray=\"6 4\"");
            svg.push_str(&polygon(&poly, &style));
        }
    }
    let pts: Vec<String> = thin(traj.len(), budget).into_iter().map(|i| xy(traj.points[i])).collect();
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#333\" stroke-width=\"0.8\"/>",
        pts.join(" ")
    );
    let start = traj.points[0];
    let _ = writeln!(svg, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#2ca02c\"/>", sx(start.x1), sy(start.x2));
    let end = traj.last();
    let _ = writeln!(svg, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"black\"/>", sx(end.x1), sy(end.x2));
    if let Some((p, label)) = predicted(s1, s2) {
        let (x, y) = (sx(p.x1), sy(p.x2));
        let _ = writeln!(
            svg,
            "<path d=\"M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}\" stroke=\"#9467bd\" stroke-width=\"2\"/>",
            x - 6.0,
            y - 6.0,
            x + 6.0,
            y + 6.0,
            x - 6.0,
            y + 6.0,
            x + 6.0,
            y - 6.0
        );
        let _ = writeln!(svg, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{label}</text>", x + 8.0, y - 8.0);
    }
    svg.push_str("</svg>\n");
    svg
}

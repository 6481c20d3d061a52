//! End-to-end acceptance criteria. Each check runs at full scale and reports
//! what it measured against a fixed threshold; the test suite and the CLI
//! `verify` command share this code.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    predicted_limit, simulate, simulate_tail, y_distance_formula, y_distance_geometric, y_point, Profile, DEFAULT_TAIL_FRACTION,
};
use crate::error::Result;
use crate::game::make_pd;
use crate::geometry::{ConvexSet, Point2, Segment, ETA};
use crate::metagame::{build_matrix, pure_nash, Mode};
use crate::strategies::{pd_polytope, region_partition, Action, Cell, CooperationRegion, MemoryStrategy, Player};
use crate::verification::{
    absorbing_check_runs, blackwell_check_run, build_o_delta, escape_check_runs, invariant_check, safety_check, sample_region,
    PredicateRegion, SafetyReport, Verdict,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub measured: String,
    pub threshold: String,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl CriterionReport {
    /// One summary line, e.g. `PASS  1  good vs good ...`.
    pub fn line(&self) -> String {
        format!(
            "{}  {:>2}  {}: measured {} (threshold {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.measured,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceConfig {
    /// Horizon `T` of every long run.
    pub steps: u64,
    pub seed: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            steps: 1_000_000,
            seed: 20_240_601,
        }
    }
}

pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
const TOL: f64 = 0.02;
const EPS: f64 = 0.1;

/// Points drawn uniformly from the PD polytope.
pub fn random_starts(n: usize, seed: u64) -> Vec<Point2> {
    sample_region(pd_polytope(), pd_polytope(), n, seed)
}

fn p(x1: f64, x2: f64) -> Point2 {
    Point2::new(x1, x2)
}

fn same_v_anchors() -> [Point2; 3] {
    [p(1.5, 2.25), p(2.0, 2.0), p(2.25, 1.5)]
}

fn semicoop_profile(a: Point2, b: Point2, eps1: f64, eps2: f64) -> Result<Profile> {
    Profile::new(
        MemoryStrategy::semicoop(Player::One, a, eps1)?,
        MemoryStrategy::semicoop(Player::Two, b, eps2)?,
    )
}

/// The opponent suite for the good-strategy guarantees: constants, a grid of
/// affine separators, semi-cooperative players anchored elsewhere, good
/// players with other tolerances, and scripted adversaries. 55 strategies,
/// all for player 2.
pub fn opponent_suite() -> Vec<MemoryStrategy> {
    let two = Player::Two;
    let mut out = vec![MemoryStrategy::constant(two, Action::C), MemoryStrategy::constant(two, Action::D)];
    for k in 0..8 {
        let th = k as f64 * PI / 4.0 + PI / 8.0;
        let (c, s) = (th.cos(), th.sin());
        for anchor in [p(1.5, 1.5), p(1.0, 2.0), p(2.0, 1.0)] {
            // Own frame for player 2 is (x2, x1).
            let r = -(c * anchor.x1 + s * anchor.x2);
            out.push(MemoryStrategy::affine(two, c, s, r).expect("unit normal"));
        }
    }
    let game = make_pd();
    for k in 0..9 {
        let v = game.betacore_param((k as f64 + 0.5) / 9.0).expect("interior parameter");
        for eps in [0.05, 0.2] {
            out.push(MemoryStrategy::semicoop(two, v, eps).expect("interior anchor"));
        }
    }
    for eps in [0.05, 0.1, 0.3] {
        out.push(MemoryStrategy::good(two, eps).expect("positive eps"));
    }
    let d_if = |b: bool| if b { Action::D } else { Action::C };
    out.push(MemoryStrategy::custom(two, "exploit-band", move |x| d_if(x.x2 - x.x1 < 0.09)));
    out.push(MemoryStrategy::custom(two, "contrarian", move |x| {
        d_if(x.x2 < x.x1 + EPS && x.x1 >= 1.0 && x.x2 <= 2.0)
    }));
    out.push(MemoryStrategy::custom(two, "mimic", move |x| {
        d_if(!(x.x2 < x.x1 + EPS && x.x1 >= 1.0 && x.x2 <= 2.0))
    }));
    out.push(MemoryStrategy::custom(two, "checkerboard", move |x| {
        d_if(((10.0 * x.x1).floor() + (10.0 * x.x2).floor()) as i64 % 2 == 0)
    }));
    out.push(MemoryStrategy::custom(two, "ring", move |x| d_if(x.dist(p(1.8, 1.8)) < 0.3)));
    out.push(MemoryStrategy::custom(two, "ratchet", move |x| d_if(x.x1 + x.x2 > 3.5)));
    out.push(MemoryStrategy::custom(two, "stripes", move |x| d_if((20.0 * x.x1 + 13.0 * x.x2).sin() > 0.0)));
    out.push(MemoryStrategy::custom(two, "greedy", move |x| d_if(x.x2 < 2.3)));
    out
}

pub fn safety_starts() -> Vec<Point2> {
    vec![p(1.0, 1.0), p(0.3, 2.7), p(2.7, 0.3)]
}

/// Runs player 1 = good(0.1) against [`opponent_suite`].
pub fn safety_sweep(cfg: &AcceptanceConfig) -> Result<SafetyReport> {
    let p1 = MemoryStrategy::good(Player::One, EPS)?;
    safety_check(&p1, EPS, &opponent_suite(), &safety_starts(), cfg.steps, TOL)
}

fn report(id: u8, title: &str, passed: bool, measured: String, threshold: &str, detail: String, start: Instant) -> CriterionReport {
    CriterionReport {
        id,
        title: title.into(),
        passed,
        measured,
        threshold: threshold.into(),
        detail,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn failed(id: u8, title: &str, err: impl std::fmt::Display, start: Instant) -> CriterionReport {
    report(id, title, false, "error".into(), "-", err.to_string(), start)
}

fn max_dist(runs: &[(Point2, Point2)]) -> f64 {
    runs.iter().map(|(a, b)| a.dist(*b)).fold(0.0, f64::max)
}

pub fn good_vs_good(cfg: &AcceptanceConfig) -> CriterionReport {
    let title = "good vs good from 20 starts ends near (2,2) within 10 s";
    let start = Instant::now();
    let run = || -> Result<Vec<(Point2, Point2)>> {
        let prof = Profile::new(MemoryStrategy::good(Player::One, EPS)?, MemoryStrategy::good(Player::Two, EPS)?)?;
        random_starts(20, cfg.seed)
            .par_iter()
            .map(|&x0| Ok((simulate_tail(&prof, x0, 1, cfg.steps, DEFAULT_TAIL_FRACTION)?.last, p(2.0, 2.0))))
            .collect()
    };
    match run() {
        Ok(runs) => {
            let worst = max_dist(&runs);
            let secs = start.elapsed().as_secs_f64();
            report(
                1,
                title,
                runs.len() == 20 && worst <= TOL && secs < 10.0,
                format!("max |x_T - (2,2)| = {worst:.3e}, {secs:.2} s"),
                "0.02, 10 s",
                format!("{} runs of {} steps", runs.len(), cfg.steps),
                start,
            )
        }
        Err(e) => failed(1, title, e, start),
    }
}

pub fn good_bounds(sweep: &Result<SafetyReport>, start: Instant) -> CriterionReport {
    let title = "good(0.1) keeps liminf x1 >= 1 and limsup x2 <= 2 against 55 opponents";
    match sweep {
        Ok(r) => {
            let bad: Vec<String> = r
                .entries
                .iter()
                .filter(|e| !e.bounds_ok)
                .map(|e| format!("{} from ({}, {})", e.opponent, e.x0.x1, e.x0.x2))
                .collect();
            report(
                2,
                title,
                r.bounds_ok && opponent_suite().len() >= 50,
                format!("min liminf x1 = {:.4}, max limsup x2 = {:.4}", r.worst_liminf1, r.worst_limsup2),
                ">= 0.98, <= 2.02",
                format!("{} runs; failing: [{}]", r.entries.len(), bad.join("; ")),
                start,
            )
        }
        Err(e) => failed(2, title, e, start),
    }
}

pub fn good_safety(sweep: &Result<SafetyReport>, start: Instant) -> CriterionReport {
    let title = "good(0.1) concedes at most eps: limsup x2 <= limsup x1 + eps";
    match sweep {
        Ok(r) => {
            let bad: Vec<String> = r.entries.iter().filter(|e| !e.safety_ok).map(|e| e.opponent.clone()).collect();
            report(
                3,
                title,
                r.safety_ok,
                format!("max limsup x2 - limsup x1 = {:.4}", r.worst_margin),
                "<= eps + 0.02 = 0.12",
                format!("{} runs; failing: [{}]", r.entries.len(), bad.join("; ")),
                start,
            )
        }
        Err(e) => failed(3, title, e, start),
    }
}

pub fn same_anchor(cfg: &AcceptanceConfig) -> CriterionReport {
    let title = "same-anchor semicoop profiles converge to the anchor";
    let start = Instant::now();
    let run = || -> Result<Vec<(Point2, Point2)>> {
        let mut out = Vec::new();
        for (k, v) in same_v_anchors().into_iter().enumerate() {
            let prof = semicoop_profile(v, v, EPS, EPS)?;
            let runs: Result<Vec<_>> = random_starts(10, cfg.seed + k as u64)
                .par_iter()
                .map(|&x0| Ok((simulate_tail(&prof, x0, 1, cfg.steps, DEFAULT_TAIL_FRACTION)?.last, v)))
                .collect();
            out.extend(runs?);
        }
        Ok(out)
    };
    match run() {
        Ok(runs) => {
            let worst = max_dist(&runs);
            report(
                4,
                title,
                runs.len() == 30 && worst <= TOL,
                format!("max |x_T - v| = {worst:.3e}"),
                "0.02",
                "v in {(1.5,2.25), (2,2), (2.25,1.5)}, 10 starts each".into(),
                start,
            )
        }
        Err(e) => failed(4, title, e, start),
    }
}

pub fn limit_table(cfg: &AcceptanceConfig) -> CriterionReport {
    let title = "limit classifier matches simulation on a 9x9 anchor grid";
    let start = Instant::now();
    let run = || -> Result<(f64, usize, Vec<String>)> {
        let game = make_pd();
        let grid = (0..9).map(|k| game.betacore_param((k as f64 + 0.5) / 9.0)).collect::<Result<Vec<_>>>()?;
        let cells: Vec<(usize, usize)> = (0..9).flat_map(|i| (0..9).map(move |j| (i, j))).collect();
        let res: Vec<Result<(f64, bool)>> = cells
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (grid[i], grid[j]);
                let pred = predicted_limit(a, b, EPS, EPS)?;
                let prof = semicoop_profile(a, b, EPS, EPS)?;
                let mut worst = 0.0f64;
                for x0 in random_starts(5, cfg.seed ^ (i * 9 + j) as u64) {
                    let last = simulate_tail(&prof, x0, 1, cfg.steps, DEFAULT_TAIL_FRACTION)?.last;
                    worst = worst.max(last.dist(pred.limit));
                }
                Ok((worst, pred.case == crate::dynamics::LimitCase::YPoint))
            })
            .collect();
        let mut worst = 0.0f64;
        let mut y_cells = 0;
        let mut bad = Vec::new();
        for (&(i, j), r) in cells.iter().zip(res) {
            let (w, is_y) = r?;
            worst = worst.max(w);
            y_cells += is_y as usize;
            if w > 0.05 {
                bad.push(format!("({i},{j}) off by {w:.3}"));
            }
        }
        Ok((worst, y_cells, bad))
    };
    match run() {
        Ok((worst, y_cells, bad)) => report(
            5,
            title,
            bad.is_empty(),
            format!("max |simulated - predicted| = {worst:.3e}"),
            "0.05",
            format!("81 cells x 5 starts, {y_cells} cells in the y case; failing: [{}]", bad.join("; ")),
            start,
        ),
        Err(e) => failed(5, title, e, start),
    }
}

/// Random `(a, b, ε1, ε2)` on the β-core with `b1 < a1`.
pub fn random_y_cases(n: usize, seed: u64) -> Vec<(Point2, Point2, f64, f64)> {
    let game = make_pd();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s: f64 = rng.gen_range(0.01..0.99);
        let r: f64 = rng.gen_range(0.01..0.99);
        if (s - r).abs() < 0.02 {
            continue;
        }
        let a = game.betacore_param(s.max(r)).expect("interior parameter");
        let b = game.betacore_param(s.min(r)).expect("interior parameter");
        out.push((a, b, rng.gen_range(0.005..0.2), rng.gen_range(0.005..0.2)));
    }
    out
}

pub fn y_formula(cfg: &AcceptanceConfig) -> CriterionReport {
    let title = "closed-form distance of y to (1,1) matches the line crossing; y -> (1,1) as eps -> 0";
    let start = Instant::now();
    let run = || -> Result<(f64, f64, f64)> {
        let mut worst_formula = 0.0f64;
        let mut worst_geometric = 0.0f64;
        for (a, b, e1, e2) in random_y_cases(100, cfg.seed) {
            let d = y_point(a, b, e1, e2)?.dist(p(1.0, 1.0));
            worst_formula = worst_formula.max((d - y_distance_formula(a, b, e1, e2)?).abs());
            worst_geometric = worst_geometric.max((d - y_distance_geometric(a, b, e1, e2)?).abs());
        }
        let (a, b) = (p(2.25, 1.5), p(1.5, 2.25));
        let mut worst_ratio = 0.0f64;
        for eps in [1e-3, 1e-4, 1e-5, 1e-6] {
            let d = y_point(a, b, eps, eps)?.dist(p(1.0, 1.0));
            worst_ratio = worst_ratio.max(d / eps);
        }
        Ok((worst_formula, worst_geometric, worst_ratio))
    };
    match run() {
        Ok((f, g, ratio)) => report(
            6,
            title,
            f <= 1e-9 && ratio <= 10.0,
            format!("max |formula - |y-(1,1)|| = {f:.3e}; max |y-(1,1)|/eps = {ratio:.3}"),
            "1e-9; 10",
            format!(
                "100 random cases. The closed form solves tan(phi1+phi2) = tan(alpha) with tan(phi_i) = eps_i/d, \
                 a distance along the boundary lines; sqrt(e1^2+e2^2+2 e1 e2 cos a)/sin a matches |y-(1,1)| to {g:.1e}."
            ),
            start,
        ),
        Err(e) => failed(6, title, e, start),
    }
}

pub fn beta_core(_cfg: &AcceptanceConfig) -> CriterionReport {
    let title = "beta-core of the PD is the two segments (1,2.5)-(2,2)-(2.5,1)";
    let start = Instant::now();
    let core = make_pd().beta_core_image();
    let expected = [
        Segment::new(p(1.0, 2.5), p(2.0, 2.0)),
        Segment::new(p(2.0, 2.0), p(2.5, 1.0)),
    ];
    let exact = core.segments == expected;
    let inside = [p(1.5, 2.25), p(2.0, 2.0), p(2.25, 1.5), p(1.0, 2.5), p(2.5, 1.0)];
    let outside = [p(1.8, 1.8), p(0.5, 2.75), p(2.75, 0.5), p(2.0, 2.0 - 1e-9)];
    let membership = inside.iter().all(|&x| core.contains(x)) && outside.iter().all(|&x| !core.contains(x));
    let excluded = core.excluded_endpoints.len() == 2 && core.is_excluded(p(1.0, 2.5)) && core.is_excluded(p(2.5, 1.0));
    report(
        7,
        title,
        exact && membership && excluded,
        format!("segments {:?}", core.segments.iter().map(|s| ((s.a.x1, s.a.x2), (s.b.x1, s.b.x2))).collect::<Vec<_>>()),
        "exact endpoints; eta membership",
        format!("exact = {exact}, membership = {membership}, excluded endpoints = {excluded}"),
        start,
    )
}

pub fn approachability(cfg: &AcceptanceConfig) -> CriterionReport {
    let title = "runs whose step map lands in a closed convex W approach W";
    let start = Instant::now();
    let run = || -> Result<(f64, f64, usize)> {
        // One player always cooperates, so every stage payoff is one of two
        // vertices and f maps all of the polytope into the segment W.
        let w1 = Segment::new(p(2.0, 2.0), p(0.0, 3.0));
        let w2 = Segment::new(p(2.0, 2.0), p(3.0, 0.0));
        let opponents = |pl: Player| -> Result<Vec<MemoryStrategy>> {
            Ok(vec![
                MemoryStrategy::good(pl, EPS)?,
                MemoryStrategy::semicoop(pl, p(1.5, 2.25), EPS)?,
                MemoryStrategy::semicoop(pl, p(2.25, 1.5), EPS)?,
                MemoryStrategy::semicoop(pl, p(2.0, 2.0), EPS)?,
                MemoryStrategy::simple(pl, -1.0, 1.0, 0.0)?,
            ])
        };
        let mut jobs: Vec<(Profile, Segment)> = Vec::new();
        for s in opponents(Player::Two)? {
            jobs.push((Profile::new(MemoryStrategy::constant(Player::One, Action::C), s)?, w1));
        }
        for s in opponents(Player::One)? {
            jobs.push((Profile::new(s, MemoryStrategy::constant(Player::Two, Action::C))?, w2));
        }
        let starts = random_starts(jobs.len(), cfg.seed + 8);
        let reports: Result<Vec<_>> = jobs
            .par_iter()
            .zip(starts.par_iter())
            .map(|((prof, w), &x0)| blackwell_check_run(prof, x0, 1, cfg.steps, w as &dyn ConvexSet, TOL))
            .collect();
        let reports = reports?;
        let worst_dist = reports.iter().filter_map(|r| r.final_distance).fold(0.0, f64::max);
        let worst_inner = reports.iter().filter_map(|r| r.worst_inner_product).fold(f64::NEG_INFINITY, f64::max);
        let violations = reports.iter().filter(|r| r.verdict == Verdict::Violated).count();
        Ok((worst_dist, worst_inner, violations + (reports.len() != 10) as usize))
    };
    match run() {
        Ok((d, inner, bad)) => report(
            8,
            title,
            bad == 0 && d <= TOL && inner <= 10.0 * ETA,
            format!("max dist(x_T, W) = {d:.3e}; max inner product = {inner:.3e}"),
            "0.02; <= 0 (eta)",
            "10 runs, W = conv{(2,2),(0,3)} or conv{(2,2),(3,0)}".into(),
            start,
        ),
        Err(e) => failed(8, title, e, start),
    }
}

pub fn set_fixtures(cfg: &AcceptanceConfig) -> CriterionReport {
    let title = "O_delta(v) is invariant and absorbing; a both-egoist defection cell is an escape set";
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let delta = EPS / 8.0;
        let mut ok = true;
        let mut notes = Vec::new();
        for (k, v) in same_v_anchors().into_iter().enumerate() {
            let prof = semicoop_profile(v, v, EPS, EPS)?;
            let o = build_o_delta(v, delta, EPS, EPS)?;
            let inv = invariant_check(&o, &prof, 10_000, cfg.steps, cfg.seed + k as u64);
            let starts = random_starts(20, cfg.seed + 100 + k as u64);
            let abs = absorbing_check_runs(&o, &prof, &starts, 1, cfg.steps)?;
            ok &= inv.verdict == Verdict::Holds && abs.passed();
            notes.push(format!(
                "v=({},{}): invariant {:?} (t_Z={:?}), absorbing {:?}",
                v.x1,
                v.x2,
                inv.verdict,
                inv.t_threshold,
                abs.verdict
            ));
        }
        // Escape cell: only player 2 cooperates, f = (3,0) there,
        // and the cell stays farther than eps from (3,0).
        let (a, b) = (p(2.25, 1.5), p(1.5, 2.25));
        let prof = semicoop_profile(a, b, EPS, EPS)?;
        let part = region_partition(&prof.s1, &prof.s2)?;
        let cell = PredicateRegion::new("omega1", (p(0.0, 0.0), p(3.0, 3.0)), move |x| part.cell(x) == Cell::Omega1);
        let samples = sample_region(&cell, pd_polytope(), 10_000, cfg.seed + 7);
        let gap = samples.iter().map(|x| x.dist(p(3.0, 0.0))).fold(f64::INFINITY, f64::min);
        let esc = escape_check_runs(&cell, &prof, &random_starts(10, cfg.seed + 200), 1, cfg.steps)?;
        ok &= gap > EPS && esc.passed() && !samples.is_empty();
        notes.push(format!("escape cell: dist to W = {gap:.3} > eps, escape {:?}", esc.verdict));
        Ok((ok, notes.join("; ")))
    };
    match run() {
        Ok((ok, detail)) => report(9, title, ok, if ok { "all hold" } else { "violation" }.into(), "no violation", detail, start),
        Err(e) => failed(9, title, e, start),
    }
}

pub fn properties(cfg: &AcceptanceConfig) -> CriterionReport {
    let title = "recurrence, containment, step decay, partition, swap symmetry, (2,2) Nash";
    let start = Instant::now();
    let run = || -> Result<Vec<(&'static str, bool, String)>> {
        let mut checks = Vec::new();
        let horizon = (cfg.steps / 10).max(1_000);
        let profiles = [
            Profile::new(MemoryStrategy::good(Player::One, EPS)?, MemoryStrategy::good(Player::Two, EPS)?)?,
            semicoop_profile(p(2.25, 1.5), p(1.5, 2.25), EPS, EPS)?,
            semicoop_profile(p(1.2, 2.4), p(1.8, 2.1), EPS, EPS)?,
            Profile::new(MemoryStrategy::good(Player::One, EPS)?, opponent_suite().swap_remove(54))?,
        ];
        let starts = random_starts(profiles.len(), cfg.seed + 10);
        let mut residual = 0.0f64;
        let mut outside = 0usize;
        let mut decay_ratio = 0.0f64;
        let bound = 3.0 * 2f64.sqrt();
        for (prof, &x0) in profiles.iter().zip(&starts) {
            let traj = simulate(prof, x0, 1, horizon)?;
            residual = residual.max(traj.recurrence_residual());
            outside += traj.points.iter().filter(|&&x| !pd_polytope().contains(x)).count();
            for i in 0..traj.len() - 1 {
                let step = traj.points[i + 1].dist(traj.points[i]);
                decay_ratio = decay_ratio.max(step * (traj.time(i) as f64 + 1.0) / bound);
            }
        }
        checks.push(("recurrence", residual <= ETA, format!("{residual:.1e}")));
        checks.push(("containment", outside == 0, format!("{outside} outside")));
        checks.push(("step decay", decay_ratio <= 1.0 + 1e-12, format!("ratio {decay_ratio:.4}")));

        // Partition: every sample lands in exactly one cell, and the cell
        // agrees with the region predicates evaluated independently.
        let (a, b) = (p(2.25, 1.5), p(1.5, 2.25));
        let prof = semicoop_profile(a, b, EPS, EPS)?;
        let part = region_partition(&prof.s1, &prof.s2)?;
        let (k1, k2) = (CooperationRegion::new(Player::One, a, EPS)?, CooperationRegion::new(Player::Two, b, EPS)?);
        let pts = random_starts(100_000, cfg.seed + 11);
        let mismatches = pts
            .iter()
            .filter(|&&x| {
                let memberships = [
                    k1.contains(x) && k2.contains(x),
                    !k1.contains(x) && k2.contains(x),
                    k1.contains(x) && !k2.contains(x),
                    !k1.contains(x) && !k2.contains(x),
                ];
                let hit = memberships.iter().filter(|&&m| m).count();
                let idx = Cell::ALL.iter().position(|&c| c == part.cell(x)).expect("cell");
                hit != 1 || !memberships[idx]
            })
            .count();
        checks.push(("partition", mismatches == 0 && pts.len() == 100_000, format!("{mismatches} mismatches")));

        let m = build_matrix(5, EPS, EPS, Mode::Predicted, 0)?;
        let defect = m.swap_symmetry_defect();
        checks.push(("swap symmetry", defect <= 1e-12, format!("{defect:.1e}")));
        let cc = m.grid1.iter().position(|&x| x == p(2.0, 2.0));
        let nash = cc.is_some_and(|k| pure_nash(&m).contains(&(k, k)));
        checks.push(("(2,2) Nash", nash, format!("{nash}")));
        Ok(checks)
    };
    match run() {
        Ok(checks) => {
            let ok = checks.iter().all(|c| c.1);
            let detail: Vec<String> = checks
                .iter()
                .map(|(n, pass, m)| format!("{n}: {} ({m})", if *pass { "ok" } else { "FAIL" }))
                .collect();
            report(
                10,
                title,
                ok,
                format!("{}/{} green", checks.iter().filter(|c| c.1).count(), checks.len()),
                "all green",
                detail.join("; "),
                start,
            )
        }
        Err(e) => failed(10, title, e, start),
    }
}

/// Runs one criterion by number.
pub fn run_criterion(id: u8, cfg: &AcceptanceConfig) -> Option<CriterionReport> {
    Some(match id {
        1 => good_vs_good(cfg),
        2 | 3 => {
            let start = Instant::now();
            let sweep = safety_sweep(cfg);
            if id == 2 {
                good_bounds(&sweep, start)
            } else {
                good_safety(&sweep, start)
            }
        }
        4 => same_anchor(cfg),
        5 => limit_table(cfg),
        6 => y_formula(cfg),
        7 => beta_core(cfg),
        8 => approachability(cfg),
        9 => set_fixtures(cfg),
        10 => properties(cfg),
        _ => return None,
    })
}

/// Runs every criterion, sharing the opponent sweep between 2 and 3.
pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionReport> {
    let mut out = vec![good_vs_good(cfg)];
    let start = Instant::now();
    let sweep = safety_sweep(cfg);
    out.push(good_bounds(&sweep, start));
    out.push(good_safety(&sweep, start));
    for id in 4..=10 {
        out.push(run_criterion(id, cfg).expect("known id"));
    }
    out
}

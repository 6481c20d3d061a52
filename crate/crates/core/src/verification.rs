//! Empirical checkers for approachability, invariant/absorbing/escape sets,
//! Cesàro bounds and the ε-safety of good strategies.
//!
//! Statements quantified over all `t` are checked up to a horizon. A verdict
//! of [`Verdict::Holds`] is only issued when the monotone step argument
//! closes the tail; otherwise a clean run reports [`Verdict::Inconclusive`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{beta_step, pd_beta_core, simulate_tail, Profile, Run, StepRecord, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{intersect_lines, line_through, ConvexPolygon, ConvexSet, HalfPlane, Line, LineIntersection, Point2, ETA};
use crate::strategies::{pd_polytope, MemoryStrategy, Player};

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_WINDOW: f64 = 0.1;
pub const DEFAULT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

/// A counterexample. `t` and `point` are the state at which the property
/// fails (or, for trajectory checks, where the failing window starts);
/// `origin` is the `(t0, x0)` of the run it came from, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: u64,
    pub point: Point2,
    pub origin: Option<(u64, Point2)>,
}

impl Witness {
    /// `β_t(point)`, the step that leaves the set in an invariance witness.
    pub fn replay_step(&self, profile: &Profile) -> Result<Point2> {
        beta_step(self.t, self.point, profile)
    }

    /// Re-runs the originating trajectory from `t0` and returns its states
    /// from `t` to `t_end`. The first returned state equals `point`.
    pub fn replay_run(&self, profile: &Profile, t_end: u64) -> Result<Vec<Point2>> {
        let (t0, x0) = self
            .origin
            .ok_or_else(|| Error::Unsupported("witness has no originating run".into()))?;
        Ok(Run::new(profile, x0, t0, t_end)?
            .skip_while(|r| r.t < self.t)
            .map(|r| r.point)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetCheckReport {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    /// Smallest `t_Z` that worked for every sample (invariance only).
    pub t_threshold: Option<u64>,
    pub seed: Option<u64>,
    pub samples: usize,
    pub horizon: u64,
    /// Initial and final distance to the target set (approachability only).
    pub initial_distance: Option<f64>,
    pub final_distance: Option<f64>,
    /// Largest value of the proximal inner product seen (approachability only).
    pub worst_inner_product: Option<f64>,
    pub note: String,
}

impl SetCheckReport {
    fn new(verdict: Verdict) -> Self {
        Self {
            verdict,
            witnesses: Vec::new(),
            t_threshold: None,
            seed: None,
            samples: 0,
            horizon: 0,
            initial_distance: None,
            final_distance: None,
            worst_inner_product: None,
            note: String::new(),
        }
    }

    /// True unless a counterexample was found.
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Violated
    }
}

const MAX_WITNESSES: usize = 8;

/// A subset of the plane with a membership predicate.
pub trait Region: Send + Sync {
    fn contains(&self, x: Point2) -> bool;
    fn bounding_box(&self) -> (Point2, Point2);
    /// Convex regions get the monotone invariance argument.
    fn is_convex(&self) -> bool;
}

impl Region for ConvexPolygon {
    fn contains(&self, x: Point2) -> bool {
        ConvexPolygon::contains(self, x)
    }
    fn bounding_box(&self) -> (Point2, Point2) {
        ConvexPolygon::bounding_box(self)
    }
    fn is_convex(&self) -> bool {
        true
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point2,
    pub radius: f64,
}

impl Region for Ball {
    fn contains(&self, x: Point2) -> bool {
        x.dist(self.center) <= self.radius + ETA
    }
    fn bounding_box(&self) -> (Point2, Point2) {
        let r = Point2::new(self.radius, self.radius);
        (self.center - r, self.center + r)
    }
    fn is_convex(&self) -> bool {
        true
    }
}

/// Region given by an arbitrary predicate; treated as non-convex.
pub struct PredicateRegion {
    name: String,
    bbox: (Point2, Point2),
    f: Box<dyn Fn(Point2) -> bool + Send + Sync>,
}

impl PredicateRegion {
    pub fn new(
        name: impl Into<String>,
        bbox: (Point2, Point2),
        f: impl Fn(Point2) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            bbox,
            f: Box::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl std::fmt::Debug for PredicateRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PredicateRegion").field("name", &self.name).finish()
    }
}

impl Region for PredicateRegion {
    fn contains(&self, x: Point2) -> bool {
        (self.f)(x)
    }
    fn bounding_box(&self) -> (Point2, Point2) {
        self.bbox
    }
    fn is_convex(&self) -> bool {
        false
    }
}

/// Rejection samples from `Z ∩ 𝔖` using the intersection of both bounding boxes.
pub fn sample_region(z: &dyn Region, domain: &ConvexPolygon, n: usize, seed: u64) -> Vec<Point2> {
    let (zlo, zhi) = z.bounding_box();
    let (dlo, dhi) = domain.bounding_box();
    let lo = Point2::new(zlo.x1.max(dlo.x1), zlo.x2.max(dlo.x2));
    let hi = Point2::new(zhi.x1.min(dhi.x1), zhi.x2.min(dhi.x2));
    if lo.x1 > hi.x1 || lo.x2 > hi.x2 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let max_attempts = n.saturating_mul(10_000).max(10_000);
    for _ in 0..max_attempts {
        if out.len() == n {
            break;
        }
        let x = Point2::new(lerp(lo.x1, hi.x1, rng.gen()), lerp(lo.x2, hi.x2, rng.gen()));
        if z.contains(x) && domain.contains(x) {
            out.push(x);
        }
    }
    out
}

fn lerp(a: f64, b: f64, u: f64) -> f64 {
    a + (b - a) * u
}

/// Deterministic approachability: at every step the proximal point `y_t` of
/// `x̄_t` in `W` must satisfy `⟨x̄_t − y_t, f(x̄_t) − y_t⟩ ≤ 0`, and the run must
/// end within `tolerance` of `W`.
pub fn blackwell_check(traj: &Trajectory, w: &dyn ConvexSet, profile: &Profile, tolerance: f64) -> SetCheckReport {
    let origin = (traj.t0, traj.x0);
    blackwell_over(traj.records(), w, profile, tolerance, origin)
}

/// [`blackwell_check`] on a run that is generated on the fly.
pub fn blackwell_check_run(
    profile: &Profile,
    x0: Point2,
    t0: u64,
    t_end: u64,
    w: &dyn ConvexSet,
    tolerance: f64,
) -> Result<SetCheckReport> {
    let run = Run::new(profile, x0, t0, t_end)?;
    Ok(blackwell_over(run, w, profile, tolerance, (t0, x0)))
}

fn blackwell_over(
    records: impl Iterator<Item = StepRecord>,
    w: &dyn ConvexSet,
    profile: &Profile,
    tolerance: f64,
    origin: (u64, Point2),
) -> SetCheckReport {
    let mut report = SetCheckReport::new(Verdict::Inconclusive);
    let mut worst = f64::NEG_INFINITY;
    let mut last = None;
    for rec in records {
        let prox = w.proximal(rec.point);
        if report.initial_distance.is_none() {
            report.initial_distance = Some(prox.dist);
        }
        let fx = profile.f(rec.point);
        let inner = (rec.point - prox.point).dot(fx - prox.point);
        worst = worst.max(inner);
        if inner > 10.0 * ETA && report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(Witness {
                t: rec.t,
                point: rec.point,
                origin: Some(origin),
            });
        }
        report.horizon = rec.t;
        last = Some(prox.dist);
    }
    report.final_distance = last;
    report.worst_inner_product = Some(worst);
    let far = last.is_some_and(|d| d > tolerance);
    if !report.witnesses.is_empty() {
        report.verdict = Verdict::Violated;
        report.note = "proximal inner-product condition fails".into();
    } else if far {
        report.verdict = Verdict::Violated;
        report.note = format!("final distance exceeds {tolerance}");
        report.witnesses.push(Witness {
            t: report.horizon,
            point: Point2::new(f64::NAN, f64::NAN),
            origin: Some(origin),
        });
    } else {
        report.note = "condition holds at every step within the horizon".into();
    }
    report
}

/// Smallest `t ∈ [1, t_max]` with `β_t(x) ∈ Z`, assuming monotonicity.
fn first_inside(z: &dyn Region, profile: &Profile, x: Point2, t_max: u64) -> Option<u64> {
    let inside = |t: u64| beta_step(t, x, profile).map(|y| z.contains(y)).unwrap_or(false);
    if !inside(t_max) {
        return None;
    }
    let (mut lo, mut hi) = (1u64, t_max);
    if inside(lo) {
        return Some(lo);
    }
    // inside(hi) holds, inside(lo) fails.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Search for `t_Z` with `β_t(x) ∈ Z` for all sampled `x ∈ Z` and `t ≥ t_Z`.
///
/// For convex `Z`, `β_t(x)` lies on the segment from `x` to `f(x)` at
/// parameter `1/(t+1)`, so once a step stays in `Z` all later steps do. The
/// smallest such `t` is found by bisection and the verdict is `Holds` for the
/// sample. Non-convex regions are scanned on `[t_Z, 10·t_max]` and reported
/// as `Inconclusive` at best.
pub fn invariant_check(z: &dyn Region, profile: &Profile, sample_n: usize, t_max: u64, seed: u64) -> SetCheckReport {
    let mut report = SetCheckReport::new(Verdict::Holds);
    report.seed = Some(seed);
    report.horizon = t_max;
    let t_max = t_max.max(1);
    let pts = sample_region(z, profile.polytope(), sample_n.max(1), seed);
    report.samples = pts.len();
    if pts.is_empty() {
        report.verdict = Verdict::Inconclusive;
        report.note = "no sample points found in Z ∩ domain".into();
        return report;
    }
    let per_point: Vec<std::result::Result<u64, Witness>> = pts
        .par_iter()
        .map(|&x| {
            if z.is_convex() {
                first_inside(z, profile, x, t_max).ok_or(Witness {
                    t: t_max,
                    point: x,
                    origin: None,
                })
            } else {
                scan_non_convex(z, profile, x, t_max)
            }
        })
        .collect();
    let mut t_z = 1;
    for r in per_point {
        match r {
            Ok(t) => t_z = t_z.max(t),
            Err(w) => {
                if report.witnesses.len() < MAX_WITNESSES {
                    report.witnesses.push(w);
                }
            }
        }
    }
    if !report.witnesses.is_empty() {
        report.verdict = Verdict::Violated;
        report.note = format!("some sampled points still leave Z at t = {t_max}");
    } else {
        report.t_threshold = Some(t_z);
        if z.is_convex() {
            report.note = "convex region: later steps stay on the segment toward f(x)".into();
        } else {
            report.verdict = Verdict::Inconclusive;
            report.note = format!("non-convex region: checked on a grid up to t = {}", 10 * t_max);
        }
    }
    report
}

/// Largest grid `t` at which `β_t(x)` leaves `Z`, over all of `1..=1000` and a
/// geometric grid up to `10·t_max`. Returns the following grid value, or the
/// offending step if that lies beyond `t_max`.
fn scan_non_convex(z: &dyn Region, profile: &Profile, x: Point2, t_max: u64) -> std::result::Result<u64, Witness> {
    let limit = t_max.saturating_mul(10);
    let mut grid: Vec<u64> = (1..=limit.min(1000)).collect();
    let mut t = 1000f64;
    while (t as u64) < limit {
        t *= 1.01;
        grid.push((t as u64).min(limit));
    }
    let mut last_out = None;
    for &t in &grid {
        let inside = beta_step(t, x, profile).map(|y| z.contains(y)).unwrap_or(false);
        if !inside {
            last_out = Some(t);
        }
    }
    match last_out {
        None => Ok(1),
        Some(t) if t < t_max => Ok(t + 1),
        Some(t) => Err(Witness {
            t,
            point: x,
            origin: None,
        }),
    }
}

fn window_start(len: usize, window: f64) -> usize {
    let k = ((len as f64 * window).ceil() as usize).clamp(1, len.max(1));
    len.saturating_sub(k)
}

/// Which trajectory property a tail-window check is looking for.
#[derive(Clone, Copy, PartialEq, Eq)]
enum TailProperty {
    /// Must visit `Z` within the window.
    Revisits,
    /// Must leave `Z` within the window.
    Leaves,
}

/// Inspects the trailing `window` fraction of each run. Returns a witness
/// (the window start) for each run that fails the property.
fn tail_property(
    z: &dyn Region,
    runs: &[(u64, Point2, Vec<Point2>)],
    window: f64,
    property: TailProperty,
) -> Vec<Witness> {
    runs.iter()
        .filter_map(|(t0, x0, pts)| {
            if pts.is_empty() {
                return None;
            }
            let start = window_start(pts.len(), window);
            let tail = &pts[start..];
            let ok = match property {
                TailProperty::Revisits => tail.iter().any(|&p| z.contains(p)),
                TailProperty::Leaves => tail.iter().any(|&p| !z.contains(p)),
            };
            (!ok).then(|| Witness {
                t: t0 + start as u64,
                point: tail[0],
                origin: Some((*t0, *x0)),
            })
        })
        .collect()
}

fn tail_report(
    witnesses: Vec<Witness>,
    runs: usize,
    horizon: u64,
    property: TailProperty,
) -> SetCheckReport {
    let mut report = SetCheckReport::new(Verdict::Inconclusive);
    report.samples = runs;
    report.horizon = horizon;
    let what = match property {
        TailProperty::Revisits => "enters",
        TailProperty::Leaves => "leaves",
    };
    if witnesses.is_empty() {
        report.note = format!("every run {what} Z inside the trailing window");
    } else {
        report.verdict = Verdict::Violated;
        report.note = format!("{} run(s) never {what} Z inside the trailing window", witnesses.len());
        report.witnesses = witnesses.into_iter().take(MAX_WITNESSES).collect();
    }
    report
}

fn stored_runs(trajectories: &[Trajectory]) -> Vec<(u64, Point2, Vec<Point2>)> {
    trajectories.iter().map(|t| (t.t0, t.x0, t.points.clone())).collect()
}

/// Every run must come back to `Z` in its trailing window.
pub fn absorbing_check(z: &dyn Region, _profile: &Profile, trajectories: &[Trajectory]) -> SetCheckReport {
    let runs = stored_runs(trajectories);
    let horizon = trajectories.iter().map(Trajectory::t_end).max().unwrap_or(0);
    let w = tail_property(z, &runs, DEFAULT_WINDOW, TailProperty::Revisits);
    tail_report(w, runs.len(), horizon, TailProperty::Revisits)
}

/// Every run must leave `Z` in its trailing window.
pub fn escape_check(z: &dyn Region, _profile: &Profile, trajectories: &[Trajectory]) -> SetCheckReport {
    let runs = stored_runs(trajectories);
    let horizon = trajectories.iter().map(Trajectory::t_end).max().unwrap_or(0);
    let w = tail_property(z, &runs, DEFAULT_WINDOW, TailProperty::Leaves);
    tail_report(w, runs.len(), horizon, TailProperty::Leaves)
}

/// Streaming form of the absorbing/escape checks: runs each start to `t_end`
/// and only tracks membership inside the trailing window.
fn tail_check_runs(
    z: &dyn Region,
    profile: &Profile,
    starts: &[Point2],
    t0: u64,
    t_end: u64,
    property: TailProperty,
) -> Result<SetCheckReport> {
    let results: Vec<Result<Option<Witness>>> = starts
        .par_iter()
        .map(|&x0| {
            let run = Run::new(profile, x0, t0, t_end)?;
            let start = window_start(run.len(), DEFAULT_WINDOW);
            let mut first = None;
            let mut ok = false;
            for (i, rec) in run.enumerate().skip(start) {
                if first.is_none() {
                    first = Some((rec.t, rec.point));
                }
                let inside = z.contains(rec.point);
                ok |= match property {
                    TailProperty::Revisits => inside,
                    TailProperty::Leaves => !inside,
                };
                if ok {
                    let _ = i;
                    break;
                }
            }
            let (t, point) = first.expect("window is non-empty");
            Ok((!ok).then_some(Witness {
                t,
                point,
                origin: Some((t0, x0)),
            }))
        })
        .collect();
    let mut witnesses = Vec::new();
    for r in results {
        if let Some(w) = r? {
            witnesses.push(w);
        }
    }
    Ok(tail_report(witnesses, starts.len(), t_end, property))
}

pub fn absorbing_check_runs(z: &dyn Region, profile: &Profile, starts: &[Point2], t0: u64, t_end: u64) -> Result<SetCheckReport> {
    tail_check_runs(z, profile, starts, t0, t_end, TailProperty::Revisits)
}

pub fn escape_check_runs(z: &dyn Region, profile: &Profile, starts: &[Point2], t0: u64, t_end: u64) -> Result<SetCheckReport> {
    tail_check_runs(z, profile, starts, t0, t_end, TailProperty::Leaves)
}

/// Tail min/max of running averages, standing in for `liminf`/`limsup`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CesaroBounds {
    pub liminf_hat: f64,
    pub limsup_hat: f64,
    /// Index range `[start, end)` of the window within the series.
    pub window: (usize, usize),
}

/// Bounds from a series of running averages.
pub fn cesaro_bounds(means: &[f64], window_fraction: f64) -> Result<CesaroBounds> {
    const MIN_LEN: usize = 100;
    if means.len() < MIN_LEN {
        return Err(Error::InsufficientData {
            needed: MIN_LEN,
            got: means.len(),
        });
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("window fraction must lie in (0, 1], got {window_fraction}")));
    }
    let start = window_start(means.len(), window_fraction);
    let tail = &means[start..];
    Ok(CesaroBounds {
        liminf_hat: tail.iter().copied().fold(f64::INFINITY, f64::min),
        limsup_hat: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        window: (start, means.len()),
    })
}

/// Running means `x̄_n = (a_1 + … + a_n)/n`.
pub fn running_means(series: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    let mut comp = 0.0;
    series
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            // Kahan summation.
            let y = a - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            sum / (i + 1) as f64
        })
        .collect()
}

/// Bounds from raw stage payoffs: averages them first.
pub fn cesaro_bounds_from_payoffs(payoffs: &[f64], window_fraction: f64) -> Result<CesaroBounds> {
    cesaro_bounds(&running_means(payoffs), window_fraction)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanBarrierReport {
    pub premise_holds: bool,
    pub conclusion_holds: bool,
    /// Number of `n` in the checked range with `x̄_n > c` and `a_{n+1} > c`.
    pub premise_violations: usize,
    pub last_violation: Option<usize>,
    pub limsup_hat: f64,
}

/// Mean barrier: if `x̄_n > c ⇒ a_{n+1} ≤ c` for all large `n`, then
/// `limsup x̄_n ≤ c`.
///
/// "All large n" is read as the second half of the series; the conclusion
/// is checked against the trailing 10% with tolerance `tol`.
pub fn mean_barrier_check(series: &[f64], c: f64, tol: f64) -> Result<MeanBarrierReport> {
    let means = running_means(series);
    let bounds = cesaro_bounds(&means, DEFAULT_WINDOW)?;
    let from = series.len() / 2;
    let mut violations = 0;
    let mut last = None;
    for n in from..series.len() - 1 {
        if means[n] > c && series[n + 1] > c {
            violations += 1;
            last = Some(n);
        }
    }
    Ok(MeanBarrierReport {
        premise_holds: violations == 0,
        conclusion_holds: bounds.limsup_hat <= c + tol,
        premise_violations: violations,
        last_violation: last,
        limsup_hat: bounds.limsup_hat,
    })
}

/// One opponent/start pair of a safety sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetyEntry {
    pub opponent: String,
    pub x0: Point2,
    pub last: Point2,
    pub liminf1: f64,
    pub limsup1: f64,
    pub limsup2: f64,
    /// `limsup2 − limsup1`; safety asks for `≤ ε`.
    pub margin: f64,
    /// `liminf x̄¹ ≥ 1 − tol` and `limsup x̄² ≤ 2 + tol`.
    pub bounds_ok: bool,
    /// `limsup x̄² ≤ limsup x̄¹ + ε + tol`.
    pub safety_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetyReport {
    pub eps: f64,
    pub tolerance: f64,
    pub steps: u64,
    pub entries: Vec<SafetyEntry>,
    pub worst_margin: f64,
    pub worst_liminf1: f64,
    pub worst_limsup2: f64,
    pub bounds_ok: bool,
    pub safety_ok: bool,
}

/// Label used in reports for a strategy.
pub fn strategy_label(s: &MemoryStrategy) -> String {
    use crate::strategies::StrategyKind as K;
    match s.kind() {
        K::Good { eps } => format!("good(eps={eps})"),
        K::SemiCoop { v, eps } => format!("semicoop(v=({},{}),eps={eps})", v.x1, v.x2),
        K::Simple { p, q, r } => format!("simple({p},{q},{r})"),
        K::Affine { p, q, r } => format!("affine({p},{q},{r})"),
        K::Constant { action } => format!("const({action})"),
        K::Custom { name } => name,
    }
}

/// Plays `player1` against every opponent from every start and records the
/// tail Cesàro bounds of both players.
pub fn safety_check(
    player1: &MemoryStrategy,
    eps: f64,
    opponents: &[MemoryStrategy],
    x0s: &[Point2],
    t_end: u64,
    tolerance: f64,
) -> Result<SafetyReport> {
    if player1.player() != Player::One {
        return Err(Error::InvalidParameter("safety is checked for player 1".into()));
    }
    if opponents.is_empty() || x0s.is_empty() {
        return Err(Error::InvalidParameter("empty opponent suite or start list".into()));
    }
    let jobs: Vec<(&MemoryStrategy, Point2)> = opponents
        .iter()
        .flat_map(|o| x0s.iter().map(move |&x| (o, x)))
        .collect();
    let entries: Vec<Result<SafetyEntry>> = jobs
        .par_iter()
        .map(|&(opp, x0)| {
            let profile = Profile::new(player1.clone(), opp.clone())?;
            let tail = simulate_tail(&profile, x0, 1, t_end, DEFAULT_WINDOW)?;
            let (liminf1, limsup1, limsup2) = (tail.min.x1, tail.max.x1, tail.max.x2);
            Ok(SafetyEntry {
                opponent: strategy_label(opp),
                x0,
                last: tail.last,
                liminf1,
                limsup1,
                limsup2,
                margin: limsup2 - limsup1,
                bounds_ok: liminf1 >= 1.0 - tolerance && limsup2 <= 2.0 + tolerance,
                safety_ok: limsup2 <= limsup1 + eps + tolerance,
            })
        })
        .collect();
    let entries = entries.into_iter().collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&SafetyEntry) -> f64, max: bool| {
        entries.iter().map(f).fold(if max { f64::NEG_INFINITY } else { f64::INFINITY }, |a, b| {
            if max {
                a.max(b)
            } else {
                a.min(b)
            }
        })
    };
    Ok(SafetyReport {
        eps,
        tolerance,
        steps: t_end,
        worst_margin: fold(|e| e.margin, true),
        worst_liminf1: fold(|e| e.liminf1, false),
        worst_limsup2: fold(|e| e.limsup2, true),
        bounds_ok: entries.iter().all(|e| e.bounds_ok),
        safety_ok: entries.iter().all(|e| e.safety_ok),
        entries,
    })
}

/// The invariant neighborhood `O_δ(v)` of a same-anchor profile:
/// the part of 𝔖 over `l1 = l(P_δ,(3,0))`, `l2 = l(P_δ,(0,3))` and
/// `l3 = l(R_δ,(2,2))` with `x1 ≤ v1+δ`, where `P_δ = (v1−δ, v2−δ)` and
/// `R_δ = l2 ∩ {x1 = v1}`.
///
/// At `v = (2,2)` the line `l3` is vertical and "over" is undefined; the
/// constraint is dropped there since `l2` and `x1 ≤ v1+δ` already bound the set.
pub fn build_o_delta(v: Point2, delta: f64, eps1: f64, eps2: f64) -> Result<ConvexPolygon> {
    if !(delta > 0.0 && delta < eps1.min(eps2)) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < delta < min(eps1, eps2), got delta={delta}"
        )));
    }
    let core = pd_beta_core();
    if core.is_excluded(v) || !core.contains(v) {
        return Err(Error::InvalidParameter(format!(
            "({}, {}) is not an interior β-core point",
            v.x1, v.x2
        )));
    }
    let p = Point2::new(v.x1 - delta, v.x2 - delta);
    let l1 = line_through(p, Point2::new(3.0, 0.0))?;
    let l2 = line_through(p, Point2::new(0.0, 3.0))?;
    let vertical = Line::new(1.0, 0.0, v.x1)?;
    let r = match intersect_lines(&l2, &vertical) {
        LineIntersection::Point(r) => r,
        LineIntersection::Parallel => return Err(Error::Parallel),
    };
    let cc = Point2::new(2.0, 2.0);
    let mut cuts = vec![HalfPlane::over(&l1)?, HalfPlane::over(&l2)?];
    if r.dist(cc) > ETA {
        let l3 = line_through(r, cc)?;
        if !l3.is_vertical() {
            cuts.push(HalfPlane::over(&l3)?);
        }
    }
    cuts.push(HalfPlane::new(Point2::new(1.0, 0.0), v.x1 + delta)?);
    pd_polytope()
        .clip_all(cuts.iter())
        .ok_or_else(|| Error::DegenerateInput("O_delta is empty".into()))
}

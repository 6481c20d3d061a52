//! The averaged dynamical system `x̄_{t+1} = (t·x̄_t + f(x̄_t))/(t+1)`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{make_pd, BetaCoreImage, Game};
use crate::geometry::{
    convex_hull, intersect_lines, line_through, offset_halfplane, ConvexPolygon, HalfPlane,
    LineIntersection, Point2, ETA,
};
use crate::strategies::{Action, MemoryStrategy, Player};

/// The β-core image of the PD, computed once.
pub fn pd_beta_core() -> &'static BetaCoreImage {
    static CORE: OnceLock<BetaCoreImage> = OnceLock::new();
    CORE.get_or_init(|| make_pd().beta_core_image())
}

/// A strategy profile on a 2×2 game. The step map is `f(x) = u(s1(x), s2(x))`.
#[derive(Debug, Clone)]
pub struct Profile {
    pub s1: MemoryStrategy,
    pub s2: MemoryStrategy,
    game: Game,
    polytope: ConvexPolygon,
}

impl Profile {
    /// Profile on the prisoner's dilemma.
    pub fn new(s1: MemoryStrategy, s2: MemoryStrategy) -> Result<Self> {
        Self::with_game(make_pd(), s1, s2)
    }

    pub fn with_game(game: Game, s1: MemoryStrategy, s2: MemoryStrategy) -> Result<Self> {
        if s1.player() != Player::One || s2.player() != Player::Two {
            return Err(Error::InvalidParameter(
                "profile expects a player-1 strategy followed by a player-2 strategy".into(),
            ));
        }
        if game.actions1().len() != 2 || game.actions2().len() != 2 {
            return Err(Error::Unsupported("memory strategies need a 2×2 game".into()));
        }
        let polytope = game.payoff_polytope();
        Ok(Self {
            s1,
            s2,
            game,
            polytope,
        })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn polytope(&self) -> &ConvexPolygon {
        &self.polytope
    }

    #[inline]
    pub fn actions(&self, x: Point2) -> (Action, Action) {
        (self.s1.action_at(x), self.s2.action_at(x))
    }

    #[inline]
    pub fn payoff(&self, a: (Action, Action)) -> Point2 {
        self.game.payoff(a.0.index(), a.1.index())
    }

    /// `f(x)` without the domain check.
    #[inline]
    pub fn f(&self, x: Point2) -> Point2 {
        self.payoff(self.actions(x))
    }

    fn check_domain(&self, x: Point2) -> Result<()> {
        if x.is_finite() && self.polytope.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(x))
        }
    }
}

/// `f(x) = u(s1(x), s2(x))` for `x ∈ 𝔖`.
pub fn step_map(profile: &Profile, x: Point2) -> Result<Point2> {
    profile.check_domain(x)?;
    Ok(profile.f(x))
}

/// `β_t(x) = (t·x + f(x))/(t+1)`.
pub fn beta_step(t: u64, x: Point2, profile: &Profile) -> Result<Point2> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be ≥ 1".into()));
    }
    let fx = step_map(profile, x)?;
    Ok(average_step(t, x, fx))
}

#[inline]
fn average_step(t: u64, x: Point2, fx: Point2) -> Point2 {
    let t = t as f64;
    Point2::new((t * x.x1 + fx.x1) / (t + 1.0), (t * x.x2 + fx.x2) / (t + 1.0))
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn product(a: f64, b: f64) -> Self {
        let hi = a * b;
        Self {
            hi,
            lo: a.mul_add(b, -hi),
        }
    }

    #[inline]
    fn add(&mut self, x: f64) {
        // TwoSum, then renormalize.
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        let lo = self.lo + err;
        self.hi = s + lo;
        self.lo = lo - (self.hi - s);
    }

    #[inline]
    fn div(&self, t: f64) -> f64 {
        let q = self.hi / t;
        let rem = (-q).mul_add(t, self.hi);
        q + (rem + self.lo) / t
    }
}

/// One row of a run: the state at `t` and what is played there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub point: Point2,
    pub actions: (Action, Action),
    pub payoff: Point2,
}

/// Lazily iterates the dynamics from `(t0, x0)` up to and including `t_end`.
///
/// Running totals `t·x̄_t` are kept in double-double precision so the
/// averages carry no accumulated drift.
#[derive(Debug, Clone)]
pub struct Run<'a> {
    profile: &'a Profile,
    t: u64,
    t_end: u64,
    point: Point2,
    totals: [DoubleDouble; 2],
}

impl<'a> Run<'a> {
    pub fn new(profile: &'a Profile, x0: Point2, t0: u64, t_end: u64) -> Result<Self> {
        check_horizon(t0, t_end)?;
        profile.check_domain(x0)?;
        let t0f = t0 as f64;
        Ok(Self {
            profile,
            t: t0,
            t_end,
            point: x0,
            totals: [DoubleDouble::product(t0f, x0.x1), DoubleDouble::product(t0f, x0.x2)],
        })
    }
}

impl Iterator for Run<'_> {
    type Item = StepRecord;

    #[inline]
    fn next(&mut self) -> Option<StepRecord> {
        if self.t > self.t_end {
            return None;
        }
        let actions = self.profile.actions(self.point);
        let payoff = self.profile.payoff(actions);
        let rec = StepRecord {
            t: self.t,
            point: self.point,
            actions,
            payoff,
        };
        self.totals[0].add(payoff.x1);
        self.totals[1].add(payoff.x2);
        self.t += 1;
        let tf = self.t as f64;
        self.point = Point2::new(self.totals[0].div(tf), self.totals[1].div(tf));
        Some(rec)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.t_end + 1).saturating_sub(self.t) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Run<'_> {}

fn check_horizon(t0: u64, t_end: u64) -> Result<()> {
    if t0 == 0 {
        return Err(Error::InvalidParameter("t0 must be ≥ 1".into()));
    }
    if t_end <= t0 {
        return Err(Error::InvalidParameter(format!("need t0 < T, got t0={t0}, T={t_end}")));
    }
    // Beyond 2^53 the step index is no longer exact in f64.
    if t_end >= 1 << 53 {
        return Err(Error::Overflow);
    }
    Ok(())
}

/// A stored run for `t = t0..=T`. Row `i` holds `x̄_{t0+i}`, the actions
/// chosen there and the resulting stage payoff `f(x̄_{t0+i})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t0: u64,
    pub x0: Point2,
    pub points: Vec<Point2>,
    pub actions: Vec<(Action, Action)>,
    pub payoffs: Vec<Point2>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Last step index `T`.
    pub fn t_end(&self) -> u64 {
        self.t0 + self.points.len() as u64 - 1
    }

    pub fn last(&self) -> Point2 {
        *self.points.last().expect("trajectory is never empty")
    }

    pub fn time(&self, i: usize) -> u64 {
        self.t0 + i as u64
    }

    pub fn records(&self) -> impl Iterator<Item = StepRecord> + '_ {
        (0..self.len()).map(move |i| StepRecord {
            t: self.time(i),
            point: self.points[i],
            actions: self.actions[i],
            payoff: self.payoffs[i],
        })
    }

    /// Largest `|x̄_{t+1} − (t·x̄_t + x_t)/(t+1)|` over the stored steps.
    pub fn recurrence_residual(&self) -> f64 {
        (0..self.len().saturating_sub(1))
            .map(|i| {
                let want = average_step(self.time(i), self.points[i], self.payoffs[i]);
                self.points[i + 1].dist(want)
            })
            .fold(0.0, f64::max)
    }

    /// Rebuilds a trajectory from rows, e.g. after reading a CSV.
    pub fn from_records(rows: &[StepRecord]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
        for (i, r) in rows.iter().enumerate() {
            if r.t != first.t + i as u64 {
                return Err(Error::Parse(format!("non-consecutive step index at row {}", i + 1)));
            }
        }
        Ok(Self {
            t0: first.t,
            x0: first.point,
            points: rows.iter().map(|r| r.point).collect(),
            actions: rows.iter().map(|r| r.actions).collect(),
            payoffs: rows.iter().map(|r| r.payoff).collect(),
        })
    }
}

/// Runs the dynamics from `x̄_{t0} = x0` to `x̄_T`.
pub fn simulate(profile: &Profile, x0: Point2, t0: u64, t_end: u64) -> Result<Trajectory> {
    let run = Run::new(profile, x0, t0, t_end)?;
    let n = run.len();
    let mut traj = Trajectory {
        t0,
        x0,
        points: Vec::with_capacity(n),
        actions: Vec::with_capacity(n),
        payoffs: Vec::with_capacity(n),
    };
    for rec in run {
        traj.points.push(rec.point);
        traj.actions.push(rec.actions);
        traj.payoffs.push(rec.payoff);
    }
    Ok(traj)
}

pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;
pub const DEFAULT_LIMIT_TOLERANCE: f64 = 0.02;
const MIN_TRAJECTORY_LEN: usize = 100;

/// Empirical limit of a run: the final average and the diameter of the
/// trailing window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub point: Point2,
    pub spread: f64,
    pub converged: bool,
    pub tolerance: f64,
}

fn tail_start(len: usize, tail_fraction: f64) -> Result<usize> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let k = ((len as f64 * tail_fraction).ceil() as usize).clamp(1, len);
    Ok(len - k)
}

fn spread_of(points: &[Point2]) -> f64 {
    match convex_hull(points) {
        Ok(h) => h.diameter(),
        Err(_) => 0.0,
    }
}

pub fn estimate_limit(traj: &Trajectory, tail_fraction: f64) -> Result<LimitEstimate> {
    estimate_limit_with(traj, tail_fraction, DEFAULT_LIMIT_TOLERANCE)
}

pub fn estimate_limit_with(traj: &Trajectory, tail_fraction: f64, tolerance: f64) -> Result<LimitEstimate> {
    if traj.len() < MIN_TRAJECTORY_LEN {
        return Err(Error::InsufficientData {
            needed: MIN_TRAJECTORY_LEN,
            got: traj.len(),
        });
    }
    let start = tail_start(traj.len(), tail_fraction)?;
    let spread = spread_of(&traj.points[start..]);
    Ok(LimitEstimate {
        point: traj.last(),
        spread,
        converged: spread <= tolerance,
        tolerance,
    })
}

/// Summary of a long run that keeps only the trailing window in memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRun {
    pub x0: Point2,
    pub t0: u64,
    pub t_end: u64,
    /// First step index of the window.
    pub window_start: u64,
    pub last: Point2,
    /// Componentwise min of `x̄_t` over the window.
    pub min: Point2,
    /// Componentwise max of `x̄_t` over the window.
    pub max: Point2,
    pub spread: f64,
}

impl TailRun {
    pub fn limit(&self, tolerance: f64) -> LimitEstimate {
        LimitEstimate {
            point: self.last,
            spread: self.spread,
            converged: self.spread <= tolerance,
            tolerance,
        }
    }
}

/// Same observables as `simulate` + `estimate_limit`, without storing the run.
pub fn simulate_tail(profile: &Profile, x0: Point2, t0: u64, t_end: u64, tail_fraction: f64) -> Result<TailRun> {
    let run = Run::new(profile, x0, t0, t_end)?;
    let len = run.len();
    if len < MIN_TRAJECTORY_LEN {
        return Err(Error::InsufficientData {
            needed: MIN_TRAJECTORY_LEN,
            got: len,
        });
    }
    let start = tail_start(len, tail_fraction)?;
    let mut window = Vec::with_capacity(len - start);
    for (i, rec) in run.enumerate() {
        if i >= start {
            window.push(rec.point);
        }
    }
    let (min, max) = window.iter().fold(
        (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), p| {
            (
                Point2::new(lo.x1.min(p.x1), lo.x2.min(p.x2)),
                Point2::new(hi.x1.max(p.x1), hi.x2.max(p.x2)),
            )
        },
    );
    Ok(TailRun {
        x0,
        t0,
        t_end,
        window_start: t0 + start as u64,
        last: *window.last().expect("window is non-empty"),
        min,
        max,
        spread: spread_of(&window),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitCase {
    SameA,
    CcPoint,
    BWins,
    AWins,
    YPoint,
}

impl LimitCase {
    pub fn name(self) -> &'static str {
        match self {
            LimitCase::SameA => "same_a",
            LimitCase::CcPoint => "cc_point",
            LimitCase::BWins => "b_wins",
            LimitCase::AWins => "a_wins",
            LimitCase::YPoint => "y_point",
        }
    }

    /// First matching case in table order. At `a1 = b1 = 2` three cases
    /// apply and all give (2,2).
    pub fn classify(a1: f64, b1: f64) -> LimitCase {
        if a1 == b1 {
            LimitCase::SameA
        } else if a1 <= 2.0 && 2.0 <= b1 {
            LimitCase::CcPoint
        } else if a1 < b1 && b1 <= 2.0 {
            LimitCase::BWins
        } else if 2.0 <= a1 && a1 < b1 {
            LimitCase::AWins
        } else {
            LimitCase::YPoint
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPrediction {
    pub case: LimitCase,
    pub limit: Point2,
    /// `|y − (1,1)|` from the closed form, y case only.
    pub y_distance: Option<f64>,
}

fn check_anchor(v: Point2, name: &str) -> Result<()> {
    let core = pd_beta_core();
    if core.is_excluded(v) {
        return Err(Error::InvalidParameter(format!(
            "{name} = ({}, {}) is an excluded β-core endpoint",
            v.x1, v.x2
        )));
    }
    if !core.contains(v) {
        return Err(Error::InvalidParameter(format!(
            "{name} = ({}, {}) is not on the β-core",
            v.x1, v.x2
        )));
    }
    Ok(())
}

fn check_eps(eps: f64, name: &str) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {eps}")))
    }
}

/// Limit of every trajectory when player 1 anchors at `a` and player 2 at `b`.
pub fn predicted_limit(a: Point2, b: Point2, eps1: f64, eps2: f64) -> Result<LimitPrediction> {
    check_anchor(a, "a")?;
    check_anchor(b, "b")?;
    check_eps(eps1, "eps1")?;
    check_eps(eps2, "eps2")?;
    let case = LimitCase::classify(a.x1, b.x1);
    let cc = Point2::new(2.0, 2.0);
    let pred = match case {
        LimitCase::SameA => LimitPrediction {
            case,
            limit: a,
            y_distance: None,
        },
        LimitCase::CcPoint => LimitPrediction {
            case,
            limit: cc,
            y_distance: None,
        },
        LimitCase::BWins => LimitPrediction {
            case,
            limit: b,
            y_distance: None,
        },
        LimitCase::AWins => LimitPrediction {
            case,
            limit: a,
            y_distance: None,
        },
        LimitCase::YPoint => LimitPrediction {
            case,
            limit: y_limit_point(a, b, eps1, eps2)?,
            y_distance: Some(y_distance_formula(a, b, eps1, eps2)?),
        },
    };
    Ok(pred)
}

/// Outer boundaries of `(T_1(a))^{ε1}` and `(T_2(b))^{ε2}`.
fn widened_halfplanes(a: Point2, b: Point2, eps1: f64, eps2: f64) -> Result<(HalfPlane, HalfPlane)> {
    if !(eps1 >= 0.0 && eps2 >= 0.0) {
        return Err(Error::InvalidParameter("offsets must be ≥ 0".into()));
    }
    let one = Point2::new(1.0, 1.0);
    let h1 = offset_halfplane(&HalfPlane::under(&line_through(one, a)?)?, eps1)?;
    let h2 = offset_halfplane(&HalfPlane::over(&line_through(one, b)?)?, eps2)?;
    Ok((h1, h2))
}

/// `y^{ε1,ε2}`: where the two widened cooperation boundaries cross.
pub fn y_point(a: Point2, b: Point2, eps1: f64, eps2: f64) -> Result<Point2> {
    if !(b.x1 < a.x1) {
        return Err(Error::InvalidParameter(format!(
            "y point needs b1 < a1, got a1={}, b1={}",
            a.x1, b.x1
        )));
    }
    let (h1, h2) = widened_halfplanes(a, b, eps1, eps2)?;
    match intersect_lines(&h1.boundary(), &h2.boundary()) {
        LineIntersection::Point(y) => Ok(y),
        LineIntersection::Parallel => Err(Error::Parallel),
    }
}

/// `y^{ε1,ε2} = cl(Δ) ∩ cl(Ω3)`, where `Δ = K_1(a,ε1) ∩ K_2(b,ε2)` is the
/// both-cooperate cell, box constraints included.
///
/// `Δ` is a wedge opening away from (2,2) and `Ω3` lies beyond its tip, so
/// the meeting point is the vertex of `cl(Δ)` maximizing `x1 + x2`. When the
/// crossing of the widened boundaries lies in both boxes this is
/// [`y_point`]; otherwise a box edge cuts the wedge first.
pub fn y_limit_point(a: Point2, b: Point2, eps1: f64, eps2: f64) -> Result<Point2> {
    if !(b.x1 < a.x1) {
        return Err(Error::InvalidParameter(format!(
            "y point needs b1 < a1, got a1={}, b1={}",
            a.x1, b.x1
        )));
    }
    let (h1, h2) = widened_halfplanes(a, b, eps1, eps2)?;
    let cuts = [
        h1,
        HalfPlane::new(Point2::new(-1.0, 0.0), -1.0)?,
        HalfPlane::new(Point2::new(0.0, 1.0), a.x2)?,
        h2,
        HalfPlane::new(Point2::new(1.0, 0.0), b.x1)?,
        HalfPlane::new(Point2::new(0.0, -1.0), -1.0)?,
    ];
    let delta = crate::strategies::pd_polytope()
        .clip_all(cuts.iter())
        .ok_or_else(|| Error::DegenerateInput("the both-cooperate cell is empty".into()))?;
    let tip = delta
        .vertices()
        .iter()
        .copied()
        .max_by(|p, q| (p.x1 + p.x2).total_cmp(&(q.x1 + q.x2)))
        .expect("non-empty polygon has a vertex");
    Ok(tip)
}

/// Angle at (1,1) between the rays toward `a` and `b`, as `(sin, cos)`.
fn ray_angle(a: Point2, b: Point2) -> Result<(f64, f64)> {
    let one = Point2::new(1.0, 1.0);
    let (da, db) = (a - one, b - one);
    let (na, nb) = (da.norm(), db.norm());
    if na <= ETA || nb <= ETA {
        return Err(Error::DegenerateAngle);
    }
    let s = da.cross(db).abs() / (na * nb);
    let c = da.dot(db) / (na * nb);
    if s.atan2(c) <= ETA {
        return Err(Error::DegenerateAngle);
    }
    Ok((s, c))
}

/// Closed-form distance `(ε1+ε2+√((ε1+ε2)²+4ε1ε2·tan²α))/(2·tanα)` between
/// `y^{ε1,ε2}` and (1,1), as published.
///
/// This is the root `d` of `tan(φ1+φ2) = tanα` with `tan φi = εi/d`, which
/// measures along a boundary line rather than to `y` itself; for `ε1 = ε2`
/// it is the distance from (1,1) to the foot of `y` on either line. See
/// [`y_distance_geometric`] for `|y − (1,1)|`.
pub fn y_distance_formula(a: Point2, b: Point2, eps1: f64, eps2: f64) -> Result<f64> {
    let (s, c) = ray_angle(a, b)?;
    let sum = eps1 + eps2;
    // Multiplied through by cosα so that α near π/2 stays finite.
    Ok((c * sum + (c * c * sum * sum + 4.0 * eps1 * eps2 * s * s).sqrt()) / (2.0 * s))
}

/// `|y^{ε1,ε2} − (1,1)| = √(ε1²+ε2²+2ε1ε2·cosα)/sinα`: the apex distance of a
/// point at distances ε1, ε2 from the two sides of an angle α.
pub fn y_distance_geometric(a: Point2, b: Point2, eps1: f64, eps2: f64) -> Result<f64> {
    let (s, c) = ray_angle(a, b)?;
    Ok((eps1 * eps1 + eps2 * eps2 + 2.0 * eps1 * eps2 * c).sqrt() / s)
}

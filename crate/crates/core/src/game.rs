//! Two-player normal-form games with vector payoffs.
//!
//! For two players the β-core condition over the coalitions {1}, {2} and
//! {1, 2} reduces to individual rationality plus weak Pareto optimality, so
//! [`Game::beta_core_image`] is computed as the weak Pareto frontier of the
//! payoff polytope clipped to the minmax box.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, ConvexPolygon, ConvexSet, Point2, Segment, ETA};

/// Parameter clamp applied when the β-core image has excluded endpoints.
pub const PARAM_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Game {
    actions1: Vec<String>,
    actions2: Vec<String>,
    /// Row-major: `payoffs[i][j]` is the payoff of (actions1[i], actions2[j]).
    payoffs: Vec<Vec<Point2>>,
}

/// The prisoner's dilemma with C = 0 and D = 1 for both players.
pub fn make_pd() -> Game {
    Game::new(
        vec!["C".into(), "D".into()],
        vec!["C".into(), "D".into()],
        vec![
            vec![Point2::new(2.0, 2.0), Point2::new(0.0, 3.0)],
            vec![Point2::new(3.0, 0.0), Point2::new(1.0, 1.0)],
        ],
    )
    .expect("PD table is total")
}

impl Game {
    pub fn new(actions1: Vec<String>, actions2: Vec<String>, payoffs: Vec<Vec<Point2>>) -> Result<Self> {
        if actions1.is_empty() || actions2.is_empty() {
            return Err(Error::InvalidParameter("each player needs at least one action".into()));
        }
        if payoffs.len() != actions1.len() {
            return Err(Error::InvalidParameter(format!(
                "payoff table has {} rows, expected {}",
                payoffs.len(),
                actions1.len()
            )));
        }
        for (i, row) in payoffs.iter().enumerate() {
            if row.len() != actions2.len() {
                return Err(Error::InvalidParameter(format!(
                    "payoff row {i} has {} entries, expected {}",
                    row.len(),
                    actions2.len()
                )));
            }
            if let Some(j) = row.iter().position(|p| !p.is_finite()) {
                return Err(Error::InvalidParameter(format!("payoff ({i}, {j}) is not finite")));
            }
        }
        Ok(Self { actions1, actions2, payoffs })
    }

    pub fn actions1(&self) -> &[String] {
        &self.actions1
    }

    pub fn actions2(&self) -> &[String] {
        &self.actions2
    }

    pub fn payoff(&self, i: usize, j: usize) -> Point2 {
        self.payoffs[i][j]
    }

    pub fn payoff_table(&self) -> &[Vec<Point2>] {
        &self.payoffs
    }

    pub fn all_payoffs(&self) -> impl Iterator<Item = Point2> + '_ {
        self.payoffs.iter().flatten().copied()
    }

    /// The game with players exchanged: actions swapped and payoffs transposed.
    pub fn swapped(&self) -> Game {
        let payoffs = (0..self.actions2.len())
            .map(|j| (0..self.actions1.len()).map(|i| self.payoffs[i][j].swap()).collect())
            .collect();
        Game {
            actions1: self.actions2.clone(),
            actions2: self.actions1.clone(),
            payoffs,
        }
    }

    /// Convex hull of all stage payoffs.
    pub fn payoff_polytope(&self) -> ConvexPolygon {
        let pts: Vec<Point2> = self.all_payoffs().collect();
        convex_hull(&pts).expect("game has at least one finite payoff")
    }

    /// Minmax values `(v1, v2)`: what each player can guarantee against a
    /// mixed opponent.
    pub fn minmax_values(&self) -> (f64, f64) {
        let m1: Vec<Vec<f64>> = self
            .payoffs
            .iter()
            .map(|row| row.iter().map(|p| p.x1).collect())
            .collect();
        let m2: Vec<Vec<f64>> = (0..self.actions2.len())
            .map(|j| (0..self.actions1.len()).map(|i| self.payoffs[i][j].x2).collect())
            .collect();
        (zero_sum_value(&m1), zero_sum_value(&m2))
    }

    /// Maximal boundary segments of the payoff polytope on which no point is
    /// strictly dominated by another point of the polytope. Ordered by
    /// increasing `x1`, each segment oriented from smaller to larger `x1`.
    /// Isolated frontier vertices come back as zero-length segments.
    pub fn weak_pareto_frontier(&self) -> Vec<Segment> {
        weak_pareto_frontier(&self.payoff_polytope())
    }

    /// Image of the β-core in payoff space.
    pub fn beta_core_image(&self) -> BetaCoreImage {
        let (v1, v2) = self.minmax_values();
        beta_core_from_frontier(&self.weak_pareto_frontier(), Point2::new(v1, v2))
    }

    /// Arc-length parameterization of the β-core image; see [`BetaCoreImage::param`].
    pub fn betacore_param(&self, s: f64) -> Result<Point2> {
        self.beta_core_image().param(s)
    }
}

/// A probability distribution over action pairs of the full coalition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedStrategy {
    weights: Vec<Vec<f64>>,
}

impl CorrelatedStrategy {
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        let mut total = 0.0;
        for w in weights.iter().flatten() {
            if !(*w >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Product of two independent mixed strategies.
    pub fn product(p: &[f64], q: &[f64]) -> Result<Self> {
        Self::new(p.iter().map(|a| q.iter().map(|b| a * b).collect()).collect())
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn payoff(&self, game: &Game) -> Result<Point2> {
        if self.weights.len() != game.actions1.len()
            || self.weights.iter().any(|r| r.len() != game.actions2.len())
        {
            return Err(Error::InvalidParameter("weights do not match the game's shape".into()));
        }
        let mut acc = Point2::default();
        for (i, row) in self.weights.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                acc = acc + game.payoffs[i][j] * *w;
            }
        }
        Ok(acc)
    }
}

/// Closed segments of the β-core image with the endpoints cut by the minmax box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaCoreImage {
    pub segments: Vec<Segment>,
    /// Endpoints lying on the minmax box; strategies are not anchored there.
    pub excluded_endpoints: Vec<Point2>,
    pub minmax: Point2,
}

impl BetaCoreImage {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Distance from `p` to the image.
    pub fn distance(&self, p: Point2) -> f64 {
        self.segments
            .iter()
            .map(|s| s.proximal(p).dist)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.distance(p) <= ETA
    }

    pub fn is_excluded(&self, p: Point2) -> bool {
        self.excluded_endpoints.iter().any(|e| e.dist(p) <= ETA)
    }

    /// Point at normalized arc length `s ∈ [0, 1]`, walking the segments in
    /// order of increasing `x1`. When the image has excluded endpoints, `s`
    /// is clamped to `[PARAM_CLAMP, 1 - PARAM_CLAMP]`.
    pub fn param(&self, s: f64) -> Result<Point2> {
        if self.is_empty() {
            return Err(Error::Unsupported("the β-core image is empty".into()));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("parameter {s} outside [0, 1]")));
        }
        let s = if self.excluded_endpoints.is_empty() {
            s
        } else {
            s.clamp(PARAM_CLAMP, 1.0 - PARAM_CLAMP)
        };
        let total = self.length();
        if total <= ETA {
            return Ok(self.segments[0].a);
        }
        let mut remaining = s * total;
        for seg in &self.segments {
            let len = seg.length();
            if remaining <= len {
                return Ok(seg.at(if len > 0.0 { remaining / len } else { 0.0 }));
            }
            remaining -= len;
        }
        Ok(self.segments.last().map(|seg| seg.b).expect("nonempty"))
    }
}

/// Clips weak Pareto frontier segments to the box `{x ≥ minmax}`.
pub fn beta_core_from_frontier(frontier: &[Segment], minmax: Point2) -> BetaCoreImage {
    let segments: Vec<Segment> = frontier
        .iter()
        .filter_map(|s| clip_to_box(*s, minmax.x1, minmax.x2))
        .collect();
    let mut excluded = Vec::new();
    if let (Some(first), Some(last)) = (segments.first(), segments.last()) {
        for end in [first.a, last.b] {
            let on_box = (end.x1 - minmax.x1).abs() <= ETA || (end.x2 - minmax.x2).abs() <= ETA;
            if on_box && !excluded.contains(&end) {
                excluded.push(end);
            }
        }
    }
    BetaCoreImage {
        segments,
        excluded_endpoints: excluded,
        minmax,
    }
}

/// Value of the zero-sum game in which the row player maximizes `m`.
fn zero_sum_value(m: &[Vec<f64>]) -> f64 {
    let rows = m.len();
    let cols = m[0].len();
    let maximin = m
        .iter()
        .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max);
    let minimax = (0..cols)
        .map(|j| m.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    if (maximin - minimax).abs() <= ETA {
        return maximin;
    }
    if rows == 2 && cols == 2 {
        // No saddle point: both players mix and the equalizing formula applies.
        let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
        return (a * d - b * c) / (a + d - b - c);
    }
    zero_sum_value_lp(m)
}

/// min over column mixtures q of max_i (M q)_i, as a linear program.
fn zero_sum_value_lp(m: &[Vec<f64>]) -> f64 {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let v = problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let q: Vec<_> = (0..m[0].len()).map(|_| problem.add_var(0.0, (0.0, 1.0))).collect();
    for row in m {
        let mut expr: Vec<_> = q.iter().zip(row).map(|(&var, &coef)| (var, coef)).collect();
        expr.push((v, -1.0));
        problem.add_constraint(expr, ComparisonOp::Le, 0.0);
    }
    problem.add_constraint(q.iter().map(|&var| (var, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    let solution = problem
        .solve()
        .expect("a finite zero-sum game always has a value");
    solution[v]
}

/// Weak Pareto frontier of a convex polygon; see [`Game::weak_pareto_frontier`].
pub fn weak_pareto_frontier(poly: &ConvexPolygon) -> Vec<Segment> {
    let v = poly.vertices();
    let mut out = Vec::new();
    match v.len() {
        1 => out.push(Segment::new(v[0], v[0])),
        2 => {
            let (a, b) = order_by_x1(v[0], v[1]);
            let d = b - a;
            if d.x1 > ETA && d.x2 > ETA {
                // Increasing segment: only its upper end is undominated.
                out.push(Segment::new(b, b));
            } else {
                out.push(Segment::new(a, b));
            }
        }
        n => {
            let normal = |i: usize| {
                let d = v[(i + 1) % n] - v[i];
                Point2::new(d.x2, -d.x1) * (1.0 / d.norm())
            };
            let nonneg = |x: Point2| x.x1 >= -ETA && x.x2 >= -ETA;
            let edge_ok: Vec<bool> = (0..n).map(|i| nonneg(normal(i))).collect();
            for i in 0..n {
                if edge_ok[i] {
                    let (a, b) = order_by_x1(v[i], v[(i + 1) % n]);
                    out.push(Segment::new(a, b));
                }
            }
            // Vertices whose normal cone meets the positive quadrant but
            // whose adjacent edges do not.
            for i in 0..n {
                let prev = (i + n - 1) % n;
                if edge_ok[i] || edge_ok[prev] {
                    continue;
                }
                let (np, nn) = (normal(prev), normal(i));
                let in_cone = |d: Point2| np.cross(d) >= -ETA && d.cross(nn) >= -ETA;
                if in_cone(Point2::new(1.0, 0.0)) || in_cone(Point2::new(0.0, 1.0)) {
                    out.push(Segment::new(v[i], v[i]));
                }
            }
        }
    }
    out.sort_by(|s, t| s.a.x1.total_cmp(&t.a.x1).then(t.a.x2.total_cmp(&s.a.x2)));
    out
}

fn order_by_x1(a: Point2, b: Point2) -> (Point2, Point2) {
    if a.x1 < b.x1 || (a.x1 == b.x1 && a.x2 > b.x2) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Clips a segment to `{x1 ≥ v1, x2 ≥ v2}`. Endpoints produced by the clip are
/// computed by interpolation from the nearer original endpoint, which is exact
/// for dyadic data such as the PD payoffs.
fn clip_to_box(s: Segment, v1: f64, v2: f64) -> Option<Segment> {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = s.b - s.a;
    for (start, delta, bound) in [(s.a.x1, d.x1, v1), (s.a.x2, d.x2, v2)] {
        if delta.abs() <= ETA {
            if start < bound - ETA {
                return None;
            }
            continue;
        }
        let t = (bound - start) / delta;
        if delta > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
    }
    if t0 > t1 + ETA {
        return None;
    }
    let at = |t: f64, coord_fix: Option<(usize, f64)>| {
        let mut p = if t <= 0.0 {
            s.a
        } else if t >= 1.0 {
            s.b
        } else {
            s.a.lerp(s.b, t)
        };
        // Snap the clipped coordinate exactly onto the box.
        if let Some((k, val)) = coord_fix {
            if k == 0 {
                p.x1 = val;
            } else {
                p.x2 = val;
            }
        }
        p
    };
    let fix = |t: f64| -> Option<(usize, f64)> {
        if t <= 0.0 || t >= 1.0 {
            return None;
        }
        let p = s.a.lerp(s.b, t);
        if (p.x1 - v1).abs() <= 1e-9 {
            Some((0, v1))
        } else if (p.x2 - v2).abs() <= 1e-9 {
            Some((1, v2))
        } else {
            None
        }
    };
    Some(Segment::new(at(t0, fix(t0)), at(t1.max(t0), fix(t1.max(t0)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolygonKind;

    fn p(x1: f64, x2: f64) -> Point2 {
        Point2::new(x1, x2)
    }

    fn bimatrix(rows: &[&[(f64, f64)]]) -> Game {
        let n = rows.len();
        let m = rows[0].len();
        Game::new(
            (0..n).map(|i| format!("r{i}")).collect(),
            (0..m).map(|j| format!("c{j}")).collect(),
            rows.iter().map(|r| r.iter().map(|&(a, b)| p(a, b)).collect()).collect(),
        )
        .unwrap()
    }

    /// Player 1's minmax by enumerating opponent mixtures on a grid and best-responding.
    fn grid_minmax1(g: &Game, step: f64) -> f64 {
        assert_eq!(g.actions2().len(), 2);
        let k = (1.0 / step).round() as usize;
        (0..=k)
            .map(|s| {
                let q = s as f64 / k as f64;
                (0..g.actions1().len())
                    .map(|i| q * g.payoff(i, 0).x1 + (1.0 - q) * g.payoff(i, 1).x1)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn pd_payoffs() {
        let g = make_pd();
        assert_eq!(g.payoff(0, 0), p(2.0, 2.0));
        assert_eq!(g.payoff(1, 1), p(1.0, 1.0));
        assert_eq!(g.payoff(0, 1), p(0.0, 3.0));
        assert_eq!(g.payoff(1, 0), p(3.0, 0.0));
    }

    #[test]
    fn non_total_table_rejected() {
        let r = Game::new(
            vec!["a".into(), "b".into()],
            vec!["c".into()],
            vec![vec![p(0.0, 0.0)]],
        );
        assert!(r.is_err());
    }

    #[test]
    fn polytopes() {
        assert_eq!(make_pd().payoff_polytope().vertices().len(), 4);
        let flat = bimatrix(&[&[(1.0, 1.0), (1.0, 1.0)], &[(1.0, 1.0), (1.0, 1.0)]]);
        assert_eq!(flat.payoff_polytope().kind(), PolygonKind::Point);
        // Matching pennies: payoffs (1,-1) and (-1,1) only, so the hull is a segment.
        let mp = bimatrix(&[&[(1.0, -1.0), (-1.0, 1.0)], &[(-1.0, 1.0), (1.0, -1.0)]]);
        let hull = mp.payoff_polytope();
        assert_eq!(hull.kind(), PolygonKind::Segment);
        assert!(hull.vertices().contains(&p(1.0, -1.0)) && hull.vertices().contains(&p(-1.0, 1.0)));
    }

    #[test]
    fn pd_minmax_matches_grid_oracle() {
        let g = make_pd();
        let (v1, v2) = g.minmax_values();
        assert_eq!((v1, v2), (1.0, 1.0));
        assert!((grid_minmax1(&g, 1e-4) - v1).abs() < 1e-9);
        assert!((grid_minmax1(&g.swapped(), 1e-4) - v2).abs() < 1e-9);
    }

    #[test]
    fn symmetric_zero_sum_has_value_zero() {
        let mp = bimatrix(&[&[(1.0, -1.0), (-1.0, 1.0)], &[(-1.0, 1.0), (1.0, -1.0)]]);
        let (v1, v2) = mp.minmax_values();
        assert!(v1.abs() < 1e-12 && v2.abs() < 1e-12);
        assert!((grid_minmax1(&mp, 1e-4) - v1).abs() < 1e-9);
    }

    #[test]
    fn dominated_opponent_reduces_to_best_response() {
        // Player 2's second column strictly dominates; player 1 still faces mixtures.
        let g = bimatrix(&[&[(4.0, 0.0), (1.0, 1.0)], &[(2.0, 0.0), (3.0, 1.0)]]);
        let (v1, _) = g.minmax_values();
        assert!((grid_minmax1(&g, 1e-4) - v1).abs() < 1e-9);
        // 3x3 exercises the LP route.
        let g3 = bimatrix(&[
            &[(0.0, 0.0), (2.0, 0.0), (-1.0, 0.0)],
            &[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
            &[(1.0, 0.0), (-1.0, 0.0), (0.0, 0.0)],
        ]);
        let (v, _) = g3.minmax_values();
        assert!((v - 1.0 / 12.0).abs() < 1e-9, "value {v}");
    }

    #[test]
    fn symmetric_games_have_equal_minmax() {
        for g in [
            make_pd(),
            bimatrix(&[&[(3.0, 3.0), (0.0, 5.0)], &[(5.0, 0.0), (1.0, 1.0)]]),
            bimatrix(&[&[(2.0, 2.0), (0.0, 1.0)], &[(1.0, 0.0), (1.0, 1.0)]]),
        ] {
            let (a, b) = g.minmax_values();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pd_frontier() {
        let f = make_pd().weak_pareto_frontier();
        assert_eq!(
            f,
            vec![
                Segment::new(p(0.0, 3.0), p(2.0, 2.0)),
                Segment::new(p(2.0, 2.0), p(3.0, 0.0))
            ]
        );
    }

    #[test]
    fn square_frontier_matches_brute_force() {
        let sq = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap();
        let f = weak_pareto_frontier(&sq);
        assert_eq!(f.len(), 2);
        // Brute force on a grid: a point is weakly Pareto iff no grid point is strictly better.
        let n = 100;
        let grid: Vec<Point2> = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| p(i as f64 / n as f64, j as f64 / n as f64)))
            .collect();
        for x in &grid {
            let dominated = grid.iter().any(|y| y.x1 > x.x1 && y.x2 > x.x2);
            let on_frontier = f.iter().any(|s| s.proximal(*x).dist <= 1e-12);
            assert_eq!(!dominated, on_frontier, "at {x:?}");
        }
        let pt = convex_hull(&[p(1.0, 2.0)]).unwrap();
        assert_eq!(weak_pareto_frontier(&pt), vec![Segment::new(p(1.0, 2.0), p(1.0, 2.0))]);
    }

    #[test]
    fn pd_beta_core_is_exact() {
        let core = make_pd().beta_core_image();
        assert_eq!(
            core.segments,
            vec![
                Segment::new(p(1.0, 2.5), p(2.0, 2.0)),
                Segment::new(p(2.0, 2.0), p(2.5, 1.0))
            ]
        );
        assert_eq!(core.excluded_endpoints, vec![p(1.0, 2.5), p(2.5, 1.0)]);
    }

    #[test]
    fn empty_core_when_frontier_below_box() {
        // With genuine minmax values a two-player core is never empty (a Nash payoff is
        // individually rational), so the empty case is exercised on the clipping step.
        let frontier = make_pd().weak_pareto_frontier();
        let core = beta_core_from_frontier(&frontier, p(2.5, 2.5));
        assert!(core.is_empty());
        assert!(matches!(core.param(0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn doubled_pd_core_scales() {
        let pd = make_pd();
        let rows: Vec<Vec<Point2>> = pd
            .payoff_table()
            .iter()
            .map(|r| r.iter().map(|x| *x * 2.0).collect())
            .collect();
        let g = Game::new(pd.actions1().to_vec(), pd.actions2().to_vec(), rows).unwrap();
        let core = g.beta_core_image();
        assert_eq!(core.segments[0], Segment::new(p(2.0, 5.0), p(4.0, 4.0)));
        assert_eq!(core.segments[1], Segment::new(p(4.0, 4.0), p(5.0, 2.0)));
    }

    #[test]
    fn pd_param_examples() {
        let g = make_pd();
        assert_eq!(g.betacore_param(0.5).unwrap(), p(2.0, 2.0));
        let q = g.betacore_param(0.25).unwrap();
        assert!(q.dist(p(1.5, 2.25)) < 1e-12);
        assert!((q.x2 - (3.0 - q.x1 / 2.0)).abs() < 1e-12);
        assert!(g.betacore_param(0.75).unwrap().dist(p(2.25, 1.5)) < 1e-12);
        // Excluded endpoints are never returned.
        let core = g.beta_core_image();
        assert!(!core.is_excluded(g.betacore_param(0.0).unwrap()));
        assert!(!core.is_excluded(g.betacore_param(1.0).unwrap()));
        assert!(g.betacore_param(1.5).is_err());
    }

    #[test]
    fn correlated_strategy_payoff() {
        let g = make_pd();
        let c = CorrelatedStrategy::new(vec![vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        assert_eq!(c.payoff(&g).unwrap(), p(2.5, 1.0));
        assert!(CorrelatedStrategy::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(CorrelatedStrategy::new(vec![vec![-0.5, 1.5]]).is_err());
        let prod = CorrelatedStrategy::product(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(prod.payoff(&g).unwrap(), p(1.0, 2.5));
    }
}

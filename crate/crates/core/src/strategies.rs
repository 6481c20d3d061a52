//! Memory strategies: maps from the PD payoff polytope to {C, D}.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::make_pd;
use crate::geometry::{line_through, offset_halfplane, ConvexPolygon, HalfPlane, Line, Point2, ETA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    C,
    D,
}

impl Action {
    /// Row/column index in the PD table.
    pub fn index(self) -> usize {
        match self {
            Action::C => 0,
            Action::D => 1,
        }
    }

    pub fn flip(self) -> Action {
        match self {
            Action::C => Action::D,
            Action::D => Action::C,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Action::C => "C",
            Action::D => "D",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Action {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "C" | "c" => Ok(Action::C),
            "D" | "d" => Ok(Action::D),
            other => Err(Error::Parse(format!("unknown action {other:?}, expected C or D"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Player::One),
            2 => Ok(Player::Two),
            _ => Err(Error::InvalidParameter(format!("player must be 1 or 2, got {i}"))),
        }
    }

    /// Maps a point into this player's own frame, where the player's
    /// coordinate comes first.
    fn own_frame(self, x: Point2) -> Point2 {
        match self {
            Player::One => x,
            Player::Two => x.swap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayerType {
    Egoist,
    Altruist,
    Balanced,
}

/// Whether an anchor point favors the player who chose it.
pub fn classify_player(v: Point2, player: Player) -> PlayerType {
    let own = player.own_frame(v);
    if (own.x1 - own.x2).abs() <= ETA {
        PlayerType::Balanced
    } else if own.x1 > own.x2 {
        PlayerType::Egoist
    } else {
        PlayerType::Altruist
    }
}

/// The PD payoff polytope, the domain of every memory strategy here.
pub fn pd_polytope() -> &'static ConvexPolygon {
    static POLY: OnceLock<ConvexPolygon> = OnceLock::new();
    POLY.get_or_init(|| make_pd().payoff_polytope())
}

/// `K_i(v, ε)`: the closed `ε`-neighborhood of the base half-plane `T_i(v)`
/// intersected with the player's box.
///
/// Player 1: `T_1(v)` lies under the line through (1,1) and `v`; box
/// `x1 ≥ 1, x2 ≤ v2`. Player 2: `T_2(v)` lies over the same line; box
/// `x1 ≤ v1, x2 ≥ 1`. Inside the box the Euclidean neighborhood of
/// `T_i(v) ∩ 𝔖` coincides with the translated half-plane, so membership is a
/// single signed-distance test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CooperationRegion {
    pub player: Player,
    pub anchor: Point2,
    pub eps: f64,
    /// `T_i(v)` as a half-plane.
    pub base: HalfPlane,
    /// Boundary of `(T_i(v))^ε`.
    pub widened: HalfPlane,
}

impl CooperationRegion {
    pub fn new(player: Player, v: Point2, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be > 0, got {eps}")));
        }
        if (v.x1 - 1.0).abs() <= ETA {
            return Err(Error::InvalidParameter(
                "anchor with v1 = 1 gives a vertical base line".into(),
            ));
        }
        let line = line_through(Point2::new(1.0, 1.0), v)?;
        let base = match player {
            Player::One => HalfPlane::under(&line)?,
            Player::Two => HalfPlane::over(&line)?,
        };
        let widened = offset_halfplane(&base, eps)?;
        Ok(Self {
            player,
            anchor: v,
            eps,
            base,
            widened,
        })
    }

    pub fn base_line(&self) -> Line {
        self.base.boundary()
    }

    /// Boundary line of `(T_i(v))^ε`.
    pub fn outer_line(&self) -> Line {
        self.widened.boundary()
    }

    pub fn in_box(&self, x: Point2) -> bool {
        let v = self.anchor;
        match self.player {
            Player::One => x.x1 >= 1.0 && x.x2 <= v.x2,
            Player::Two => x.x1 <= v.x1 && x.x2 >= 1.0,
        }
    }

    pub fn contains(&self, x: Point2) -> bool {
        self.in_box(x) && self.widened.contains(x)
    }
}

type Predicate = Arc<dyn Fn(Point2) -> Action + Send + Sync>;

#[derive(Clone)]
enum Rule {
    Good { eps: f64 },
    SemiCoop { region: CooperationRegion, off_core: bool },
    /// D iff `p·y1 + q·y2 + r > 0` in the player's own frame.
    Affine { p: f64, q: f64, r: f64, checked: bool },
    Constant(Action),
    Custom { name: String, f: Predicate },
}

/// Descriptive view of a strategy, for reports and summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StrategyKind {
    Good { eps: f64 },
    SemiCoop { v: Point2, eps: f64 },
    Simple { p: f64, q: f64, r: f64 },
    Affine { p: f64, q: f64, r: f64 },
    Constant { action: Action },
    Custom { name: String },
}

/// A memory strategy of one player. Total on the plane; [`evaluate`]
/// additionally enforces the PD domain.
#[derive(Clone)]
pub struct MemoryStrategy {
    player: Player,
    rule: Rule,
}

impl fmt::Debug for MemoryStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MemoryStrategy")
            .field("player", &self.player)
            .field("kind", &self.kind())
            .finish()
    }
}

impl MemoryStrategy {
    /// Smale's good strategy. Player 1 cooperates iff `x2 < x1 + ε`,
    /// `x1 ≥ 1` and `x2 ≤ 2`; player 2 mirrors.
    pub fn good(player: Player, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be > 0, got {eps}")));
        }
        Ok(Self {
            player,
            rule: Rule::Good { eps },
        })
    }

    /// Semi-cooperative strategy anchored at `v`: cooperate on `K_i(v, ε)`.
    ///
    /// The excluded β-core endpoints are rejected. Other anchors off the
    /// β-core are accepted and flagged through [`MemoryStrategy::is_off_core`].
    pub fn semicoop(player: Player, v: Point2, eps: f64) -> Result<Self> {
        let core = crate::dynamics::pd_beta_core();
        if core.is_excluded(v) {
            return Err(Error::InvalidParameter(format!(
                "({}, {}) is an excluded endpoint of the β-core",
                v.x1, v.x2
            )));
        }
        let off_core = !core.contains(v);
        let region = CooperationRegion::new(player, v, eps)?;
        Ok(Self {
            player,
            rule: Rule::SemiCoop { region, off_core },
        })
    }

    /// Simple strategy with separating map `L(y) = p·y1 + q·y2 + r` in the
    /// player's own frame: D iff `L > 0`, C otherwise (the zero set maps to C).
    /// Requires `L(1,1), L(3,0) ≤ 0 ≤ L(2,2), L(0,3)`.
    pub fn simple(player: Player, p: f64, q: f64, r: f64) -> Result<Self> {
        check_simple_constraints(p, q, r)?;
        Ok(Self {
            player,
            rule: Rule::Affine { p, q, r, checked: true },
        })
    }

    /// Like [`MemoryStrategy::simple`] but without the sign constraints.
    pub fn affine(player: Player, p: f64, q: f64, r: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite() && r.is_finite()) || p.hypot(q) <= ETA {
            return Err(Error::InvalidParameter("affine map must be non-constant and finite".into()));
        }
        Ok(Self {
            player,
            rule: Rule::Affine { p, q, r, checked: false },
        })
    }

    pub fn constant(player: Player, action: Action) -> Self {
        Self {
            player,
            rule: Rule::Constant(action),
        }
    }

    /// Arbitrary predicate on the average payoff pair (in the common frame).
    pub fn custom(
        player: Player,
        name: impl Into<String>,
        f: impl Fn(Point2) -> Action + Send + Sync + 'static,
    ) -> Self {
        Self {
            player,
            rule: Rule::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn kind(&self) -> StrategyKind {
        match &self.rule {
            Rule::Good { eps } => StrategyKind::Good { eps: *eps },
            Rule::SemiCoop { region, .. } => StrategyKind::SemiCoop {
                v: region.anchor,
                eps: region.eps,
            },
            Rule::Affine { p, q, r, checked: true } => StrategyKind::Simple { p: *p, q: *q, r: *r },
            Rule::Affine { p, q, r, checked: false } => StrategyKind::Affine { p: *p, q: *q, r: *r },
            Rule::Constant(a) => StrategyKind::Constant { action: *a },
            Rule::Custom { name, .. } => StrategyKind::Custom { name: name.clone() },
        }
    }

    /// The cooperation region of a semi-cooperative strategy.
    pub fn cooperation_region(&self) -> Option<&CooperationRegion> {
        match &self.rule {
            Rule::SemiCoop { region, .. } => Some(region),
            _ => None,
        }
    }

    /// `(anchor, eps)` for semi-cooperative strategies.
    pub fn anchor(&self) -> Option<(Point2, f64)> {
        self.cooperation_region().map(|r| (r.anchor, r.eps))
    }

    pub fn is_off_core(&self) -> bool {
        matches!(self.rule, Rule::SemiCoop { off_core: true, .. })
    }

    /// The action at `x`, without a domain check.
    #[inline]
    pub fn action_at(&self, x: Point2) -> Action {
        match &self.rule {
            Rule::Good { eps } => {
                let y = self.player.own_frame(x);
                if y.x2 < y.x1 + eps && y.x1 >= 1.0 && y.x2 <= 2.0 {
                    Action::C
                } else {
                    Action::D
                }
            }
            Rule::SemiCoop { region, .. } => {
                if region.contains(x) {
                    Action::C
                } else {
                    Action::D
                }
            }
            Rule::Affine { p, q, r, .. } => {
                let y = self.player.own_frame(x);
                if p * y.x1 + q * y.x2 + r > 0.0 {
                    Action::D
                } else {
                    Action::C
                }
            }
            Rule::Constant(a) => *a,
            Rule::Custom { f, .. } => f(x),
        }
    }

    /// The action at `x ∈ 𝔖`.
    pub fn evaluate(&self, x: Point2) -> Result<Action> {
        if !pd_polytope().contains(x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.action_at(x))
    }

    /// The strategy with every action flipped.
    pub fn complement(&self) -> MemoryStrategy {
        let inner = self.clone();
        let name = format!("not({:?})", self.kind());
        MemoryStrategy::custom(self.player, name, move |x| inner.action_at(x).flip())
    }
}

/// Free-function form of [`MemoryStrategy::evaluate`].
pub fn evaluate(s: &MemoryStrategy, x: Point2) -> Result<Action> {
    s.evaluate(x)
}

pub fn good_strategy(player: Player, eps: f64) -> Result<MemoryStrategy> {
    MemoryStrategy::good(player, eps)
}

pub fn semicoop_strategy(player: Player, v: Point2, eps: f64) -> Result<MemoryStrategy> {
    MemoryStrategy::semicoop(player, v, eps)
}

pub fn simple_strategy(player: Player, p: f64, q: f64, r: f64) -> Result<MemoryStrategy> {
    MemoryStrategy::simple(player, p, q, r)
}

fn check_simple_constraints(p: f64, q: f64, r: f64) -> Result<()> {
    if !(p.is_finite() && q.is_finite() && r.is_finite()) {
        return Err(Error::InvalidParameter("non-finite coefficients".into()));
    }
    if p.hypot(q) <= ETA {
        return Err(Error::InvalidParameter(
            "constant separating map (all constraints only hold at equality)".into(),
        ));
    }
    let l = |x1: f64, x2: f64| p * x1 + q * x2 + r;
    let checks = [
        ("L(1,1) <= 0", l(1.0, 1.0) <= ETA),
        ("L(3,0) <= 0", l(3.0, 0.0) <= ETA),
        ("L(2,2) >= 0", l(2.0, 2.0) >= -ETA),
        ("L(0,3) >= 0", l(0.0, 3.0) >= -ETA),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| *name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "simple strategy constraints violated by L = {p}·x1 + {q}·x2 + {r}: {}",
            failed.join(", ")
        )))
    }
}

/// Cells of the partition of 𝔖 induced by a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    /// Both cooperate.
    Delta,
    /// Only player 2 cooperates.
    Omega1,
    /// Only player 1 cooperates.
    Omega2,
    /// Both defect.
    Omega3,
}

impl Cell {
    pub fn from_actions(a1: Action, a2: Action) -> Cell {
        match (a1, a2) {
            (Action::C, Action::C) => Cell::Delta,
            (Action::D, Action::C) => Cell::Omega1,
            (Action::C, Action::D) => Cell::Omega2,
            (Action::D, Action::D) => Cell::Omega3,
        }
    }

    /// PD stage payoff played on this cell.
    pub fn pd_payoff(self) -> Point2 {
        match self {
            Cell::Delta => Point2::new(2.0, 2.0),
            Cell::Omega1 => Point2::new(3.0, 0.0),
            Cell::Omega2 => Point2::new(0.0, 3.0),
            Cell::Omega3 => Point2::new(1.0, 1.0),
        }
    }

    pub const ALL: [Cell; 4] = [Cell::Delta, Cell::Omega1, Cell::Omega2, Cell::Omega3];
}

/// The partition {Δ, Ω1, Ω2, Ω3} of 𝔖 for a profile.
#[derive(Debug, Clone)]
pub struct RegionPartition {
    pub s1: MemoryStrategy,
    pub s2: MemoryStrategy,
}

impl RegionPartition {
    pub fn cell(&self, x: Point2) -> Cell {
        Cell::from_actions(self.s1.action_at(x), self.s2.action_at(x))
    }

    pub fn cell_checked(&self, x: Point2) -> Result<Cell> {
        Ok(Cell::from_actions(self.s1.evaluate(x)?, self.s2.evaluate(x)?))
    }
}

pub fn region_partition(s1: &MemoryStrategy, s2: &MemoryStrategy) -> Result<RegionPartition> {
    if s1.player() != Player::One || s2.player() != Player::Two {
        return Err(Error::InvalidParameter(
            "partition expects a player-1 and a player-2 strategy".into(),
        ));
    }
    Ok(RegionPartition {
        s1: s1.clone(),
        s2: s2.clone(),
    })
}

/// Parses a strategy spec such as `good:eps=0.1`, `semicoop:v=1.5,2.25:eps=0.1`,
/// `simple:p=-1,q=1,r=0` or `const:C`.
///
/// ```text
/// spec  := kind (':' field)*
/// field := key '=' value (',' (key '=' value | value))*
/// ```
///
/// A comma-separated piece without `=` continues the previous value, which
/// is how `v=1.5,2.25` carries two numbers. Errors name the 1-based column
/// of the offending piece.
pub fn parse_strategy(player: Player, spec: &str) -> Result<MemoryStrategy> {
    let mut segments = spec.split(':');
    let kind = segments.next().unwrap_or("").trim();
    let mut fields: Vec<(String, Vec<String>, usize)> = Vec::new();
    let mut bare: Vec<(String, usize)> = Vec::new();
    let mut col = kind.len() + 2;
    for seg in segments {
        let mut piece_col = col;
        for piece in seg.split(',') {
            match piece.split_once('=') {
                Some((k, v)) => fields.push((k.trim().to_string(), vec![v.trim().to_string()], piece_col)),
                None => match fields.last_mut() {
                    Some(last) if last.2 >= col => last.1.push(piece.trim().to_string()),
                    _ => bare.push((piece.trim().to_string(), piece_col)),
                },
            }
            piece_col += piece.len() + 1;
        }
        col += seg.len() + 1;
    }
    let err = |c: usize, msg: String| Error::Parse(format!("column {c}: {msg}"));
    let take = |key: &str| -> Option<(Vec<String>, usize)> {
        fields.iter().find(|f| f.0 == key).map(|f| (f.1.clone(), f.2))
    };
    let number = |key: &str| -> Result<f64> {
        let (vals, c) = take(key).ok_or_else(|| err(1, format!("`{kind}` needs `{key}=`")))?;
        if vals.len() != 1 {
            return Err(err(c, format!("`{key}` takes one number")));
        }
        vals[0].parse().map_err(|_| err(c, format!("`{key}` is not a number: {:?}", vals[0])))
    };
    let allowed: &[&str] = match kind {
        "good" => &["eps"],
        "semicoop" => &["v", "eps"],
        "simple" | "affine" => &["p", "q", "r"],
        "const" => &["action"],
        _ => return Err(err(1, format!("unknown strategy kind {kind:?}"))),
    };
    if let Some((k, _, c)) = fields.iter().find(|f| !allowed.contains(&f.0.as_str())) {
        return Err(err(*c, format!("unknown key `{k}` for `{kind}`")));
    }
    if let Some((k, _, c)) = fields.iter().enumerate().find_map(|(i, f)| {
        fields[..i].iter().any(|g| g.0 == f.0).then_some(f)
    }) {
        return Err(err(*c, format!("duplicate key `{k}`")));
    }
    if kind != "const" {
        if let Some((b, c)) = bare.first() {
            return Err(err(*c, format!("expected key=value, got {b:?}")));
        }
    }
    match kind {
        "good" => MemoryStrategy::good(player, number("eps")?),
        "semicoop" => {
            let (vals, c) = take("v").ok_or_else(|| err(1, "`semicoop` needs `v=x1,x2`".into()))?;
            let coords: Vec<f64> = vals
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(c, format!("`v` must be two numbers, got {:?}", vals.join(","))))?;
            if coords.len() != 2 {
                return Err(err(c, format!("`v` must be two numbers, got {}", coords.len())));
            }
            MemoryStrategy::semicoop(player, Point2::new(coords[0], coords[1]), number("eps")?)
        }
        "simple" => MemoryStrategy::simple(player, number("p")?, number("q")?, number("r")?),
        "affine" => MemoryStrategy::affine(player, number("p")?, number("q")?, number("r")?),
        "const" => {
            let (text, c) = match (take("action"), bare.as_slice()) {
                (Some((v, c)), []) if v.len() == 1 => (v[0].clone(), c),
                (None, [(b, c)]) => (b.clone(), *c),
                _ => return Err(err(1, "`const` takes exactly one action, C or D".into())),
            };
            let a: Action = text.parse().map_err(|_| err(c, format!("unknown action {text:?}")))?;
            Ok(MemoryStrategy::constant(player, a))
        }
        _ => unreachable!("kind checked above"),
    }
}

/// Inverse of [`parse_strategy`] for the built-in kinds.
pub fn strategy_spec(s: &MemoryStrategy) -> Option<String> {
    Some(match s.kind() {
        StrategyKind::Good { eps } => format!("good:eps={eps}"),
        StrategyKind::SemiCoop { v, eps } => format!("semicoop:v={},{}:eps={eps}", v.x1, v.x2),
        StrategyKind::Simple { p, q, r } => format!("simple:p={p},q={q},r={r}"),
        StrategyKind::Affine { p, q, r } => format!("affine:p={p},q={q},r={r}"),
        StrategyKind::Constant { action } => format!("const:{action}"),
        StrategyKind::Custom { .. } => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{convex_hull, ConvexSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x1: f64, x2: f64) -> Point2 {
        Point2::new(x1, x2)
    }

    fn sample_pd(n: usize, seed: u64) -> Vec<Point2> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = pd_polytope();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x = p(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
            if poly.contains(x) {
                out.push(x);
            }
        }
        out
    }

    #[test]
    fn good_strategy_examples() {
        let s = MemoryStrategy::good(Player::One, 0.1).unwrap();
        assert_eq!(s.evaluate(p(1.5, 1.5)).unwrap(), Action::C);
        assert_eq!(s.evaluate(p(1.5, 1.65)).unwrap(), Action::D);
        // (0.5, 0.5) is outside 𝔖; the rule itself defects there since x1 < 1.
        assert_eq!(s.action_at(p(0.5, 0.5)), Action::D);
        assert_eq!(s.action_at(p(0.9, 1.2)), Action::D);
        assert_eq!(s.evaluate(p(2.0, 2.0)).unwrap(), Action::C);
        assert!(MemoryStrategy::good(Player::One, 0.0).is_err());
        let s2 = MemoryStrategy::good(Player::Two, 0.1).unwrap();
        assert_eq!(s2.evaluate(p(1.65, 1.5)).unwrap(), Action::D);
        assert_eq!(s2.evaluate(p(1.5, 1.5)).unwrap(), Action::C);
    }

    #[test]
    fn semicoop_examples() {
        let s = MemoryStrategy::semicoop(Player::One, p(2.0, 2.0), 0.1).unwrap();
        assert_eq!(s.evaluate(p(1.5, 1.5)).unwrap(), Action::C);

        // Base line x2 = 2.5 x1 - 1.5; at (2,2): 2 <= 3.5, x1 >= 1, x2 <= 2.25.
        let s = MemoryStrategy::semicoop(Player::One, p(1.5, 2.25), 0.1).unwrap();
        assert_eq!(s.evaluate(p(2.0, 2.0)).unwrap(), Action::C);
        assert_eq!(s.evaluate(p(1.2, 2.4)).unwrap(), Action::D);

        let s2 = MemoryStrategy::semicoop(Player::Two, p(2.25, 1.5), 0.1).unwrap();
        assert_eq!(s2.evaluate(p(2.5, 1.0)).unwrap(), Action::D);
    }

    #[test]
    fn semicoop_rejects_excluded_and_flags_off_core() {
        assert!(MemoryStrategy::semicoop(Player::One, p(1.0, 2.5), 0.1).is_err());
        assert!(MemoryStrategy::semicoop(Player::Two, p(2.5, 1.0), 0.1).is_err());
        assert!(MemoryStrategy::semicoop(Player::One, p(2.0, 2.0), -0.1).is_err());
        let on = MemoryStrategy::semicoop(Player::One, p(1.5, 2.25), 0.1).unwrap();
        assert!(!on.is_off_core());
        let off = MemoryStrategy::semicoop(Player::One, p(1.8, 1.8), 0.1).unwrap();
        assert!(off.is_off_core());
    }

    #[test]
    fn widened_half_plane_matches_polygon_neighborhood() {
        // Inside the box, distance to T_i(v) ∩ 𝔖 equals the half-plane distance.
        let pts = sample_pd(20_000, 7);
        for (player, v) in [
            (Player::One, p(1.5, 2.25)),
            (Player::One, p(2.25, 1.5)),
            (Player::Two, p(1.2, 2.4)),
            (Player::Two, p(2.4, 1.2)),
        ] {
            let region = CooperationRegion::new(player, v, 0.1).unwrap();
            let t = pd_polytope().clip(&region.base).unwrap();
            for &x in &pts {
                if !region.in_box(x) {
                    continue;
                }
                let by_polygon = t.proximal(x).dist <= 0.1 + ETA;
                assert_eq!(by_polygon, region.contains(x), "{player:?} {v:?} at {x:?}");
            }
        }
    }

    #[test]
    fn simple_examples() {
        let s = MemoryStrategy::simple(Player::One, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(s.evaluate(p(2.0, 1.0)).unwrap(), Action::C);
        assert_eq!(s.evaluate(p(0.0, 3.0)).unwrap(), Action::D);
        // Zero set maps to C.
        assert_eq!(s.evaluate(p(1.5, 1.5)).unwrap(), Action::C);
        assert!(MemoryStrategy::simple(Player::One, 1.0, 1.0, -1.0).is_err());
        assert!(MemoryStrategy::simple(Player::One, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn simple_constraint_checker_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut accepted = 0;
        for _ in 0..5_000 {
            let (a, b, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-4.0..4.0));
            let l = |x1: f64, x2: f64| a * x1 + b * x2 + c;
            let oracle = l(1.0, 1.0) <= 0.0 && l(3.0, 0.0) <= 0.0 && l(2.0, 2.0) >= 0.0 && l(0.0, 3.0) >= 0.0;
            let got = MemoryStrategy::simple(Player::One, a, b, c).is_ok();
            assert_eq!(oracle, got, "({a}, {b}, {c})");
            accepted += got as usize;
        }
        assert!(accepted > 0);
    }

    #[test]
    fn constant_and_domain() {
        let s = MemoryStrategy::constant(Player::One, Action::D);
        assert_eq!(s.evaluate(p(1.5, 1.5)).unwrap(), Action::D);
        assert!(matches!(s.evaluate(p(0.5, 0.5)), Err(Error::OutOfDomain(_))));
        assert!(matches!(s.evaluate(p(3.0, 3.0)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_player(p(2.25, 1.5), Player::One), PlayerType::Egoist);
        assert_eq!(classify_player(p(2.25, 1.5), Player::Two), PlayerType::Altruist);
        assert_eq!(classify_player(p(2.0, 2.0), Player::One), PlayerType::Balanced);
        assert_eq!(classify_player(p(2.0, 2.0), Player::Two), PlayerType::Balanced);
        assert_eq!(classify_player(p(1.5, 2.25), Player::One), PlayerType::Altruist);
        assert_eq!(classify_player(p(1.5, 2.25), Player::Two), PlayerType::Egoist);
    }

    #[test]
    fn partition_examples() {
        let pts = sample_pd(20_000, 11);
        let sc = |pl, v| MemoryStrategy::semicoop(pl, v, 0.1).unwrap();

        let same = region_partition(&sc(Player::One, p(2.0, 2.0)), &sc(Player::Two, p(2.0, 2.0))).unwrap();
        assert!(pts.iter().all(|&x| same.cell(x) != Cell::Omega3));

        let cc = region_partition(
            &MemoryStrategy::constant(Player::One, Action::C),
            &MemoryStrategy::constant(Player::Two, Action::C),
        )
        .unwrap();
        assert!(pts.iter().all(|&x| cc.cell(x) == Cell::Delta));

        let egoists = region_partition(
            &MemoryStrategy::semicoop(Player::One, p(2.25, 1.5), 0.05).unwrap(),
            &MemoryStrategy::semicoop(Player::Two, p(1.5, 2.25), 0.05).unwrap(),
        )
        .unwrap();
        for cell in Cell::ALL {
            assert!(pts.iter().any(|&x| egoists.cell(x) == cell), "{cell:?} empty");
        }
        assert!(region_partition(&sc(Player::Two, p(2.0, 2.0)), &sc(Player::Two, p(2.0, 2.0))).is_err());
    }

    #[test]
    fn parse_examples() {
        let s = parse_strategy(Player::One, "good:eps=0.1").unwrap();
        assert_eq!(s.kind(), StrategyKind::Good { eps: 0.1 });
        let s = parse_strategy(Player::Two, "semicoop:v=1.5,2.25:eps=0.1").unwrap();
        assert_eq!(s.kind(), StrategyKind::SemiCoop { v: p(1.5, 2.25), eps: 0.1 });
        let s = parse_strategy(Player::One, "simple:p=-1,q=1,r=0").unwrap();
        assert_eq!(s.kind(), StrategyKind::Simple { p: -1.0, q: 1.0, r: 0.0 });
        assert_eq!(
            parse_strategy(Player::One, "const:C").unwrap().kind(),
            StrategyKind::Constant { action: Action::C }
        );
        assert_eq!(
            parse_strategy(Player::One, "const:action=D").unwrap().kind(),
            StrategyKind::Constant { action: Action::D }
        );
        for s in ["good:eps=0.1", "semicoop:v=1.5,2.25:eps=0.1", "simple:p=-1,q=1,r=0", "const:C"] {
            let parsed = parse_strategy(Player::One, s).unwrap();
            assert_eq!(strategy_spec(&parsed).unwrap(), s);
        }
    }

    #[test]
    fn parse_errors_are_positional() {
        let e = |s: &str| parse_strategy(Player::One, s).unwrap_err().to_string();
        assert!(e("nice:eps=1").contains("column 1"));
        assert!(e("good:eps=abc").contains("column 6"), "{}", e("good:eps=abc"));
        assert!(e("semicoop:v=1.5:eps=0.1").contains("column 10"));
        assert!(e("good:eps=0.1:foo=2").contains("column 14"));
        assert!(e("simple:p=1,q=1,r=-1").contains("L(3,0)"));
        assert!(e("good:eps=0.1:eps=0.2").contains("duplicate"));
        assert!(e("const:X").contains("unknown action"));
        assert!(e("good").contains("needs `eps=`"));
    }

    #[test]
    fn good_region_inside_semicoop_region_at_cc() {
        // Coordinate offset eps/sqrt2 is within Euclidean distance eps/2 of x2 = x1.
        let eps = 0.1;
        let sc = MemoryStrategy::semicoop(Player::One, p(2.0, 2.0), eps).unwrap();
        for x in sample_pd(50_000, 5) {
            if x.x2 < x.x1 + eps / 2f64.sqrt() && x.x1 >= 1.0 && x.x2 <= 2.0 {
                assert_eq!(sc.action_at(x), Action::C, "{x:?}");
            }
        }
        let _ = convex_hull(&[p(0.0, 0.0)]);
    }
}

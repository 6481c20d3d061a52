//! Planar geometry over the payoff polytope.
//!
//! Everything here works in `f64` with a single absolute tolerance [`ETA`].
//! Membership tests are closed: a point within `ETA` of a boundary is inside.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric tolerance on normalized quantities.
pub const ETA: f64 = 1e-12;

/// A point (or vector) in payoff space: `x1` is player 1's coordinate, `x2` player 2's.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise rotation by a right angle.
    pub fn perp(self) -> Self {
        Self::new(-self.x2, self.x1)
    }

    /// Exchanges the two players' coordinates.
    pub fn swap(self) -> Self {
        Self::new(self.x2, self.x1)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        self + (other - self) * t
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x1, x2): (f64, f64)) -> Self {
        Self::new(x1, x2)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x1 * rhs, self.x2 * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2)
    }
}

/// The line `p·x1 + q·x2 = r` with `p² + q² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl Line {
    /// Normalizes arbitrary coefficients.
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        let n = p.hypot(q);
        if !(n > ETA) || !r.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "line coefficients ({p}, {q}, {r}) do not define a line"
            )));
        }
        Ok(Self {
            p: p / n,
            q: q / n,
            r: r / n,
        })
    }

    pub fn normal(&self) -> Point2 {
        Point2::new(self.p, self.q)
    }

    /// Unit direction vector (the normal rotated clockwise).
    pub fn direction(&self) -> Point2 {
        Point2::new(self.q, -self.p)
    }

    /// Signed distance of `x` from the line, positive on the normal's side.
    pub fn eval(&self, x: Point2) -> f64 {
        self.p * x.x1 + self.q * x.x2 - self.r
    }

    pub fn contains(&self, x: Point2) -> bool {
        self.eval(x).abs() <= ETA
    }

    pub fn is_vertical(&self) -> bool {
        self.q.abs() <= ETA
    }

    /// Orthogonal projection of `x` onto the line.
    pub fn foot(&self, x: Point2) -> Point2 {
        x - self.normal() * self.eval(x)
    }

    /// Height of the line above `x1`; `None` for vertical lines.
    pub fn x2_at(&self, x1: f64) -> Option<f64> {
        (!self.is_vertical()).then(|| (self.r - self.p * x1) / self.q)
    }
}

/// Line through two distinct points, normal pointing to the left of `a → b`.
pub fn line_through(a: Point2, b: Point2) -> Result<Line> {
    let d = b - a;
    if d.norm() <= ETA {
        return Err(Error::DegenerateInput(format!(
            "points ({}, {}) and ({}, {}) coincide",
            a.x1, a.x2, b.x1, b.x2
        )));
    }
    let n = d.perp();
    Line::new(n.x1, n.x2, n.dot(a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineIntersection {
    Point(Point2),
    Parallel,
}

pub fn intersect_lines(l1: &Line, l2: &Line) -> LineIntersection {
    let det = l1.p * l2.q - l1.q * l2.p;
    if det.abs() <= ETA {
        return LineIntersection::Parallel;
    }
    let x1 = (l1.r * l2.q - l1.q * l2.r) / det;
    let x2 = (l1.p * l2.r - l1.r * l2.p) / det;
    LineIntersection::Point(Point2::new(x1, x2))
}

/// Which side of a non-vertical line a half-plane keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Over,
    Under,
}

/// Closed half-plane `{x : n·x ≤ c}` with unit outward normal `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    normal: Point2,
    offset: f64,
}

impl HalfPlane {
    /// `{x : n·x ≤ c}`; `n` need not be normalized.
    pub fn new(normal: Point2, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > ETA) {
            return Err(Error::DegenerateInput("zero half-plane normal".into()));
        }
        Ok(Self {
            normal: normal * (1.0 / n),
            offset: offset / n,
        })
    }

    /// The side of `line` with the larger `x2` (e(l)).
    pub fn over(line: &Line) -> Result<Self> {
        Self::side(line, Side::Over)
    }

    /// The side of `line` with the smaller `x2` (h(l)).
    pub fn under(line: &Line) -> Result<Self> {
        Self::side(line, Side::Under)
    }

    pub fn side(line: &Line, side: Side) -> Result<Self> {
        if line.is_vertical() {
            return Err(Error::DegenerateInput(
                "over/under is undefined for a vertical line".into(),
            ));
        }
        // Outward normal of "under" points up.
        let up = if line.q > 0.0 { 1.0 } else { -1.0 };
        let s = match side {
            Side::Under => up,
            Side::Over => -up,
        };
        Ok(Self {
            normal: line.normal() * s,
            offset: line.r * s,
        })
    }

    /// The side of `line` containing `witness`, which must not lie on the line.
    pub fn containing(line: &Line, witness: Point2) -> Result<Self> {
        let v = line.eval(witness);
        if v.abs() <= ETA {
            return Err(Error::DegenerateInput(
                "witness lies on the boundary line".into(),
            ));
        }
        let s = if v < 0.0 { 1.0 } else { -1.0 };
        Ok(Self {
            normal: line.normal() * s,
            offset: line.r * s,
        })
    }

    pub fn outward_normal(&self) -> Point2 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn boundary(&self) -> Line {
        Line {
            p: self.normal.x1,
            q: self.normal.x2,
            r: self.offset,
        }
    }

    /// Positive outside, negative inside, Euclidean.
    pub fn signed_distance(&self, x: Point2) -> f64 {
        self.normal.dot(x) - self.offset
    }

    pub fn contains(&self, x: Point2) -> bool {
        self.signed_distance(x) <= ETA
    }
}

/// Translates the boundary of `h` by `eps` along its outward normal, realizing
/// the closed Euclidean `eps`-neighborhood of the half-plane.
pub fn offset_halfplane(h: &HalfPlane, eps: f64) -> Result<HalfPlane> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    Ok(HalfPlane {
        normal: h.normal,
        offset: h.offset + eps,
    })
}

/// Closed segment; `a == b` is allowed and denotes a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn at(&self, t: f64) -> Point2 {
        if t >= 1.0 {
            self.b
        } else if t <= 0.0 {
            self.a
        } else {
            self.a.lerp(self.b, t)
        }
    }
}

/// Result of a nearest-point query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proximal {
    pub dist: f64,
    pub point: Point2,
}

/// Closed convex sets supporting nearest-point queries.
pub trait ConvexSet {
    fn proximal(&self, p: Point2) -> Proximal;

    fn contains_point(&self, p: Point2) -> bool {
        self.proximal(p).dist <= ETA
    }
}

impl ConvexSet for Point2 {
    fn proximal(&self, p: Point2) -> Proximal {
        Proximal {
            dist: self.dist(p),
            point: *self,
        }
    }
}

impl ConvexSet for Segment {
    fn proximal(&self, p: Point2) -> Proximal {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        let point = if len2 <= ETA * ETA {
            self.a
        } else {
            self.at((p - self.a).dot(d) / len2)
        };
        Proximal {
            dist: point.dist(p),
            point,
        }
    }
}

impl ConvexSet for HalfPlane {
    fn proximal(&self, p: Point2) -> Proximal {
        let s = self.signed_distance(p);
        if s <= 0.0 {
            Proximal { dist: 0.0, point: p }
        } else {
            Proximal {
                dist: s,
                point: p - self.normal * s,
            }
        }
    }

    fn contains_point(&self, p: Point2) -> bool {
        self.contains(p)
    }
}

/// Distance from `p` to a closed convex set and the (unique) proximal point.
pub fn distance_to<S: ConvexSet + ?Sized>(set: &S, p: Point2) -> Proximal {
    set.proximal(p)
}

/// Membership in the closed Euclidean `eps`-neighborhood of `set`.
pub fn eps_contains<S: ConvexSet + ?Sized>(set: &S, eps: f64, p: Point2) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    Ok(set.proximal(p).dist <= eps + ETA)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolygonKind {
    Point,
    Segment,
    Polygon,
}

/// Nonempty convex polygon with counter-clockwise vertices.
///
/// Segments and single points are valid values; [`ConvexPolygon::kind`] tells
/// them apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn kind(&self) -> PolygonKind {
        match self.vertices.len() {
            1 => PolygonKind::Point,
            2 => PolygonKind::Segment,
            _ => PolygonKind::Polygon,
        }
    }

    /// Edges in counter-clockwise order. A segment yields one edge, a point none.
    pub fn edges(&self) -> Vec<Segment> {
        let v = &self.vertices;
        match v.len() {
            1 => Vec::new(),
            2 => vec![Segment::new(v[0], v[1])],
            n => (0..n).map(|i| Segment::new(v[i], v[(i + 1) % n])).collect(),
        }
    }

    /// Axis-aligned bounding box as (lower-left, upper-right).
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            lo = Point2::new(lo.x1.min(v.x1), lo.x2.min(v.x2));
            hi = Point2::new(hi.x1.max(v.x1), hi.x2.max(v.x2));
        }
        (lo, hi)
    }

    /// Largest distance between two points of the polygon.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(v[i].dist(v[j]));
            }
        }
        d
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        0.5 * (0..v.len())
            .map(|i| v[i].cross(v[(i + 1) % v.len()]))
            .sum::<f64>()
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self.kind() {
            PolygonKind::Polygon => self.edges().iter().all(|e| {
                let d = e.b - e.a;
                d.cross(p - e.a) >= -ETA * d.norm()
            }),
            _ => self.proximal(p).dist <= ETA,
        }
    }

    /// Intersection with a closed half-plane; `None` when empty.
    pub fn clip(&self, h: &HalfPlane) -> Option<ConvexPolygon> {
        let v = &self.vertices;
        let n = v.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let cur = v[i];
            let next = v[(i + 1) % n];
            let sc = h.signed_distance(cur);
            let sn = h.signed_distance(next);
            if sc <= ETA {
                out.push(cur);
            }
            if n > 1 && ((sc < -ETA && sn > ETA) || (sc > ETA && sn < -ETA)) {
                let t = sc / (sc - sn);
                out.push(cur.lerp(next, t));
            }
        }
        convex_hull(&out).ok()
    }

    pub fn clip_all<'a>(&self, hs: impl IntoIterator<Item = &'a HalfPlane>) -> Option<ConvexPolygon> {
        hs.into_iter()
            .try_fold(self.clone(), |poly, h| poly.clip(h))
    }
}

impl ConvexSet for ConvexPolygon {
    fn proximal(&self, p: Point2) -> Proximal {
        if self.kind() == PolygonKind::Point {
            return self.vertices[0].proximal(p);
        }
        if self.kind() == PolygonKind::Polygon && self.contains(p) {
            return Proximal { dist: 0.0, point: p };
        }
        self.edges()
            .iter()
            .map(|e| e.proximal(p))
            .min_by(|a, b| a.dist.total_cmp(&b.dist))
            .expect("segment or polygon has at least one edge")
    }

    fn contains_point(&self, p: Point2) -> bool {
        self.contains(p)
    }
}

/// Minimal counter-clockwise convex hull (Andrew's monotone chain).
///
/// Duplicate and collinear boundary points are dropped. Degenerate hulls come
/// back as one- or two-vertex polygons.
pub fn convex_hull(points: &[Point2]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::DegenerateInput("convex hull of an empty set".into()));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::DegenerateInput(format!(
            "non-finite point ({}, {})",
            p.x1, p.x2
        )));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x1.total_cmp(&b.x1).then(a.x2.total_cmp(&b.x2)));
    pts.dedup_by(|a, b| a.dist(*b) <= ETA);
    if pts.len() <= 2 {
        return Ok(ConvexPolygon { vertices: pts });
    }

    // Keep only strict left turns.
    let turn = |o: Point2, a: Point2, b: Point2| {
        let (u, w) = (a - o, b - o);
        u.cross(w) > ETA * u.norm().max(w.norm()).max(1.0)
    };
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && !turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && !turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        // All points collinear: keep the two extremes.
        hull = vec![pts[0], pts[pts.len() - 1]];
    }
    Ok(ConvexPolygon { vertices: hull })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x1: f64, x2: f64) -> Point2 {
        Point2::new(x1, x2)
    }

    fn pd_hull() -> ConvexPolygon {
        convex_hull(&[p(2.0, 2.0), p(0.0, 3.0), p(3.0, 0.0), p(1.0, 1.0)]).unwrap()
    }

    #[test]
    fn line_through_diagonal() {
        let l = line_through(p(1.0, 1.0), p(2.0, 2.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((l.p + s).abs() < 1e-15 && (l.q - s).abs() < 1e-15 && l.r.abs() < 1e-15);
    }

    #[test]
    fn line_through_anti_diagonal() {
        let l = line_through(p(0.0, 3.0), p(3.0, 0.0)).unwrap();
        // x1 + x2 = 3 up to normalization.
        assert!((l.p - l.q).abs() < 1e-15);
        assert!((l.r / l.p - 3.0).abs() < 1e-12);
    }

    #[test]
    fn line_through_slope_two_and_a_half() {
        // Hand oracle: slope (2.25-1)/(1.5-1) = 2.5, so x2 = 2.5 x1 - 1.5,
        // i.e. -2.5 x1 + x2 = -1.5 before normalization.
        let l = line_through(p(1.0, 1.0), p(1.5, 2.25)).unwrap();
        let n = 2.5f64.hypot(1.0);
        assert!((l.p + 2.5 / n).abs() < 1e-12);
        assert!((l.q - 1.0 / n).abs() < 1e-12);
        assert!((l.r + 1.5 / n).abs() < 1e-12);
        assert_eq!(l.x2_at(2.0).map(|v| (v - 3.5).abs() < 1e-12), Some(true));
    }

    #[test]
    fn line_through_rejects_coincident_points() {
        assert!(matches!(
            line_through(p(1.0, 1.0), p(1.0, 1.0)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn pd_hull_has_four_vertices() {
        let h = pd_hull();
        assert_eq!(h.kind(), PolygonKind::Polygon);
        assert_eq!(h.vertices().len(), 4);
        for v in [p(2.0, 2.0), p(0.0, 3.0), p(3.0, 0.0), p(1.0, 1.0)] {
            assert!(h.vertices().contains(&v));
        }
        assert!(h.area() > 0.0, "counter-clockwise orientation");
    }

    #[test]
    fn degenerate_hulls() {
        let single = convex_hull(&[p(1.0, 1.0)]).unwrap();
        assert_eq!(single.kind(), PolygonKind::Point);
        let seg = convex_hull(&[p(0.0, 0.0), p(1.0, 1.0), p(0.5, 0.5), p(2.0, 2.0)]).unwrap();
        assert_eq!(seg.kind(), PolygonKind::Segment);
        assert_eq!(seg.vertices(), &[p(0.0, 0.0), p(2.0, 2.0)]);
        let tri = convex_hull(&[p(0.0, 3.0), p(2.0, 2.0), p(3.0, 0.0)]).unwrap();
        assert_eq!(tri.vertices().len(), 3);
        assert!(convex_hull(&[]).is_err());
    }

    #[test]
    fn collinear_boundary_points_are_dropped() {
        let h = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)])
            .unwrap();
        assert_eq!(h.vertices().len(), 4);
    }

    #[test]
    fn distance_inside_is_zero() {
        let h = pd_hull();
        let q = h.proximal(p(1.5, 1.5));
        assert_eq!(q.dist, 0.0);
        assert_eq!(q.point, p(1.5, 1.5));
    }

    #[test]
    fn distance_to_anti_diagonal_segment() {
        // Perpendicular foot of the origin on x1 + x2 = 3 is (1.5, 1.5), distance 3/sqrt 2.
        let s = Segment::new(p(0.0, 3.0), p(3.0, 0.0));
        let q = distance_to(&s, p(0.0, 0.0));
        assert!((q.dist - 3.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(q.point.dist(p(1.5, 1.5)) < 1e-12);
    }

    #[test]
    fn distance_to_polytope_from_outside_corner() {
        // Brute force over every edge: the nearest point to (4,4) is the vertex (2,2).
        let h = pd_hull();
        let q = h.proximal(p(4.0, 4.0));
        let brute = h
            .edges()
            .iter()
            .flat_map(|e| (0..=10_000).map(move |k| e.at(k as f64 / 10_000.0)))
            .map(|x| x.dist(p(4.0, 4.0)))
            .fold(f64::INFINITY, f64::min);
        assert!(q.point.dist(p(2.0, 2.0)) < 1e-12);
        assert!((q.dist - brute).abs() < 1e-9);
    }

    fn t1_of_cc() -> ConvexPolygon {
        // {x2 <= x1} intersected with the PD polytope.
        let h = HalfPlane::under(&line_through(p(1.0, 1.0), p(2.0, 2.0)).unwrap()).unwrap();
        pd_hull().clip(&h).unwrap()
    }

    #[test]
    fn eps_contains_boundary_and_neighborhood() {
        let t1 = t1_of_cc();
        assert!(eps_contains(&t1, 0.0, p(1.5, 1.5)).unwrap());
        // Perpendicular distance of (1.5, 1.5 + 0.1/sqrt2) to x2 = x1 is 0.05.
        let inside = p(1.5, 1.5 + 0.1 / 2f64.sqrt());
        assert!((t1.proximal(inside).dist - 0.05).abs() < 1e-12);
        assert!(eps_contains(&t1, 0.1, inside).unwrap());
        // (1.5, 1.8): distance 0.3/sqrt2 ~ 0.212.
        let outside = p(1.5, 1.8);
        assert!((t1.proximal(outside).dist - 0.3 / 2f64.sqrt()).abs() < 1e-12);
        assert!(!eps_contains(&t1, 0.1, outside).unwrap());
        assert!(matches!(
            eps_contains(&t1, -0.1, outside),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn intersect_basic_and_parallel() {
        let diag = line_through(p(0.0, 0.0), p(1.0, 1.0)).unwrap();
        let anti = line_through(p(0.0, 3.0), p(3.0, 0.0)).unwrap();
        match intersect_lines(&diag, &anti) {
            LineIntersection::Point(x) => assert!(x.dist(p(1.5, 1.5)) < 1e-12),
            LineIntersection::Parallel => panic!("not parallel"),
        }
        let shifted = line_through(p(0.0, 1.0), p(1.0, 2.0)).unwrap();
        assert_eq!(intersect_lines(&diag, &shifted), LineIntersection::Parallel);
    }

    #[test]
    fn offset_examples() {
        let diag = line_through(p(1.0, 1.0), p(2.0, 2.0)).unwrap();
        let under = HalfPlane::under(&diag).unwrap();
        assert_eq!(offset_halfplane(&under, 0.0).unwrap(), under);

        let h = offset_halfplane(&under, 0.1).unwrap();
        // Boundary moved 0.1 along the unit normal (-1, 1)/sqrt2.
        let moved = p(1.0, 1.0) + p(-1.0, 1.0) * (0.1 / 2f64.sqrt());
        assert!(h.boundary().contains(moved));

        let anti = line_through(p(0.0, 3.0), p(3.0, 0.0)).unwrap();
        let h = offset_halfplane(&HalfPlane::under(&anti).unwrap(), 1.0).unwrap();
        let b = h.boundary();
        assert!((b.r / b.p - (3.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(offset_halfplane(&under, -1.0).is_err());
    }

    #[test]
    fn over_under_sides() {
        let diag = line_through(p(2.0, 2.0), p(1.0, 1.0)).unwrap();
        let over = HalfPlane::over(&diag).unwrap();
        let under = HalfPlane::under(&diag).unwrap();
        assert!(over.contains(p(0.0, 1.0)) && !over.contains(p(1.0, 0.0)));
        assert!(under.contains(p(1.0, 0.0)) && !under.contains(p(0.0, 1.0)));
        assert!(over.contains(p(1.5, 1.5)) && under.contains(p(1.5, 1.5)));
        let vertical = Line::new(1.0, 0.0, 2.0).unwrap();
        assert!(HalfPlane::over(&vertical).is_err());
        let left = HalfPlane::containing(&vertical, p(0.0, 0.0)).unwrap();
        assert!(left.contains(p(2.0, 5.0)) && !left.contains(p(2.1, 0.0)));
    }

    #[test]
    fn clip_to_empty_and_point() {
        let h = pd_hull();
        let far = HalfPlane::new(p(1.0, 0.0), -1.0).unwrap();
        assert!(h.clip(&far).is_none());
        let corner = HalfPlane::new(p(-1.0, 0.0), -3.0).unwrap();
        let c = h.clip(&corner).unwrap();
        assert_eq!(c.kind(), PolygonKind::Point);
    }
}

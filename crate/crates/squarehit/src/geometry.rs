//! Closed squares in the plane and the predicates every other module builds on.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinate ({0}, {1}) is not finite")]
    NonFinite(f64, f64),
    #[error("side length must be positive and finite, got {0}")]
    BadSide(f64),
    #[error("rotation must be finite, got {0}")]
    BadRotation(f64),
    #[error("tolerance must lie strictly between 0 and 1e-3, got {0}")]
    BadTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Checked constructor; rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(GeometryError::NonFinite(x, y))
        }
    }

    pub fn polar(r: f64, angle: f64) -> Self {
        Point::new(r * angle.cos(), r * angle.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    /// Rotation about the origin.
    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn reflect_x(self) -> Point {
        Point::new(self.x, -self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Slack used by every predicate. Points within `eps` of a boundary count as on it.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(eps: f64) -> Result<Self, GeometryError> {
        if eps > 0.0 && eps < 1e-3 {
            Ok(Tolerance(eps))
        } else {
            Err(GeometryError::BadTolerance(eps))
        }
    }

    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(Self::DEFAULT_EPS)
    }
}

impl TryFrom<f64> for Tolerance {
    type Error = GeometryError;
    fn try_from(eps: f64) -> Result<Self, GeometryError> {
        Tolerance::new(eps)
    }
}

impl From<Tolerance> for f64 {
    fn from(t: Tolerance) -> f64 {
        t.0
    }
}

/// A closed square. `rot` is the angle of its first side with the x-axis, kept in `[0, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Square {
    centre: Point,
    side: f64,
    rot: f64,
}

fn normalize_rot(rot: f64) -> f64 {
    let r = rot.rem_euclid(FRAC_PI_2);
    if r >= FRAC_PI_2 {
        0.0
    } else {
        r
    }
}

impl Square {
    pub fn new(centre: Point, side: f64, rot: f64) -> Result<Self, GeometryError> {
        if !centre.is_finite() {
            return Err(GeometryError::NonFinite(centre.x, centre.y));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(GeometryError::BadSide(side));
        }
        if !rot.is_finite() {
            return Err(GeometryError::BadRotation(rot));
        }
        Ok(Square { centre, side, rot: normalize_rot(rot) })
    }

    /// Axis-parallel square.
    pub fn axis(centre: Point, side: f64) -> Result<Self, GeometryError> {
        Square::new(centre, side, 0.0)
    }

    /// Builds a square from the direction of its vertex in the closed first quadrant
    /// (`π/4` for an axis-parallel square).
    pub fn from_corner_angle(centre: Point, side: f64, angle: f64) -> Result<Self, GeometryError> {
        Square::new(centre, side, angle - FRAC_PI_4)
    }

    pub fn centre(&self) -> Point {
        self.centre
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn rot(&self) -> f64 {
        self.rot
    }

    pub fn half(&self) -> f64 {
        0.5 * self.side
    }

    /// Direction of the vertex in the first quadrant of the centre frame, in `[0, π/2)`.
    pub fn corner_angle(&self) -> f64 {
        normalize_rot(self.rot + FRAC_PI_4)
    }

    pub fn is_axis_parallel(&self, tol: Tolerance) -> bool {
        self.rot.min(FRAC_PI_2 - self.rot) <= tol.eps()
    }

    /// Unit vectors along the two side directions.
    pub fn axes(&self) -> (Point, Point) {
        let (s, c) = self.rot.sin_cos();
        (Point::new(c, s), Point::new(-s, c))
    }

    /// Coordinates of `p` in the square's own frame (origin at the centre, axes along the sides).
    pub fn to_local(&self, p: Point) -> Point {
        let d = p - self.centre;
        let (e1, e2) = self.axes();
        Point::new(d.dot(e1), d.dot(e2))
    }

    pub fn from_local(&self, p: Point) -> Point {
        let (e1, e2) = self.axes();
        self.centre + e1 * p.x + e2 * p.y
    }

    /// Counter-clockwise, starting with the vertex at angle `rot + π/4`.
    pub fn vertices(&self) -> [Point; 4] {
        let r = self.side / SQRT_2;
        let mut out = [Point::ORIGIN; 4];
        for (k, v) in out.iter_mut().enumerate() {
            *v = self.centre + Point::polar(r, self.rot + FRAC_PI_4 + k as f64 * FRAC_PI_2);
        }
        out
    }

    pub fn translated(&self, d: Point) -> Square {
        Square { centre: self.centre + d, ..*self }
    }

    /// Image under `x -> origin + k (x - origin)` followed by rotation by `angle` about `origin`.
    pub fn transformed(&self, origin: Point, k: f64, angle: f64) -> Result<Square, GeometryError> {
        let c = origin + ((self.centre - origin) * k).rotate(angle);
        Square::new(c, self.side * k.abs(), self.rot + angle)
    }
}

impl<'de> Deserialize<'de> for Square {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            centre: Point,
            side: f64,
            rot: f64,
        }
        let r = Raw::deserialize(d)?;
        Square::new(r.centre, r.side, r.rot).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Square(c={}, side={}, rot={})", self.centre, self.side, self.rot)
    }
}

/// An ordered list of squares sharing one tolerance. Index is identity; duplicates are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareFamily {
    pub squares: Vec<Square>,
    #[serde(default)]
    pub tol: Tolerance,
}

impl SquareFamily {
    pub fn new(squares: Vec<Square>) -> Self {
        SquareFamily { squares, tol: Tolerance::default() }
    }

    pub fn with_tol(squares: Vec<Square>, tol: Tolerance) -> Self {
        SquareFamily { squares, tol }
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Square> {
        self.squares.iter()
    }

    pub fn subfamily(&self, idx: &[usize]) -> SquareFamily {
        SquareFamily::with_tol(idx.iter().map(|&i| self.squares[i]).collect(), self.tol)
    }

    pub fn translated(&self, d: Point) -> SquareFamily {
        SquareFamily::with_tol(self.squares.iter().map(|s| s.translated(d)).collect(), self.tol)
    }

    /// Indices of the squares meeting square `i` (including `i`).
    pub fn closed_neighbourhood(&self, i: usize) -> Vec<usize> {
        let s = &self.squares[i];
        (0..self.len())
            .filter(|&j| j == i || squares_intersect(s, &self.squares[j], self.tol))
            .collect()
    }

    /// True if every square contains at least one of `points`.
    pub fn is_hit_by(&self, points: &[Point]) -> bool {
        self.squares
            .iter()
            .all(|s| points.iter().any(|&p| contains_point(s, p, self.tol)))
    }

    /// Axis-parallel bounding box `(min, max)` of all squares.
    pub fn bounds(&self) -> Option<(Point, Point)> {
        let mut it = self.squares.iter().flat_map(|s| s.vertices());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| {
            (Point::new(lo.x.min(v.x), lo.y.min(v.y)), Point::new(hi.x.max(v.x), hi.y.max(v.y)))
        }))
    }
}

impl FromIterator<Square> for SquareFamily {
    fn from_iter<I: IntoIterator<Item = Square>>(iter: I) -> Self {
        SquareFamily::new(iter.into_iter().collect())
    }
}

pub fn vertices(s: &Square) -> [Point; 4] {
    s.vertices()
}

pub fn contains_point(s: &Square, p: Point, tol: Tolerance) -> bool {
    let l = s.to_local(p);
    let h = s.half() + tol.eps();
    l.x.abs() <= h && l.y.abs() <= h
}

/// Separating-axis test over the four side normals. Touching squares intersect.
pub fn squares_intersect(a: &Square, b: &Square, tol: Tolerance) -> bool {
    let d = b.centre - a.centre;
    let (a1, a2) = a.axes();
    let (b1, b2) = b.axes();
    let sep = |n: Point, own: f64, f1: Point, f2: Point, other: f64| {
        let ext = other * (n.dot(f1).abs() + n.dot(f2).abs());
        d.dot(n).abs() > own + ext + tol.eps()
    };
    !(sep(a1, a.half(), b1, b2, b.half())
        || sep(a2, a.half(), b1, b2, b.half())
        || sep(b1, b.half(), a1, a2, a.half())
        || sep(b2, b.half(), a1, a2, a.half()))
}

/// Intersecting, yet neither square holds a vertex of the other.
pub fn squares_cross(a: &Square, b: &Square, tol: Tolerance) -> bool {
    squares_intersect(a, b, tol)
        && !a.vertices().iter().any(|&v| contains_point(b, v, tol))
        && !b.vertices().iter().any(|&v| contains_point(a, v, tol))
}

pub fn dist_point_square(p: Point, s: &Square) -> f64 {
    let l = s.to_local(p);
    let h = s.half();
    let dx = (l.x.abs() - h).max(0.0);
    let dy = (l.y.abs() - h).max(0.0);
    dx.hypot(dy)
}

/// `(centre, inner radius, outer radius)`.
pub fn inner_outer_disk(s: &Square) -> (Point, f64, f64) {
    (s.centre, 0.5 * s.side, s.side * SQRT_2 / 2.0)
}

fn push_unique(out: &mut Vec<Point>, p: Point, tol: f64) {
    if !out.iter().any(|q| q.dist(p) <= tol) {
        out.push(p);
    }
}

/// Intersection points of two closed segments. Collinear overlaps yield the overlap's endpoints.
pub fn segment_intersections(p1: Point, p2: Point, q1: Point, q2: Point, tol: Tolerance, out: &mut Vec<Point>) {
    let eps = tol.eps();
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let l1 = d1.norm();
    let l2 = d2.norm();
    if l1 == 0.0 || l2 == 0.0 {
        return;
    }
    let denom = d1.cross(d2);
    let w = q1 - p1;
    if denom.abs() > 1e-12 * l1 * l2 {
        let t = w.cross(d2) / denom;
        let u = w.cross(d1) / denom;
        let (dt, du) = (eps / l1, eps / l2);
        if t >= -dt && t <= 1.0 + dt && u >= -du && u <= 1.0 + du {
            push_unique(out, p1 + d1 * t.clamp(0.0, 1.0), eps);
        }
        return;
    }
    if d1.cross(w).abs() / l1 > eps {
        return;
    }
    let on = |a: Point, d: Point, l: f64, x: Point| {
        let s = (x - a).dot(d) / (l * l);
        s >= -eps / l && s <= 1.0 + eps / l
    };
    for x in [q1, q2] {
        if on(p1, d1, l1, x) {
            push_unique(out, x, eps);
        }
    }
    for x in [p1, p2] {
        if on(q1, d2, l2, x) {
            push_unique(out, x, eps);
        }
    }
}

/// All crossing points of the two boundaries, deduplicated within `tol`.
pub fn boundary_intersections(a: &Square, b: &Square, tol: Tolerance) -> Vec<Point> {
    let mut out = Vec::new();
    if !squares_intersect(a, b, tol) {
        return out;
    }
    let va = a.vertices();
    let vb = b.vertices();
    for i in 0..4 {
        for j in 0..4 {
            segment_intersections(va[i], va[(i + 1) % 4], vb[j], vb[(j + 1) % 4], tol, &mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(x: f64, y: f64, rot: f64) -> Square {
        Square::new(Point::new(x, y), 1.0, rot).unwrap()
    }

    fn close(a: Point, b: Point) -> bool {
        a.dist(b) < 1e-12
    }

    #[test]
    fn vertex_layout() {
        let v = unit(0.0, 0.0, 0.0).vertices();
        let want = [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)];
        for (p, w) in v.iter().zip(want) {
            assert!(close(*p, Point::new(w.0, w.1)));
        }
        let d = unit(0.0, 0.0, FRAC_PI_4).vertices();
        let r = SQRT_2 / 2.0;
        assert!(close(d[0], Point::new(0.0, r)));
        assert!(close(d[1], Point::new(-r, 0.0)));
        let big = Square::new(Point::new(1.0, 1.0), 2.0, 0.0).unwrap().vertices();
        assert!(close(big[0], Point::new(2.0, 2.0)));
        assert!(close(big[2], Point::new(0.0, 0.0)));
    }

    #[test]
    fn rotation_is_normalized() {
        let s = unit(0.0, 0.0, FRAC_PI_2 + 0.3);
        assert!((s.rot() - 0.3).abs() < 1e-15);
        assert_eq!(unit(0.0, 0.0, -FRAC_PI_2).rot(), 0.0);
        assert!(Square::new(Point::ORIGIN, 0.0, 0.0).is_err());
        assert!(Square::new(Point::new(f64::NAN, 0.0), 1.0, 0.0).is_err());
        assert!(Square::new(Point::ORIGIN, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn corner_angle_conversion() {
        assert!((unit(0.0, 0.0, 0.0).corner_angle() - FRAC_PI_4).abs() < 1e-15);
        let s = unit(0.0, 0.0, 1.4);
        assert!((s.corner_angle() - (1.4 + FRAC_PI_4 - FRAC_PI_2)).abs() < 1e-12);
        let v = s
            .vertices()
            .into_iter()
            .find(|v| v.x > 0.0 && v.y >= 0.0)
            .unwrap();
        assert!((v.y.atan2(v.x) - s.corner_angle()).abs() < 1e-12);
        let back = Square::from_corner_angle(Point::ORIGIN, 1.0, 0.2).unwrap();
        assert!((back.corner_angle() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn containment_examples() {
        let tol = Tolerance::default();
        let s = unit(0.0, 0.0, 0.0);
        assert!(contains_point(&s, Point::new(0.5, 0.5), tol));
        assert!(!contains_point(&s, Point::new(0.5 + 1e-6, 0.0), tol));
        assert!(contains_point(&unit(0.0, 0.0, FRAC_PI_4), Point::new(0.7, 0.0), tol));
    }

    #[test]
    fn intersection_examples() {
        let tol = Tolerance::default();
        assert!(squares_intersect(&unit(0.0, 0.0, 0.0), &unit(0.9, 0.0, 0.0), tol));
        assert!(!squares_intersect(&unit(0.0, 0.0, 0.0), &unit(1.0 + 1e-6, 0.0, 0.0), tol));
        assert!(squares_intersect(&unit(0.0, 0.0, FRAC_PI_4), &unit(1.2, 0.0, 0.0), tol));
        assert!(!squares_intersect(&unit(0.0, 0.0, FRAC_PI_4), &unit(1.21, 0.0, 0.0), tol));
        assert!(squares_intersect(&unit(0.0, 0.0, 0.0), &unit(1.0, 1.0, 0.0), tol));
    }

    #[test]
    fn cross_examples() {
        let tol = Tolerance::default();
        assert!(!squares_cross(&unit(0.0, 0.0, 0.0), &unit(0.9, 0.0, 0.0), tol));
        let big = Square::new(Point::ORIGIN, 3.0, 0.0).unwrap();
        assert!(!squares_cross(&unit(0.0, 0.0, 0.0), &big, tol));
        // A unit square against a concentric diamond of side 1.2: each pokes out of the other.
        let diamond = Square::new(Point::ORIGIN, 1.2, FRAC_PI_4).unwrap();
        assert!(squares_cross(&unit(0.0, 0.0, 0.0), &diamond, tol));
    }

    #[test]
    fn distance_examples() {
        let s = unit(0.0, 0.0, 0.0);
        assert!((dist_point_square(Point::new(2.0, 0.0), &s) - 1.5).abs() < 1e-15);
        assert_eq!(dist_point_square(Point::new(0.1, -0.2), &s), 0.0);
        assert!((dist_point_square(Point::new(1.0, 1.0), &s) - SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_examples() {
        let tol = Tolerance::default();
        assert!(boundary_intersections(&unit(0.0, 0.0, 0.0), &unit(3.0, 0.0, 0.0), tol).is_empty());
        let pts = boundary_intersections(&unit(0.0, 0.0, 0.0), &unit(0.9, 0.9, 0.0), tol);
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().any(|&p| close(p, Point::new(0.4, 0.5))));
        assert!(pts.iter().any(|&p| close(p, Point::new(0.5, 0.4))));
        let same = boundary_intersections(&unit(0.0, 0.0, 0.3), &unit(0.0, 0.0, 0.3), tol);
        assert_eq!(same.len(), 4);
        for v in unit(0.0, 0.0, 0.3).vertices() {
            assert!(same.iter().any(|&p| p.dist(v) < 1e-9));
        }
    }

    #[test]
    fn disks() {
        let (_, r, big_r) = inner_outer_disk(&unit(0.0, 0.0, 0.0));
        assert_eq!(r, 0.5);
        assert!((big_r - SQRT_2 / 2.0).abs() < 1e-15);
        let (_, r2, big_r2) = inner_outer_disk(&Square::new(Point::ORIGIN, 0.5, 0.0).unwrap());
        assert_eq!(r2, 0.25);
        assert!((big_r2 - SQRT_2 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(1e-3).is_err());
        assert!(Tolerance::new(1e-6).is_ok());
        assert_eq!(Tolerance::default().eps(), 1e-9);
    }
}

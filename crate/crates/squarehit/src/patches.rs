//! Patches: regions plus a few anchor points such that every large enough square centred in
//! the region contains an anchor.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{contains_point, dist_point_square, Point, Square, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatchError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("malformed polygon: {0}")]
    MalformedPolygon(String),
    #[error("target is not contained in the polygon")]
    TargetNotContained,
    #[error("resolution too coarse: best lower bound {bound} is negative")]
    ResolutionTooCoarse { bound: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatchKind {
    Triangle,
    Thales,
    Circular,
    Polygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PatchRegion {
    Triangle { corners: [Point; 3] },
    /// Squares meeting the segment with their centre across it from `outside`.
    Segment { a: Point, b: Point, outside: Point },
    Disk { centre: Point, radius: f64 },
    Polygon { ring: Vec<Point>, interior: Point },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchCertificate {
    pub kind: PatchKind,
    pub anchor_points: Vec<Point>,
    pub region: PatchRegion,
    pub min_side: f64,
}

/// Every square of side at least 1 centred in `conv{a, b, c}` contains one of the three points.
pub fn triangle_patch(a: Point, b: Point, c: Point, tol: Tolerance) -> Result<PatchCertificate, PatchError> {
    for (x, y, name) in [(a, b, "ab"), (b, c, "bc"), (a, c, "ac")] {
        let d = x.dist(y);
        if d > 1.0 + tol.eps() {
            return Err(PatchError::PreconditionViolated(format!("|{name}| = {d} exceeds 1")));
        }
    }
    Ok(PatchCertificate {
        kind: PatchKind::Triangle,
        anchor_points: vec![a, b, c],
        region: PatchRegion::Triangle { corners: [a, b, c] },
        min_side: 1.0,
    })
}

/// Does the closed segment `[a, b]` meet the square? (Liang–Barsky in the square's frame.)
pub fn segment_meets_square(a: Point, b: Point, s: &Square, tol: Tolerance) -> bool {
    let p = s.to_local(a);
    let d = s.to_local(b) - p;
    let h = s.half() + tol.eps();
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (start, delta) in [(p.x, d.x), (p.y, d.y)] {
        if delta.abs() < 1e-300 {
            if start.abs() > h {
                return false;
            }
            continue;
        }
        let (mut lo, mut hi) = ((-h - start) / delta, (h - start) / delta);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        t0 = t0.max(lo);
        t1 = t1.min(hi);
        if t0 > t1 {
            return false;
        }
    }
    true
}

/// Signed area test: positive when `p` is left of the directed line `a -> b`.
fn side_of(a: Point, b: Point, p: Point) -> f64 {
    (b - a).cross(p - a)
}

/// True iff the separation-lemma hypotheses hold for this unit square: `c` is at least as far
/// from the midpoint `q` of `[a, b]` as `a` is, the square contains `c`, the line through `a`
/// and `b` separates the square's centre from `c`, and the square meets `[a, b]`.
/// When they hold, the square contains `a` or `b`.
pub fn thales_patch_applies(a: Point, b: Point, c: Point, square: &Square, tol: Tolerance) -> Result<bool, PatchError> {
    let eps = tol.eps();
    let ab = a.dist(b);
    if ab > 1.0 + eps {
        return Err(PatchError::PreconditionViolated(format!("|ab| = {ab} exceeds 1")));
    }
    if (square.side() - 1.0).abs() > eps {
        return Err(PatchError::PreconditionViolated(format!(
            "square side {} is not 1",
            square.side()
        )));
    }
    if ab == 0.0 || side_of(a, b, c).abs() <= eps * ab {
        return Ok(false);
    }
    let q = a.midpoint(b);
    let holds = q.dist(c) >= q.dist(a) - eps
        && contains_point(square, c, tol)
        && side_of(a, b, c) * side_of(a, b, square.centre()) < 0.0
        && segment_meets_square(a, b, square, tol);
    if holds {
        debug_assert!(
            contains_point(square, a, tol) || contains_point(square, b, tol),
            "separation lemma violated for {square}"
        );
    }
    Ok(holds)
}

/// Certificate form of the separation lemma for a fixed outside point `c`.
pub fn thales_patch(a: Point, b: Point, c: Point, tol: Tolerance) -> Result<PatchCertificate, PatchError> {
    let ab = a.dist(b);
    if ab > 1.0 + tol.eps() {
        return Err(PatchError::PreconditionViolated(format!("|ab| = {ab} exceeds 1")));
    }
    let q = a.midpoint(b);
    if q.dist(c) < q.dist(a) - tol.eps() {
        return Err(PatchError::PreconditionViolated("c lies inside the disk on diameter ab".into()));
    }
    Ok(PatchCertificate {
        kind: PatchKind::Thales,
        anchor_points: vec![a, b],
        region: PatchRegion::Segment { a, b, outside: c },
        min_side: 1.0,
    })
}

/// Every square of side at least 1 centred within `√2/2 - |ab|/2` of the midpoint contains `a` or `b`.
pub fn circular_patch(a: Point, b: Point, tol: Tolerance) -> Result<PatchCertificate, PatchError> {
    let ab = a.dist(b);
    if ab < SQRT_2 - 1.0 - tol.eps() || ab > 1.0 + tol.eps() {
        return Err(PatchError::PreconditionViolated(format!(
            "|ab| = {ab} outside [√2 - 1, 1]"
        )));
    }
    Ok(PatchCertificate {
        kind: PatchKind::Circular,
        anchor_points: vec![a, b],
        region: PatchRegion::Disk { centre: a.midpoint(b), radius: SQRT_2 / 2.0 - ab / 2.0 },
        min_side: 1.0,
    })
}

/// All rotations of one square about its centre whose corner angle lies in `[angle_lo, angle_hi]`.
/// Corner angles are measured as in [`Square::corner_angle`]; `angle_hi = π/2` closes the range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweptSquare {
    pub angle_lo: f64,
    pub angle_hi: f64,
    pub side: f64,
    pub centre: Point,
}

impl SweptSquare {
    pub fn new(centre: Point, side: f64, angle_lo: f64, angle_hi: f64) -> Result<Self, PatchError> {
        if !(0.0..=FRAC_PI_2).contains(&angle_lo) || !(angle_lo..=FRAC_PI_2).contains(&angle_hi) {
            return Err(PatchError::PreconditionViolated(format!(
                "angle range [{angle_lo}, {angle_hi}] not inside [0, π/2]"
            )));
        }
        if !(side > 0.0 && side.is_finite()) || !centre.is_finite() {
            return Err(PatchError::PreconditionViolated("bad side or centre".into()));
        }
        Ok(SweptSquare { angle_lo, angle_hi, side, centre })
    }

    pub fn at(&self, angle: f64) -> Square {
        Square::from_corner_angle(self.centre, self.side, angle).expect("validated swept square")
    }

    fn samples(&self, level: u32) -> impl Iterator<Item = Square> + '_ {
        let n = 1u64 << level;
        let h = (self.angle_hi - self.angle_lo) / n as f64;
        (0..=n).map(move |j| self.at(self.angle_lo + h * j as f64))
    }
}

/// Certified lower bound on the distance from `q` to the swept region. Angles are sampled on
/// dyadic grids of `2^0 .. 2^resolution` steps; each grid's minimum minus its Lipschitz drift
/// is a valid bound and the best one is returned.
pub fn dist_point_swept(q: Point, sw: &SweptSquare, resolution: u32) -> Result<f64, PatchError> {
    if sw.angle_lo == sw.angle_hi {
        return Ok(dist_point_square(q, &sw.at(sw.angle_lo)));
    }
    let resolution = resolution.min(30);
    let speed = sw.side * SQRT_2 / 2.0;
    let mut best = f64::NEG_INFINITY;
    for level in 0..=resolution {
        let h = (sw.angle_hi - sw.angle_lo) / (1u64 << level) as f64;
        let raw = sw.samples(level).map(|s| dist_point_square(q, &s)).fold(f64::INFINITY, f64::min);
        if raw == 0.0 {
            return Ok(0.0);
        }
        best = best.max(raw - speed * h / 2.0);
    }
    if best < 0.0 {
        Err(PatchError::ResolutionTooCoarse { bound: best })
    } else {
        Ok(best)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Target {
    Square(Square),
    Swept(SweptSquare),
}

impl Target {
    /// Lower bound on the distance from `q`; exact for a fixed square.
    pub fn dist_lower_bound(&self, q: Point, resolution: u32) -> Result<f64, PatchError> {
        match self {
            Target::Square(s) => Ok(dist_point_square(q, s)),
            Target::Swept(sw) => dist_point_swept(q, sw, resolution),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertifyMode {
    /// Condition (iii) must hold on every side.
    Unconditional,
    /// Sides failing (iii) are recorded; squares whose centre they separate from the target are not covered.
    SeparatedOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Ring point within 1 of the interior point.
    CentreReach,
    /// Consecutive ring points within 1 of each other.
    RingStep,
    /// Side midpoint at least as far from the target as from the side's endpoints.
    SideClearance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonFailure {
    pub condition: Condition,
    pub index: usize,
    pub slack: f64,
}

/// Per-condition slacks (non-negative means satisfied). Side `i` joins `ring[i]` and `ring[i+1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonReport {
    pub centre_slack: Vec<f64>,
    pub ring_slack: Vec<f64>,
    pub side_slack: Vec<f64>,
    pub failure: Option<PolygonFailure>,
    /// Sides whose clearance fails, in separated-only mode.
    pub uncovered_sides: Vec<usize>,
    pub certificate: Option<PatchCertificate>,
}

impl PolygonReport {
    pub fn is_certified(&self) -> bool {
        self.certificate.is_some()
    }

    /// Smallest slack over the ring-step and side-clearance conditions. Ring points placed
    /// exactly on the unit circle have zero centre-reach slack, so that condition is only
    /// required to hold within tolerance.
    pub fn margin(&self) -> f64 {
        self.ring_slack
            .iter()
            .chain(self.side_slack.iter())
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn inside_convex(ring: &[Point], p: Point, slack: f64) -> bool {
    let k = ring.len();
    (0..k).all(|i| {
        let (a, b) = (ring[i], ring[(i + 1) % k]);
        side_of(a, b, p) / a.dist(b) >= slack
    })
}

fn check_ring(ring: &[Point], tol: Tolerance) -> Result<(), PatchError> {
    let k = ring.len();
    if k < 3 {
        return Err(PatchError::MalformedPolygon(format!("{k} vertices")));
    }
    let mut area = 0.0;
    for i in 0..k {
        let (a, b, c) = (ring[i], ring[(i + 1) % k], ring[(i + 2) % k]);
        if a.dist(b) <= tol.eps() {
            return Err(PatchError::MalformedPolygon(format!("repeated vertex at {i}")));
        }
        if (b - a).cross(c - b) < -tol.eps() {
            return Err(PatchError::MalformedPolygon(format!("reflex turn at vertex {}", (i + 1) % k)));
        }
        area += a.cross(b);
    }
    if area <= 0.0 {
        return Err(PatchError::MalformedPolygon("ring is not counter-clockwise".into()));
    }
    Ok(())
}

fn target_inside(ring: &[Point], target: &Target, resolution: u32, tol: Tolerance) -> bool {
    match target {
        Target::Square(s) => s.vertices().iter().all(|&v| inside_convex(ring, v, -tol.eps())),
        Target::Swept(sw) => {
            let level = resolution.min(16);
            let h = (sw.angle_hi - sw.angle_lo) / (1u64 << level) as f64;
            // Between samples a vertex strays from the chord by at most r·h²/8; r·h/2 is looser.
            let slack = sw.side / SQRT_2 * h / 2.0;
            sw.samples(level)
                .all(|s| s.vertices().iter().all(|&v| inside_convex(ring, v, slack - tol.eps())))
        }
    }
}

/// Checks whether `{p0} ∪ ring` hits every unit square meeting `target`, via the conditions of
/// the convex-polygon hitting theorem. `ring` must be convex and counter-clockwise and contain
/// both `p0` and the target. `resolution` is passed to [`dist_point_swept`] for swept targets.
pub fn polygon_hitter_certify(
    p0: Point,
    ring: &[Point],
    target: &Target,
    mode: CertifyMode,
    resolution: u32,
    tol: Tolerance,
) -> Result<PolygonReport, PatchError> {
    check_ring(ring, tol)?;
    if !inside_convex(ring, p0, -tol.eps()) {
        return Err(PatchError::PreconditionViolated("interior point outside the polygon".into()));
    }
    if !target_inside(ring, target, resolution, tol) {
        return Err(PatchError::TargetNotContained);
    }
    let k = ring.len();
    let centre_slack: Vec<f64> = ring.iter().map(|p| 1.0 - p0.dist(*p)).collect();
    let ring_slack: Vec<f64> = (0..k).map(|i| 1.0 - ring[i].dist(ring[(i + 1) % k])).collect();
    let mut side_slack = Vec::with_capacity(k);
    for i in 0..k {
        let (a, b) = (ring[i], ring[(i + 1) % k]);
        let q = a.midpoint(b);
        side_slack.push(target.dist_lower_bound(q, resolution)? - q.dist(a));
    }
    let eps = tol.eps();
    let first_bad = |v: &[f64], condition| {
        v.iter()
            .position(|&s| s < -eps)
            .map(|index| PolygonFailure { condition, index, slack: v[index] })
    };
    let mut failure = first_bad(&centre_slack, Condition::CentreReach)
        .or_else(|| first_bad(&ring_slack, Condition::RingStep));
    let uncovered_sides: Vec<usize> = (0..k).filter(|&i| side_slack[i] < -eps).collect();
    if failure.is_none() && mode == CertifyMode::Unconditional {
        failure = first_bad(&side_slack, Condition::SideClearance);
    }
    let certificate = failure.is_none().then(|| {
        let mut anchors = vec![p0];
        anchors.extend_from_slice(ring);
        PatchCertificate {
            kind: PatchKind::Polygon,
            anchor_points: anchors,
            region: PatchRegion::Polygon { ring: ring.to_vec(), interior: p0 },
            min_side: 1.0,
        }
    });
    Ok(PolygonReport { centre_slack, ring_slack, side_slack, failure, uncovered_sides, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn triangle_preconditions() {
        let o = Point::ORIGIN;
        assert!(triangle_patch(o, o, o, tol()).is_ok());
        let bad = triangle_patch(o, Point::new(1.2, 0.0), Point::new(0.0, 0.5), tol());
        assert!(matches!(bad, Err(PatchError::PreconditionViolated(_))));
    }

    #[test]
    fn circular_radius() {
        let c = circular_patch(Point::ORIGIN, Point::new(1.0, 0.0), tol()).unwrap();
        let PatchRegion::Disk { radius, .. } = c.region else { panic!() };
        assert!((radius - (SQRT_2 - 1.0) / 2.0).abs() < 1e-15);
        let c = circular_patch(Point::ORIGIN, Point::new(SQRT_2 - 1.0, 0.0), tol()).unwrap();
        let PatchRegion::Disk { radius, .. } = c.region else { panic!() };
        assert!((radius - 0.5).abs() < 1e-15);
        assert!(circular_patch(Point::ORIGIN, Point::new(1.5, 0.0), tol()).is_err());
        assert!(circular_patch(Point::ORIGIN, Point::new(0.3, 0.0), tol()).is_err());
    }

    #[test]
    fn thales_on_and_inside_circle() {
        let a = Point::new(-0.5, 0.0);
        let b = Point::new(0.5, 0.0);
        // c on the circle below the segment; a unit square holding c, centre above the line.
        let c = Point::new(0.0, -0.5);
        let s = Square::new(Point::new(0.0, 0.2), 1.0, FRAC_PI_4).unwrap();
        assert!(thales_patch_applies(a, b, c, &s, tol()).unwrap());
        let inner = Point::new(0.0, -0.3);
        let s2 = Square::new(Point::new(0.0, 0.1), 1.0, FRAC_PI_4).unwrap();
        assert!(!thales_patch_applies(a, b, inner, &s2, tol()).unwrap());
        assert!(thales_patch_applies(a, Point::new(1.2, 0.0), c, &s, tol()).is_err());
        assert!(!thales_patch_applies(a, b, Point::new(2.0, 0.0), &s, tol()).unwrap());
    }

    #[test]
    fn swept_distance() {
        let sw = SweptSquare::new(Point::ORIGIN, 1.0, 0.3, 0.3).unwrap();
        let q = Point::new(2.0, 0.1);
        assert_eq!(dist_point_swept(q, &sw, 0).unwrap(), dist_point_square(q, &sw.at(0.3)));
        let full = SweptSquare::new(Point::ORIGIN, 1.0, 0.0, FRAC_PI_2).unwrap();
        let q = Point::new(2.0, 0.0);
        let l = dist_point_swept(q, &full, 20).unwrap();
        assert!(l >= 2.0 - SQRT_2 / 2.0 - 1e-6 && l <= 1.5);
        let inside = SweptSquare::new(Point::ORIGIN, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(dist_point_swept(Point::new(0.1, 0.1), &inside, 3).unwrap(), 0.0);
        let mut last = f64::NEG_INFINITY;
        for r in 0..12 {
            let v = dist_point_swept(Point::new(1.3, 0.4), &full, r).unwrap_or(f64::NEG_INFINITY);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn regular_nine_gon_fails_side_clearance() {
        let ring: Vec<Point> = (0..9).map(|i| Point::polar(1.0, 2.0 * PI * i as f64 / 9.0)).collect();
        let target = Target::Square(Square::axis(Point::ORIGIN, 1.0).unwrap());
        let r = polygon_hitter_certify(Point::ORIGIN, &ring, &target, CertifyMode::Unconditional, 0, tol()).unwrap();
        let f = r.failure.unwrap();
        assert_eq!(f.condition, Condition::SideClearance);
        assert!(!r.is_certified());
    }

    #[test]
    fn long_side_fails_ring_step() {
        let ring = vec![
            Point::new(-0.6, -0.6),
            Point::new(0.6, -0.6),
            Point::new(0.6, 0.6),
            Point::new(-0.6, 0.6),
        ];
        let target = Target::Square(Square::axis(Point::ORIGIN, 0.2).unwrap());
        let r = polygon_hitter_certify(Point::ORIGIN, &ring, &target, CertifyMode::SeparatedOnly, 0, tol()).unwrap();
        assert_eq!(r.failure.unwrap().condition, Condition::RingStep);
        assert_eq!(r.failure.unwrap().index, 0);
    }

    #[test]
    fn malformed_rings() {
        let t = Target::Square(Square::axis(Point::ORIGIN, 0.1).unwrap());
        let cw = vec![Point::new(0.0, 1.0), Point::new(1.0, -1.0), Point::new(-1.0, -1.0)];
        assert!(matches!(
            polygon_hitter_certify(Point::ORIGIN, &cw, &t, CertifyMode::Unconditional, 0, tol()),
            Err(PatchError::MalformedPolygon(_))
        ));
        let dart = vec![
            Point::new(-1.0, -1.0),
            Point::new(0.0, -0.2),
            Point::new(1.0, -1.0),
            Point::new(0.0, 1.0),
        ];
        assert!(matches!(
            polygon_hitter_certify(Point::ORIGIN, &dart, &t, CertifyMode::Unconditional, 0, tol()),
            Err(PatchError::MalformedPolygon(_))
        ));
    }

    #[test]
    fn segment_square() {
        let s = Square::axis(Point::ORIGIN, 1.0).unwrap();
        assert!(segment_meets_square(Point::new(-2.0, 0.0), Point::new(2.0, 0.0), &s, tol()));
        assert!(!segment_meets_square(Point::new(-2.0, 0.6), Point::new(2.0, 0.6), &s, tol()));
        assert!(segment_meets_square(Point::new(0.5, 0.5), Point::new(2.0, 2.0), &s, tol()));
    }
}

//! Constant-size point sets hitting every neighbour of a pivot square, and an adversarial
//! search for neighbours they miss.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{contains_point, dist_point_square, squares_intersect, Point, Square, Tolerance};
use crate::patches::{polygon_hitter_certify, CertifyMode, PolygonReport, Target};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HitterError {
    #[error("pivot is not axis-parallel (rot = {0})")]
    NotAxisParallel(f64),
    #[error("disk cover check failed: {0}")]
    CoverageCheckFailed(String),
    #[error("nine-gon search found no configuration with positive margin (best {0})")]
    SearchFailed(f64),
    #[error("sampling at this pitch can neither certify nor refute the cover")]
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HitterKind {
    AxisParallel4,
    AxisParallelLeftmost2,
    TenPoint,
    SixPointLeftmost,
    TwelvePointCover,
}

impl HitterKind {
    pub const ALL: [HitterKind; 5] = [
        HitterKind::AxisParallel4,
        HitterKind::AxisParallelLeftmost2,
        HitterKind::TenPoint,
        HitterKind::SixPointLeftmost,
        HitterKind::TwelvePointCover,
    ];

    /// Points emitted per pivot.
    pub fn points_per_pivot(self) -> usize {
        match self {
            HitterKind::AxisParallel4 => 4,
            HitterKind::AxisParallelLeftmost2 => 2,
            HitterKind::TenPoint => 10,
            HitterKind::SixPointLeftmost => 6,
            HitterKind::TwelvePointCover => 12,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HitterKind::AxisParallel4 => "axis-parallel4",
            HitterKind::AxisParallelLeftmost2 => "axis-parallel-leftmost2",
            HitterKind::TenPoint => "ten-point",
            HitterKind::SixPointLeftmost => "six-point-leftmost",
            HitterKind::TwelvePointCover => "twelve-point-cover",
        }
    }
}

impl std::str::FromStr for HitterKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let k = s.to_ascii_lowercase().replace('_', "-");
        HitterKind::ALL
            .into_iter()
            .find(|h| h.name() == k)
            .or(match k.as_str() {
                "six-point" | "six" => Some(HitterKind::SixPointLeftmost),
                "ten" => Some(HitterKind::TenPoint),
                "axis4" => Some(HitterKind::AxisParallel4),
                "axis2" => Some(HitterKind::AxisParallelLeftmost2),
                "twelve" | "cover12" => Some(HitterKind::TwelvePointCover),
                _ => None,
            })
            .ok_or_else(|| format!("unknown hitter mode '{s}'"))
    }
}

impl std::fmt::Display for HitterKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Nine directions on the unit circle around the pivot centre, in the pivot's own frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NineGonConfig {
    pub angles: [f64; 9],
    pub margin: f64,
}

impl NineGonConfig {
    pub fn ring(&self) -> Vec<Point> {
        self.angles.iter().map(|&a| Point::polar(1.0, a)).collect()
    }

    /// Consecutive angular gaps, the last one wrapping around.
    pub fn gaps(&self) -> [f64; 9] {
        let mut g = [0.0; 9];
        for i in 0..9 {
            let next = if i == 8 { self.angles[0] + 2.0 * PI } else { self.angles[i + 1] };
            g[i] = next - self.angles[i];
        }
        g
    }

    pub fn certify(&self, tol: Tolerance) -> PolygonReport {
        polygon_hitter_certify(
            Point::ORIGIN,
            &self.ring(),
            &Target::Square(unit_pivot()),
            CertifyMode::Unconditional,
            0,
            tol,
        )
        .expect("nine-gon ring is convex and holds the pivot")
    }
}

fn unit_pivot() -> Square {
    Square::axis(Point::ORIGIN, 1.0).expect("unit square")
}

/// Output of [`derive_nine_gon`], frozen.
pub const NINE_GON_ANGLES: [f64; 9] = [
    0.01635917276144028,
    0.7483981588918518,
    1.4114264447368285,
    2.2070552272911512,
    2.7474898331119806,
    3.58242611012784,
    4.106667871438592,
    4.913472256667401,
    5.553785197487317,
];

fn sorted_slacks(angles: &[f64; 9], tol: Tolerance) -> Option<Vec<f64>> {
    let ring: Vec<Point> = angles.iter().map(|&a| Point::polar(1.0, a)).collect();
    let r = polygon_hitter_certify(
        Point::ORIGIN,
        &ring,
        &Target::Square(unit_pivot()),
        CertifyMode::SeparatedOnly,
        0,
        tol,
    )
    .ok()?;
    let mut s: Vec<f64> = r.ring_slack.into_iter().chain(r.side_slack).collect();
    s.sort_by(f64::total_cmp);
    Some(s)
}

/// Coordinate descent from the regular 9-gon. A move is kept when it improves the sorted
/// vector of ring-step and side-clearance slacks lexicographically, so the smallest slack
/// never decreases and ties are broken by the next smallest.
pub fn derive_nine_gon(tol: Tolerance) -> Result<NineGonConfig, HitterError> {
    let mut angles: [f64; 9] = std::array::from_fn(|i| 2.0 * PI * i as f64 / 9.0);
    let mut cur = sorted_slacks(&angles, tol).expect("regular 9-gon is a valid ring");
    let mut step = 0.05;
    while step > 1e-9 {
        let mut improved = false;
        for i in 0..9 {
            for d in [step, -step] {
                let mut next = angles;
                next[i] += d;
                if let Some(s) = sorted_slacks(&next, tol) {
                    if s.as_slice().partial_cmp(cur.as_slice()) == Some(std::cmp::Ordering::Greater) {
                        angles = next;
                        cur = s;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    let margin = cur[0];
    if margin <= 0.0 {
        return Err(HitterError::SearchFailed(margin));
    }
    Ok(NineGonConfig { angles, margin })
}

/// The frozen configuration with its margin recomputed.
pub fn nine_gon() -> NineGonConfig {
    static CFG: OnceLock<NineGonConfig> = OnceLock::new();
    CFG.get_or_init(|| {
        let mut c = NineGonConfig { angles: NINE_GON_ANGLES, margin: 0.0 };
        c.margin = c.certify(Tolerance::default()).margin();
        c
    })
    .clone()
}

/// Pivot centre plus nine points on the circle of radius `side` around it, in the pivot's
/// frame. Hits every square of side at least the pivot's that meets the pivot.
pub fn ten_point_hitter(pivot: &Square) -> Vec<Point> {
    let s = pivot.side();
    let mut out = vec![pivot.centre()];
    out.extend(NINE_GON_ANGLES.iter().map(|&a| pivot.from_local(Point::polar(s, a))));
    out
}

/// Horizontal offset of the six-point construction: `√(4√2 − 5) / 4`.
pub fn six_point_offset() -> f64 {
    (4.0 * SQRT_2 - 5.0).sqrt() / 4.0
}

/// Angles of the upper off-axis point for the two corner-angle ranges.
pub const SIX_POINT_LOW_ANGLE: f64 = 0.82;
pub const SIX_POINT_HIGH_ANGLE: f64 = 0.92;

/// The six points in the frame centred at the pivot (world axes, unit scale), chosen by the
/// pivot's corner angle. The first set is used at exactly `π/4`.
pub fn six_point_local(corner_angle: f64) -> [Point; 6] {
    let t = six_point_offset();
    let arc = |a: f64| Point::new(t + a.cos(), a.sin());
    let p0 = Point::new(t, 0.0);
    let p1 = Point::new(t, 1.0);
    let p3 = Point::new(t + 1.0, 0.0);
    let p5 = Point::new(t, -1.0);
    if corner_angle <= FRAC_PI_4 {
        [p0, p1, arc(SIX_POINT_LOW_ANGLE), p3, arc(SIX_POINT_HIGH_ANGLE).reflect_x(), p5]
    } else {
        [p0, p1, arc(SIX_POINT_HIGH_ANGLE), p3, arc(SIX_POINT_LOW_ANGLE).reflect_x(), p5]
    }
}

/// Six points hitting every same-size neighbour whose centre is not left of the pivot's.
/// The construction uses world axes ("left" is world x), so it is scaled and translated
/// with the pivot but not rotated.
pub fn six_point_hitter(pivot: &Square) -> Vec<Point> {
    six_point_local(pivot.corner_angle())
        .iter()
        .map(|&p| pivot.centre() + p * pivot.side())
        .collect()
}

/// The four vertices, or the two right-hand ones for a leftmost pivot.
pub fn axis_parallel_hitter(pivot: &Square, leftmost: bool, tol: Tolerance) -> Result<Vec<Point>, HitterError> {
    if !pivot.is_axis_parallel(tol) {
        return Err(HitterError::NotAxisParallel(pivot.rot()));
    }
    let (c, h) = (pivot.centre(), pivot.half());
    let right = [Point::new(c.x + h, c.y + h), Point::new(c.x + h, c.y - h)];
    if leftmost {
        return Ok(right.to_vec());
    }
    Ok(vec![right[0], Point::new(c.x - h, c.y + h), Point::new(c.x - h, c.y - h), right[1]])
}

/// Side of the square, concentric with a unit pivot, holding every neighbour's centre.
pub fn cover_square_side() -> f64 {
    SQRT_2 + 1.0
}

/// Twelve centres of radius-1/2 disks covering the axis-parallel square of side `√2 + 1`
/// centred at the origin.
pub const TWELVE_DISK_CENTRES: [(f64, f64); 12] = [
    (-0.7665597846229426, -0.990241961294918),
    (0.03764404717379848, -0.8771587360704772),
    (0.8042038317967412, -0.9264268573209873),
    (-0.8210599467974519, -0.46993052674836366),
    (0.8306270259182774, -0.33050892787656866),
    (0.0033636714268784895, -0.2094495304829414),
    (-0.8650380723313602, 0.18579581299562914),
    (0.8244492480029197, 0.29243871126222687),
    (-0.02319779243983468, 0.42854530924908774),
    (-0.8476470404304793, 0.8725911596342807),
    (0.8210855765643497, 0.9036275630026508),
    (-0.026561463866129675, 1.0397341609657722),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub covered: bool,
    /// Smallest certified slack (negative when an uncovered sample was found).
    pub margin: f64,
    pub pitch: f64,
}

/// Do disks of radius `r` around `centres` cover the axis-parallel square of side `side`
/// centred at the origin? Cells of pitch at most `pitch` are certified from their centre
/// sample when it is covered with slack at least the half-diagonal `h·√2/2`.
pub fn cover_check(centres: &[Point], r: f64, side: f64, pitch: f64, tol: Tolerance) -> Result<CoverReport, HitterError> {
    assert!(r > 0.0 && side > 0.0 && pitch > 0.0);
    let cells = (side / pitch).ceil() as usize;
    let h = side / cells as f64;
    let reach = r - h * SQRT_2 / 2.0;
    let mut margin = f64::INFINITY;
    let mut worst_raw = f64::NEG_INFINITY;
    for i in 0..cells {
        let x = -side / 2.0 + h * (i as f64 + 0.5);
        for j in 0..cells {
            let y = -side / 2.0 + h * (j as f64 + 0.5);
            let p = Point::new(x, y);
            let d = centres.iter().map(|c| c.dist(p)).fold(f64::INFINITY, f64::min);
            margin = margin.min(reach - d);
            worst_raw = worst_raw.max(d - r);
        }
    }
    if margin >= -tol.eps() {
        Ok(CoverReport { covered: true, margin, pitch: h })
    } else if worst_raw > 0.0 {
        Ok(CoverReport { covered: false, margin: -worst_raw, pitch: h })
    } else {
        Err(HitterError::Inconclusive)
    }
}

fn twelve_cover_report() -> &'static Result<CoverReport, HitterError> {
    static REPORT: OnceLock<Result<CoverReport, HitterError>> = OnceLock::new();
    REPORT.get_or_init(|| {
        let c: Vec<Point> = TWELVE_DISK_CENTRES.iter().map(|&(x, y)| Point::new(x, y)).collect();
        cover_check(&c, 0.5, cover_square_side(), 2e-3, Tolerance::default())
    })
}

/// Centres of the twelve-disk cover, scaled to the pivot and aligned with it. Each neighbour
/// of the same size has its inner disk around one of these points.
pub fn twelve_point_cover_hitter(pivot: &Square) -> Result<Vec<Point>, HitterError> {
    match twelve_cover_report() {
        Ok(r) if r.covered => {}
        Ok(r) => return Err(HitterError::CoverageCheckFailed(format!("margin {}", r.margin))),
        Err(e) => return Err(HitterError::CoverageCheckFailed(e.to_string())),
    }
    let s = pivot.side();
    Ok(TWELVE_DISK_CENTRES
        .iter()
        .map(|&(x, y)| pivot.from_local(Point::new(x * s, y * s)))
        .collect())
}

/// Points emitted by `kind` for `pivot`.
pub fn hitter_points(kind: HitterKind, pivot: &Square, tol: Tolerance) -> Result<Vec<Point>, HitterError> {
    match kind {
        HitterKind::TenPoint => Ok(ten_point_hitter(pivot)),
        HitterKind::SixPointLeftmost => Ok(six_point_hitter(pivot)),
        HitterKind::AxisParallel4 => axis_parallel_hitter(pivot, false, tol),
        HitterKind::AxisParallelLeftmost2 => axis_parallel_hitter(pivot, true, tol),
        HitterKind::TwelvePointCover => twelve_point_cover_hitter(pivot),
    }
}

/// Slack in the two closed-form conditions on the six-point offset `t`: the first must
/// be at least 0, the second too. Both vanish or stay positive up to rounding.
pub fn six_point_slacks() -> [f64; 2] {
    let t = six_point_offset();
    let first = ((SQRT_2 - 1.0) / 2.0).powi(2) - (t * t + (0.5 - (0.25 - t * t).sqrt()).powi(2));
    let second = 0.25 - (t * t + (SQRT_2 - 1.0).powi(2));
    [first, second]
}

/// Restrictions on the neighbours the falsifier may try.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighbourClass {
    pub side_min: f64,
    pub side_max: f64,
    /// Centre must not be left of the pivot's centre.
    pub right_of_pivot: bool,
    pub axis_parallel: bool,
}

impl NeighbourClass {
    /// Neighbours exactly the pivot's size, any rotation.
    pub fn same_size(pivot: &Square) -> Self {
        NeighbourClass { side_min: pivot.side(), side_max: pivot.side(), right_of_pivot: false, axis_parallel: false }
    }

    pub fn at_least(pivot: &Square, factor: f64) -> Self {
        NeighbourClass { side_max: pivot.side() * factor, ..Self::same_size(pivot) }
    }

    pub fn right(self) -> Self {
        NeighbourClass { right_of_pivot: true, ..self }
    }

    pub fn axis(self) -> Self {
        NeighbourClass { axis_parallel: true, ..self }
    }

    /// The neighbours `kind` promises to hit around `pivot`. Larger neighbours are capped
    /// at `max_factor` times the pivot side.
    pub fn for_kind(kind: HitterKind, pivot: &Square, max_factor: f64) -> Self {
        match kind {
            HitterKind::TenPoint => Self::at_least(pivot, max_factor),
            HitterKind::SixPointLeftmost => Self::same_size(pivot).right(),
            HitterKind::AxisParallel4 => Self::at_least(pivot, max_factor).axis(),
            HitterKind::AxisParallelLeftmost2 => Self::same_size(pivot).right().axis(),
            HitterKind::TwelvePointCover => Self::same_size(pivot),
        }
    }

    fn admits(&self, pivot: &Square, s: &Square, tol: Tolerance) -> bool {
        s.side() >= self.side_min - tol.eps()
            && s.side() <= self.side_max + tol.eps()
            && (!self.right_of_pivot || s.centre().x >= pivot.centre().x)
            && (!self.axis_parallel || s.rot() == 0.0)
            && squares_intersect(pivot, s, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FalsifyBudget {
    pub restarts: usize,
    pub climb_steps: usize,
}

impl FalsifyBudget {
    /// Roughly `samples` square evaluations.
    pub fn samples(samples: usize) -> Self {
        let climb_steps = 19;
        FalsifyBudget { restarts: samples.div_ceil(climb_steps + 1).max(1), climb_steps }
    }

    pub fn total(&self) -> usize {
        self.restarts * (self.climb_steps + 1)
    }
}

fn clearance(s: &Square, points: &[Point]) -> f64 {
    points.iter().map(|&p| dist_point_square(p, s)).fold(f64::INFINITY, f64::min)
}

fn random_neighbour(pivot: &Square, class: &NeighbourClass, rng: &mut ChaCha8Rng) -> Square {
    let h = pivot.half();
    let anchor = pivot.from_local(Point::new(rng.gen_range(-h..=h), rng.gen_range(-h..=h)));
    let side = if class.side_max > class.side_min { rng.gen_range(class.side_min..=class.side_max) } else { class.side_min };
    let rot = if class.axis_parallel { 0.0 } else { rng.gen_range(0.0..FRAC_PI_2) };
    let k = side / 2.0;
    let offset = Point::new(rng.gen_range(-k..=k), rng.gen_range(-k..=k)).rotate(rot);
    let mut c = anchor - offset;
    if class.right_of_pivot && c.x < pivot.centre().x {
        c.x = 2.0 * pivot.centre().x - c.x;
    }
    Square::new(c, side, rot).expect("finite sample")
}

/// Random restarts plus hill climbing on the distance from the candidate square to the
/// nearest point. Returns a neighbour in `class` containing none of `points`, if found.
pub fn falsify_hitter(
    pivot: &Square,
    points: &[Point],
    class: &NeighbourClass,
    budget: FalsifyBudget,
    seed: u64,
    tol: Tolerance,
) -> Option<Square> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let missed = |s: &Square| !points.iter().any(|&p| contains_point(s, p, tol));
    for _ in 0..budget.restarts {
        let mut cur = random_neighbour(pivot, class, &mut rng);
        if !class.admits(pivot, &cur, tol) {
            continue;
        }
        if missed(&cur) {
            return Some(cur);
        }
        let mut score = clearance(&cur, points);
        let mut step = 0.25 * pivot.side();
        for _ in 0..budget.climb_steps {
            let d = Point::new(rng.gen_range(-step..=step), rng.gen_range(-step..=step));
            let rot = if class.axis_parallel { 0.0 } else { cur.rot() + rng.gen_range(-step..=step) };
            let side = (cur.side() + rng.gen_range(-step..=step) * 0.5).clamp(class.side_min, class.side_max);
            let Ok(next) = Square::new(cur.centre() + d, side, rot) else { continue };
            if !class.admits(pivot, &next, tol) {
                step *= 0.7;
                continue;
            }
            if missed(&next) {
                return Some(next);
            }
            let sc = clearance(&next, points);
            if sc < score {
                cur = next;
                score = sc;
            } else {
                step *= 0.7;
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_hitters() {
        let tol = Tolerance::default();
        let s = unit_pivot();
        let four = axis_parallel_hitter(&s, false, tol).unwrap();
        assert_eq!(four.len(), 4);
        let two = axis_parallel_hitter(&s, true, tol).unwrap();
        assert_eq!(two, vec![Point::new(0.5, 0.5), Point::new(0.5, -0.5)]);
        let tilted = Square::new(Point::ORIGIN, 1.0, 0.1).unwrap();
        assert!(matches!(axis_parallel_hitter(&tilted, false, tol), Err(HitterError::NotAxisParallel(_))));
    }

    #[test]
    fn six_point_offset_value() {
        assert!((six_point_offset() - 0.202_6).abs() < 1e-3);
        assert!(six_point_slacks().iter().all(|&s| s >= -1e-12));
    }

    #[test]
    fn six_point_switches_at_quarter_turn() {
        let low = six_point_local(FRAC_PI_4);
        assert!((low[2].y - SIX_POINT_LOW_ANGLE.sin()).abs() < 1e-15);
        let high = six_point_local(FRAC_PI_4 + 1e-9);
        assert!((high[2].y - SIX_POINT_HIGH_ANGLE.sin()).abs() < 1e-15);
        assert!(high.iter().all(|p| p.x >= 0.0));
    }

    #[test]
    fn twelve_disks_cover() {
        let r = twelve_cover_report().as_ref().unwrap();
        assert!(r.covered && r.margin >= 1e-6, "{r:?}");
        let c: Vec<Point> = TWELVE_DISK_CENTRES.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let shrunk = cover_check(&c, 0.48, cover_square_side(), 2e-3, Tolerance::default()).unwrap();
        assert!(!shrunk.covered);
    }

    #[test]
    fn falsifier_finds_trivial_miss() {
        let s = unit_pivot();
        let found = falsify_hitter(&s, &[], &NeighbourClass::same_size(&s), FalsifyBudget::samples(10), 1, Tolerance::default());
        assert!(found.is_some());
    }

    #[test]
    fn nine_gon_derivation_reproduces_constant() {
        let c = derive_nine_gon(Tolerance::default()).unwrap();
        for (a, b) in c.angles.iter().zip(NINE_GON_ANGLES) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let frozen = nine_gon();
        assert!(frozen.margin >= 1e-4);
        assert!(frozen.certify(Tolerance::default()).is_certified());
        let gaps = frozen.gaps();
        assert!(gaps.iter().all(|&g| g < 1.0));
        let widest = gaps.iter().cloned().fold(0.0, f64::max);
        assert!((widest - 0.84).abs() <= 0.02, "{widest}");
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("six-point".parse::<HitterKind>().unwrap(), HitterKind::SixPointLeftmost);
        assert_eq!("ten_point".parse::<HitterKind>().unwrap(), HitterKind::TenPoint);
        assert!("five".parse::<HitterKind>().is_err());
    }
}

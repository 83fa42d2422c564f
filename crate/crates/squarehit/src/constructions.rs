//! Extremal families with their expected parameters, checked against the exact solvers.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Square, SquareFamily};
use crate::solvers::{build_graph, solve, IntersectionGraph, Param, SolverError, SolverLimits};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("{name}: expected {param} = {expected}, solver found {found}")]
    ConstructionInvalid { name: String, param: Param, expected: usize, found: usize },
    #[error("{name}: {reason}")]
    Degenerate { name: String, reason: String },
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("unknown construction '{0}'")]
    UnknownName(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Expected exact parameters; `None` means not asserted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub nu: Option<usize>,
    pub tau: Option<usize>,
    pub chi: Option<usize>,
    pub omega: Option<usize>,
    pub delta: Option<usize>,
}

impl Expected {
    pub fn get(&self, p: Param) -> Option<usize> {
        match p {
            Param::Nu => self.nu,
            Param::Tau => self.tau,
            Param::Chi => self.chi,
            Param::Omega => self.omega,
            Param::Delta => self.delta,
        }
    }

    pub fn entries(&self) -> Vec<(Param, usize)> {
        [Param::Nu, Param::Tau, Param::Chi, Param::Omega, Param::Delta]
            .into_iter()
            .filter_map(|p| self.get(p).map(|v| (p, v)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedConstruction {
    pub name: String,
    pub family: SquareFamily,
    pub expected: Expected,
    /// Designated squares such as the pivot or the chain ends `x`, `y`, `z`.
    pub marked: Vec<(String, usize)>,
}

impl NamedConstruction {
    fn new(name: &str, family: SquareFamily, expected: Expected) -> Self {
        NamedConstruction { name: name.into(), family, expected, marked: Vec::new() }
    }

    pub fn marked(&self, role: &str) -> Option<usize> {
        self.marked.iter().find(|(r, _)| r == role).map(|&(_, i)| i)
    }

    /// Runs the exact solver for every expected parameter.
    pub fn verify(&self) -> Result<(), ConstructionError> {
        self.verify_only(&[Param::Nu, Param::Tau, Param::Chi, Param::Omega, Param::Delta])
    }

    pub fn verify_only(&self, params: &[Param]) -> Result<(), ConstructionError> {
        let limits = SolverLimits::default();
        for &p in params {
            if let Some(want) = self.expected.get(p) {
                let got = solve(&self.family, p, &limits)?.value;
                if got != want {
                    return Err(ConstructionError::ConstructionInvalid {
                        name: self.name.clone(),
                        param: p,
                        expected: want,
                        found: got,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Three squares on the outside of a triangle's sides, each starting `overhang` before
/// a vertex and running along the side. `gap` is the triangle's side length.
pub fn pinwheel(centre: Point, gap: f64, overhang: f64, side: f64, rot0: f64) -> [Square; 3] {
    let r = gap / 3f64.sqrt();
    let v: Vec<Point> = (0..3).map(|k| centre + Point::polar(r, rot0 + FRAC_PI_2 + 2.0 * PI * k as f64 / 3.0)).collect();
    std::array::from_fn(|i| {
        let (a, b) = (v[i], v[(i + 1) % 3]);
        let u = (b - a) * (1.0 / gap);
        let n = Point::new(u.y, -u.x);
        let c = a + u * (side / 2.0 - overhang) + n * (side / 2.0);
        Square::new(c, side, u.y.atan2(u.x)).expect("finite pinwheel parameters")
    })
}

/// Vertices of the triangle used by [`pinwheel`].
pub fn pinwheel_triangle(centre: Point, gap: f64, rot0: f64) -> [Point; 3] {
    let r = gap / 3f64.sqrt();
    std::array::from_fn(|k| centre + Point::polar(r, rot0 + FRAC_PI_2 + 2.0 * PI * k as f64 / 3.0))
}

/// Three pairwise intersecting unit squares with no common point.
pub fn three_pairwise_unit() -> NamedConstruction {
    let fam: SquareFamily = pinwheel(Point::ORIGIN, 0.3, 0.05, 1.0, 0.0).into_iter().collect();
    NamedConstruction::new(
        "three_pairwise_unit",
        fam,
        Expected { nu: Some(1), tau: Some(2), chi: Some(3), omega: Some(3), delta: Some(2) },
    )
}

pub const PINWHEEL_TAU2_GAP: f64 = 0.4;

/// Three unit squares each starting exactly at a triangle vertex. Two points suffice only
/// when one of them sits where two squares meet, at a vertex of the triangle.
pub fn pinwheel_tau2() -> NamedConstruction {
    let fam: SquareFamily = pinwheel(Point::ORIGIN, PINWHEEL_TAU2_GAP, 0.0, 1.0, 0.0).into_iter().collect();
    NamedConstruction::new("pinwheel_tau2", fam, Expected { nu: Some(1), tau: Some(2), ..Default::default() })
}

/// A two-point cover of [`pinwheel_tau2`] through a triangle vertex.
pub fn pinwheel_tau2_cover() -> [Point; 2] {
    let v = pinwheel_triangle(Point::ORIGIN, PINWHEEL_TAU2_GAP, 0.0);
    let fam = pinwheel(Point::ORIGIN, PINWHEEL_TAU2_GAP, 0.0, 1.0, 0.0);
    // v[0] starts square 0 and ends square 2; square 1 is left.
    [v[0], fam[1].centre()]
}

/// Three unit pinwheels: (gap, overhang, rot0, cx, cy) each.
const NINE_PINWHEELS: [[f64; 5]; 3] = [
    [0.45376481905243826, 0.20603016423428935, -0.32530485305622026, 0.06260643658262975, 0.20540719895409415],
    [0.036004080134917016, 0.23661540350218901, -0.5504806793166356, 0.06960319961652738, 0.19913640264493174],
    [0.07146069379952556, 0.030329753651226626, -0.9634001420393091, 0.06308184853404217, 0.2054033401779074],
];

/// Verified range for the shift scale of [`nine_square_tau3_with`].
pub const NINE_SHIFT_RANGE: (f64, f64) = (0.85, 1.15);

/// Nine pairwise intersecting unit squares needing three points.
pub fn nine_square_tau3() -> NamedConstruction {
    nine_square_tau3_with(1.0).expect("default shift verified")
}

/// The first pinwheel is the base; the other two are shifted copies whose offset from
/// the base (in every parameter) is scaled by `shift`.
pub fn nine_square_tau3_with(shift: f64) -> Result<NamedConstruction, ConstructionError> {
    let base = NINE_PINWHEELS[0];
    let mut squares = Vec::with_capacity(9);
    for p in NINE_PINWHEELS {
        let q: Vec<f64> = (0..5).map(|i| base[i] + shift * (p[i] - base[i])).collect();
        squares.extend(pinwheel(Point::new(q[3], q[4]), q[0], q[1], 1.0, q[2]));
    }
    let c = NamedConstruction::new(
        "nine_square_tau3",
        SquareFamily::new(squares),
        Expected { nu: Some(1), tau: Some(3), omega: Some(9), ..Default::default() },
    );
    c.verify_only(&[Param::Nu, Param::Tau])?;
    Ok(c)
}

pub const C5_RADIUS: f64 = 0.8;

/// Five axis-parallel unit squares on a regular pentagon, each repeated `m` times.
pub fn c5_cycle(m: usize) -> NamedConstruction {
    let m = m.max(1);
    let mut squares = Vec::with_capacity(5 * m);
    for k in 0..5 {
        let c = Point::polar(C5_RADIUS, FRAC_PI_2 + 2.0 * PI * k as f64 / 5.0);
        for _ in 0..m {
            squares.push(Square::axis(c, 1.0).expect("unit square"));
        }
    }
    // χ = ⌈5m/2⌉ and ω = 2m for the blown-up 5-cycle.
    NamedConstruction::new(
        &format!("c5_cycle_m{m}"),
        SquareFamily::new(squares),
        Expected { nu: Some(2), tau: Some(3), chi: Some((5 * m).div_ceil(2)), omega: Some(2 * m), delta: Some(2 * m) },
    )
}

/// Pivot first, then seven neighbours; the first two neighbours lie left of the pivot centre.
const SEVEN_NEIGHBOURS: [(f64, f64, f64); 7] = [
    (-1.113671819380288, 0.3642511410507925, 0.3174257748569945),
    (-1.0684485227368683, -0.8540972975490793, 1.3797385282587347),
    (0.6691505585082307, 1.1662869753567662, 0.5273040140066603),
    (1.0581842851424899, -0.8960134642758902, 0.1655923321926324),
    (0.055640605010541175, 0.032690852109052496, 0.3174257787033774),
    (0.06391029667756833, -1.0581682573424482, 0.16559233806918658),
    (1.1662728283947958, 0.2900135205876745, 0.5273039921249237),
];

fn seven_family(skip_left: bool) -> SquareFamily {
    let pivot = Square::axis(Point::ORIGIN, 1.0).expect("unit square");
    let rest = SEVEN_NEIGHBOURS
        .iter()
        .filter(|&&(x, _, _)| !(skip_left && x < 0.0))
        .map(|&(x, y, r)| Square::new(Point::new(x, y), 1.0, r).expect("finite"));
    std::iter::once(pivot).chain(rest).collect()
}

/// A unit pivot (index 0) meeting seven pairwise disjoint unit squares.
pub fn seven_disjoint_neighbors() -> NamedConstruction {
    let mut c = NamedConstruction::new(
        "seven_disjoint_neighbors",
        seven_family(false),
        Expected { nu: Some(7), tau: Some(7), ..Default::default() },
    );
    c.marked.push(("pivot".into(), 0));
    c
}

/// [`seven_disjoint_neighbors`] without the two neighbours centred left of the pivot,
/// which makes the pivot leftmost.
pub fn seven_disjoint_neighbors_trimmed() -> NamedConstruction {
    let mut c = NamedConstruction::new(
        "seven_disjoint_neighbors_trimmed",
        seven_family(true),
        Expected { nu: Some(5), tau: Some(5), ..Default::default() },
    );
    c.marked.push(("pivot".into(), 0));
    c
}

/// Distance between consecutive squares along a chain segment.
pub const CHAIN_STEP: f64 = 0.9;
const CHAIN_CORNER_SHIFT: f64 = 0.2;
const CHAIN_SPREAD: f64 = 0.04;

fn unit_dir(a: Point, b: Point) -> Result<(Point, f64), ConstructionError> {
    let d = b - a;
    let len = d.norm();
    if !(len > 0.0) || !len.is_finite() {
        return Err(ConstructionError::MalformedPath("zero-length segment".into()));
    }
    if d.x.abs() > 1e-9 * len && d.y.abs() > 1e-9 * len {
        return Err(ConstructionError::MalformedPath(format!("segment {a:?} -> {b:?} is not axis-parallel")));
    }
    Ok((d * (1.0 / len), len))
}

/// A chain of diamonds along an axis-parallel polyline: each diamond is two end squares
/// joined through a clique of `k − 1` squares, so in any `k`-colouring both ends agree.
/// Consecutive diamonds share an end. Segment lengths must be close to a multiple of
/// `2 · CHAIN_STEP`. With `edge`, a square `z` adjacent only to `y` is appended.
pub fn k_chain(path: &[Point], k: usize, edge: bool) -> Result<NamedConstruction, ConstructionError> {
    if k < 3 {
        return Err(ConstructionError::MalformedPath(format!("k = {k} < 3")));
    }
    if path.len() < 2 {
        return Err(ConstructionError::MalformedPath("need at least two path vertices".into()));
    }
    let mut dirs = Vec::new();
    for w in path.windows(2) {
        let (d, len) = unit_dir(w[0], w[1])?;
        if let Some(&(prev, _, _)) = dirs.last() {
            let prev: Point = prev;
            if prev.dot(d).abs() > 1e-9 {
                return Err(ConstructionError::MalformedPath("segments must alternate horizontal and vertical".into()));
            }
        }
        let count = (len / (2.0 * CHAIN_STEP)).round().max(1.0);
        let step = len / (2.0 * count);
        if !(1.0 - CHAIN_CORNER_SHIFT + CHAIN_SPREAD..=1.0 - CHAIN_SPREAD).contains(&step) {
            return Err(ConstructionError::MalformedPath(format!("segment length {len} is not a multiple of {}", 2.0 * CHAIN_STEP)));
        }
        dirs.push((d, step, count as usize));
    }

    let mut squares: Vec<Point> = vec![path[0]];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut end = 0;
    let nseg = dirs.len();
    for (s, &(d, step, count)) in dirs.iter().enumerate() {
        let perp = Point::new(-d.y, d.x);
        let start = path[s];
        for j in 0..count {
            let mut mid = start + d * (step * (2 * j + 1) as f64);
            if j == 0 && s > 0 {
                mid = mid + dirs[s - 1].0 * CHAIN_CORNER_SHIFT;
            }
            if j + 1 == count && s + 1 < nseg {
                mid = mid - dirs[s + 1].0 * CHAIN_CORNER_SHIFT;
            }
            let first = squares.len();
            for c in 0..k - 1 {
                let off = CHAIN_SPREAD * (c as f64 - (k - 2) as f64 / 2.0) / (k - 2).max(1) as f64;
                squares.push(mid + perp * off);
            }
            let next = squares.len();
            squares.push(start + d * (step * (2 * j + 2) as f64));
            for a in first..next {
                edges.push((end, a));
                edges.push((a, next));
                for b in a + 1..next {
                    edges.push((a, b));
                }
            }
            end = next;
        }
    }
    let y = end;
    let mut z = None;
    if edge {
        let (d, step, _) = dirs[nseg - 1];
        z = Some(squares.len());
        squares.push(squares[y] + d * step);
        edges.push((y, squares.len() - 1));
    }

    let family: SquareFamily = squares.iter().map(|&c| Square::axis(c, 1.0).expect("finite path")).collect();
    let name = if edge { format!("k_chain_edge_k{k}") } else { format!("k_chain_k{k}") };
    check_graph(&name, &build_graph(&family), &edges)?;
    let mut c = NamedConstruction::new(&name, family, Expected { omega: Some(k), chi: Some(k), ..Default::default() });
    c.marked.push(("x".into(), 0));
    c.marked.push(("y".into(), y));
    if let Some(z) = z {
        c.marked.push(("z".into(), z));
    }
    Ok(c)
}

fn check_graph(name: &str, g: &IntersectionGraph, edges: &[(usize, usize)]) -> Result<(), ConstructionError> {
    let mut want = vec![vec![false; g.n]; g.n];
    for &(a, b) in edges {
        want[a][b] = true;
        want[b][a] = true;
    }
    for i in 0..g.n {
        for j in i + 1..g.n {
            if g.has_edge(i, j) != want[i][j] {
                return Err(ConstructionError::Degenerate {
                    name: name.into(),
                    reason: format!("squares {i} and {j}: adjacency is {} but should be {}", g.has_edge(i, j), want[i][j]),
                });
            }
        }
    }
    Ok(())
}

/// `copies` translates of `c` far enough apart that no two copies interact.
pub fn disjoint_copies(c: &NamedConstruction, copies: usize) -> NamedConstruction {
    let copies = copies.max(1);
    if copies == 1 {
        return c.clone();
    }
    let (lo, hi) = c.family.bounds().unwrap_or((Point::ORIGIN, Point::ORIGIN));
    let pitch = (hi.x - lo.x) + 1.0;
    let mut squares = Vec::with_capacity(c.family.len() * copies);
    for i in 0..copies {
        squares.extend(c.family.translated(Point::new(pitch * i as f64, 0.0)).squares);
    }
    let e = c.expected;
    let times = |v: Option<usize>| v.map(|v| v * copies);
    NamedConstruction {
        name: format!("{}_x{copies}", c.name),
        family: SquareFamily::with_tol(squares, c.family.tol),
        expected: Expected { nu: times(e.nu), tau: times(e.tau), ..e },
        marked: Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleMode {
    /// `rot = 0`, sides from the range.
    Axis,
    /// Side 1, rotation uniform in `[0, π/2)`.
    UnitRotated,
    /// Sides from the range, rotation uniform.
    Free,
}

impl std::str::FromStr for AngleMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "axis" => Ok(AngleMode::Axis),
            "unit-rotated" | "unit" => Ok(AngleMode::UnitRotated),
            "free" => Ok(AngleMode::Free),
            other => Err(format!("unknown angle mode '{other}' (expected axis, unit-rotated or free)")),
        }
    }
}

/// Random squares with centres uniform in `[0, window]²`. Deterministic in `seed`.
pub fn random_family(n: usize, side_range: (f64, f64), mode: AngleMode, window: f64, seed: u64) -> SquareFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = side_range;
    (0..n.max(1))
        .map(|_| {
            let c = Point::new(rng.gen_range(0.0..=window), rng.gen_range(0.0..=window));
            let side = match mode {
                AngleMode::UnitRotated => 1.0,
                _ if hi > lo => rng.gen_range(lo..hi),
                _ => lo,
            };
            let rot = match mode {
                AngleMode::Axis => 0.0,
                _ => rng.gen_range(0.0..FRAC_PI_2),
            };
            Square::new(c, side, rot).expect("positive side range")
        })
        .collect()
}

/// Options for [`by_name`]; each construction reads only the fields it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedOptions {
    pub m: usize,
    pub k: usize,
    pub copies: usize,
    pub shift: f64,
    pub edge: bool,
    pub path: Vec<Point>,
}

impl Default for NamedOptions {
    fn default() -> Self {
        NamedOptions {
            m: 1,
            k: 3,
            copies: 1,
            shift: 1.0,
            edge: false,
            path: vec![Point::ORIGIN, Point::new(4.0 * CHAIN_STEP, 0.0)],
        }
    }
}

pub const NAMES: [&str; 9] = [
    "three_pairwise_unit",
    "pinwheel_tau2",
    "nine_square_tau3",
    "thirteen_square_tau4",
    "c5_cycle",
    "seven_disjoint_neighbors",
    "seven_disjoint_neighbors_trimmed",
    "k_chain",
    "two_size_six",
];

pub fn by_name(name: &str, opts: &NamedOptions) -> Result<NamedConstruction, ConstructionError> {
    let c = match name.replace('-', "_").as_str() {
        "three_pairwise_unit" => three_pairwise_unit(),
        "pinwheel_tau2" => pinwheel_tau2(),
        "nine_square_tau3" => nine_square_tau3_with(opts.shift)?,
        "thirteen_square_tau4" => thirteen_square_tau4()?,
        "two_size_six" => two_size_six(),
        "c5_cycle" => c5_cycle(opts.m),
        "seven_disjoint_neighbors" => seven_disjoint_neighbors(),
        "seven_disjoint_neighbors_trimmed" => seven_disjoint_neighbors_trimmed(),
        "k_chain" => k_chain(&opts.path, opts.k, opts.edge)?,
        _ => return Err(ConstructionError::UnknownName(name.into())),
    };
    Ok(disjoint_copies(&c, opts.copies))
}

/// Two concentric pinwheels of different sizes: six pairwise intersecting squares
/// needing three points.
pub fn two_size_six() -> NamedConstruction {
    let mut squares = pinwheel(Point::ORIGIN, 0.42485665970194286, 0.45719698260396074, 1.0, -1.3698056048658969).to_vec();
    squares.extend(pinwheel(Point::ORIGIN, 0.16537817707675884, 0.010670850916379884, 0.9253962102587115, -2.082195221740586));
    NamedConstruction::new(
        "two_size_six",
        SquareFamily::new(squares),
        Expected { nu: Some(1), tau: Some(3), omega: Some(6), ..Default::default() },
    )
}

/// Thirteen pairwise intersecting squares needing four points.
pub fn thirteen_square_tau4() -> Result<NamedConstruction, ConstructionError> {
    Err(ConstructionError::Degenerate {
        name: "thirteen_square_tau4".into(),
        reason: "no realisation with the required intersection pattern is available".into(),
    })
}

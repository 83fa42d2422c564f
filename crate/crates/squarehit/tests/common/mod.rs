//! Brute-force oracles that share no code with the library's solvers.
#![allow(dead_code)]

use squarehit::{Point, Square, SquareFamily};

pub const EPS: f64 = 1e-9;

fn corners(s: &Square) -> [(f64, f64); 4] {
    let (c, h, r) = (s.centre(), s.side() / 2.0, s.rot());
    let (cs, sn) = (r.cos(), r.sin());
    [(-h, -h), (h, -h), (h, h), (-h, h)].map(|(x, y)| (c.x + x * cs - y * sn, c.y + x * sn + y * cs))
}

fn axes(s: &Square) -> [(f64, f64); 2] {
    let r = s.rot();
    [(r.cos(), r.sin()), (-r.sin(), r.cos())]
}

fn project(pts: &[(f64, f64)], ax: (f64, f64)) -> (f64, f64) {
    pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, y)| {
        let d = x * ax.0 + y * ax.1;
        (lo.min(d), hi.max(d))
    })
}

/// Separating-axis test on the four edge normals.
pub fn meets(a: &Square, b: &Square) -> bool {
    let (pa, pb) = (corners(a), corners(b));
    axes(a).iter().chain(axes(b).iter()).all(|&ax| {
        let (a0, a1) = project(&pa, ax);
        let (b0, b1) = project(&pb, ax);
        a1 >= b0 - EPS && b1 >= a0 - EPS
    })
}

pub fn holds(s: &Square, p: (f64, f64)) -> bool {
    let c = s.centre();
    let h = s.side() / 2.0 + EPS;
    axes(s).iter().all(|&(ux, uy)| ((p.0 - c.x) * ux + (p.1 - c.y) * uy).abs() <= h)
}

fn seg_cross(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> Option<(f64, f64)> {
    let r = (p2.0 - p1.0, p2.1 - p1.1);
    let s = (q2.0 - q1.0, q2.1 - q1.1);
    let den = r.0 * s.1 - r.1 * s.0;
    if den.abs() < 1e-14 {
        return None;
    }
    let w = (q1.0 - p1.0, q1.1 - p1.1);
    let t = (w.0 * s.1 - w.1 * s.0) / den;
    let u = (w.0 * r.1 - w.1 * r.0) / den;
    ((-1e-12..=1.0 + 1e-12).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u)).then(|| (p1.0 + t * r.0, p1.1 + t * r.1))
}

/// Vertices of every cell of the arrangement: square corners and edge crossings.
pub fn arrangement_points(fam: &SquareFamily) -> Vec<(f64, f64)> {
    let cs: Vec<[(f64, f64); 4]> = fam.iter().map(corners).collect();
    let mut pts: Vec<(f64, f64)> = cs.iter().flatten().copied().collect();
    pts.extend(fam.iter().map(|s| (s.centre().x, s.centre().y)));
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            for e in 0..4 {
                for f in 0..4 {
                    if let Some(p) = seg_cross(cs[i][e], cs[i][(e + 1) % 4], cs[j][f], cs[j][(f + 1) % 4]) {
                        pts.push(p);
                    }
                }
            }
        }
    }
    pts
}

fn cover_masks(fam: &SquareFamily) -> Vec<u64> {
    let mut masks: Vec<u64> = arrangement_points(fam)
        .into_iter()
        .map(|p| fam.iter().enumerate().filter(|(_, s)| holds(s, p)).fold(0u64, |m, (i, _)| m | 1 << i))
        .collect();
    masks.sort_unstable();
    masks.dedup();
    let all = masks.clone();
    masks.retain(|&m| m != 0 && !all.iter().any(|&o| o != m && o & m == m));
    masks
}

fn choose(masks: &[u64], k: usize, start: usize, acc: u64, full: u64) -> bool {
    if acc == full {
        return true;
    }
    if k == 0 {
        return false;
    }
    (start..masks.len()).any(|i| choose(masks, k - 1, i + 1, acc | masks[i], full))
}

pub fn naive_tau(fam: &SquareFamily) -> usize {
    let n = fam.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let masks = cover_masks(fam);
    (0..=n).find(|&k| choose(&masks, k, 0, 0, full)).expect("n points always suffice")
}

pub fn adjacency(fam: &SquareFamily) -> Vec<Vec<bool>> {
    let s = &fam.squares;
    (0..s.len()).map(|i| (0..s.len()).map(|j| i != j && meets(&s[i], &s[j])).collect()).collect()
}

fn best_subset(adj: &[Vec<bool>], want_edges: bool) -> usize {
    let n = adj.len();
    (0u32..1 << n)
        .filter(|&m| {
            (0..n).all(|i| m >> i & 1 == 0 || (i + 1..n).all(|j| m >> j & 1 == 0 || adj[i][j] == want_edges))
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn naive_nu(fam: &SquareFamily) -> usize {
    best_subset(&adjacency(fam), false)
}

pub fn naive_omega(fam: &SquareFamily) -> usize {
    best_subset(&adjacency(fam), true)
}

/// Every proper colouring with colours `0..k`, as colour vectors.
pub fn all_colourings(adj: &[Vec<bool>], k: usize) -> Vec<Vec<usize>> {
    fn go(adj: &[Vec<bool>], k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = cur.len();
        if v == adj.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..k {
            if (0..v).all(|u| !adj[v][u] || cur[u] != c) {
                cur.push(c);
                go(adj, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(adj, k, &mut Vec::new(), &mut out);
    out
}

fn colourable(adj: &[Vec<bool>], k: usize, cur: &mut Vec<usize>) -> bool {
    let v = cur.len();
    if v == adj.len() {
        return true;
    }
    for c in 0..k {
        if (0..v).all(|u| !adj[v][u] || cur[u] != c) {
            cur.push(c);
            if colourable(adj, k, cur) {
                return true;
            }
            cur.pop();
        }
    }
    false
}

pub fn naive_chi(fam: &SquareFamily) -> usize {
    let adj = adjacency(fam);
    if adj.is_empty() {
        return 0;
    }
    (1..=adj.len()).find(|&k| colourable(&adj, k, &mut Vec::new())).expect("n colours suffice")
}

/// Largest number of squares through one point.
pub fn naive_ply(fam: &SquareFamily) -> usize {
    arrangement_points(fam)
        .into_iter()
        .map(|p| fam.iter().filter(|s| holds(s, p)).count())
        .max()
        .unwrap_or(0)
}

pub fn pt(p: Point) -> (f64, f64) {
    (p.x, p.y)
}

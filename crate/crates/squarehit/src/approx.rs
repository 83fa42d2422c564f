//! Greedy hitting sets with per-round certificates and degeneracy colourings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{contains_point, squares_intersect, Point, SquareFamily};
use crate::hitters::{hitter_points, HitterError, HitterKind};
use crate::solvers::{build_graph, max_degree_Delta, IntersectionGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("mode {mode} does not apply: {reason}")]
    ModeInapplicable { mode: HitterKind, reason: String },
    #[error("round {round}: square {square} meets pivot {pivot} but was not hit")]
    GuaranteeViolated { round: usize, pivot: usize, square: usize },
    #[error("squares do not all have the same side")]
    NotUnitFamily,
    #[error(transparent)]
    Hitter(#[from] HitterError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub pivot: usize,
    pub kind: HitterKind,
    pub points: Vec<Point>,
    /// Squares removed this round, pivot included.
    pub removed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingRun {
    pub points: Vec<Point>,
    pub rounds: Vec<Round>,
    /// Points emitted per round at most.
    pub per_round: usize,
}

impl HittingRun {
    /// Pivots are pairwise disjoint, so this is a lower bound on the packing number.
    pub fn packing_lower_bound(&self) -> usize {
        self.rounds.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.pivot).collect()
    }

    /// `|points| ≤ k · rounds`.
    pub fn within_bound(&self) -> bool {
        self.points.len() <= self.per_round * self.rounds.len()
    }
}

fn same_side(fam: &SquareFamily) -> bool {
    let eps = fam.tol.eps();
    match fam.squares.first() {
        None => true,
        Some(f) => fam.iter().all(|s| (s.side() - f.side()).abs() <= eps * f.side().max(1.0)),
    }
}

fn check_mode(fam: &SquareFamily, mode: HitterKind) -> Result<(), ApproxError> {
    let inapplicable = |reason: &str| ApproxError::ModeInapplicable { mode, reason: reason.into() };
    match mode {
        HitterKind::SixPointLeftmost | HitterKind::TwelvePointCover if !same_side(fam) => {
            Err(inapplicable("squares differ in side"))
        }
        HitterKind::AxisParallel4 | HitterKind::AxisParallelLeftmost2 => {
            if let Some(i) = fam.iter().position(|s| !s.is_axis_parallel(fam.tol)) {
                Err(inapplicable(&format!("square {i} is rotated")))
            } else if mode == HitterKind::AxisParallelLeftmost2 && !same_side(fam) {
                Err(inapplicable("squares differ in side"))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

fn pick_pivot(fam: &SquareFamily, alive: &[usize], mode: HitterKind) -> usize {
    let sq = &fam.squares;
    let key = |i: usize| -> (f64, f64) {
        let s = &sq[i];
        match mode {
            HitterKind::SixPointLeftmost | HitterKind::AxisParallelLeftmost2 => (s.centre().x, s.centre().y),
            _ => (s.side(), s.centre().y),
        }
    };
    *alive
        .iter()
        .min_by(|&&a, &&b| {
            let (ka, kb) = (key(a), key(b));
            ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(a.cmp(&b))
        })
        .expect("alive is non-empty")
}

/// Repeatedly picks a pivot, emits its hitter, and removes every square the new points hit.
/// After each round no remaining square may meet the pivot.
pub fn hit_greedy(fam: &SquareFamily, mode: HitterKind) -> Result<HittingRun, ApproxError> {
    check_mode(fam, mode)?;
    let tol = fam.tol;
    let sq = &fam.squares;
    let mut alive: Vec<usize> = (0..sq.len()).collect();
    let mut run = HittingRun { points: Vec::new(), rounds: Vec::new(), per_round: mode.points_per_pivot() };
    while !alive.is_empty() {
        let pivot = pick_pivot(fam, &alive, mode);
        let p = &sq[pivot];
        let pts = hitter_points(mode, p, tol)?;
        let (removed, rest): (Vec<usize>, Vec<usize>) =
            alive.iter().partition(|&&i| pts.iter().any(|&q| contains_point(&sq[i], q, tol)));
        if let Some(&bad) = rest.iter().find(|&&i| squares_intersect(p, &sq[i], tol)) {
            return Err(ApproxError::GuaranteeViolated { round: run.rounds.len(), pivot, square: bad });
        }
        run.points.extend_from_slice(&pts);
        run.rounds.push(Round { pivot, kind: mode, points: pts, removed });
        alive = rest;
    }
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColouringRun {
    pub colour_of: Vec<usize>,
    /// Elimination order; colours are assigned in reverse.
    pub order: Vec<usize>,
    pub k_used: usize,
    /// Declared upper bound on `k_used`.
    pub bound: usize,
    /// For each square, its neighbours still present when it was eliminated.
    pub back_degree: Vec<usize>,
}

impl ColouringRun {
    pub fn is_proper(&self, fam: &SquareFamily) -> bool {
        let g = build_graph(fam);
        (0..g.n).all(|i| g.adj[i].iter().all(|&j| self.colour_of[i] != self.colour_of[j]))
    }
}

fn colour_by_order(g: &IntersectionGraph, order: Vec<usize>, bound: usize) -> ColouringRun {
    let n = g.n;
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let back_degree: Vec<usize> = (0..n).map(|v| g.adj[v].iter().filter(|&&w| pos[w] > pos[v]).count()).collect();
    let mut colour_of = vec![usize::MAX; n];
    for &v in order.iter().rev() {
        let mut used: Vec<bool> = vec![false; g.adj[v].len() + 1];
        for &w in &g.adj[v] {
            if let Some(u) = used.get_mut(colour_of[w]) {
                *u = true;
            }
        }
        colour_of[v] = used.iter().position(|&u| !u).expect("one slot is always free");
    }
    let k_used = colour_of.iter().map(|&c| c + 1).max().unwrap_or(0);
    ColouringRun { colour_of, order, k_used, bound, back_degree }
}

fn ply(fam: &SquareFamily) -> usize {
    max_degree_Delta(fam).map(|r| r.value).unwrap_or(0)
}

/// Same-side squares: eliminate the leftmost centre each step (ties by lower y, then index)
/// and colour greedily in reverse. Uses at most `6Δ` colours.
pub fn colour_unit_squares(fam: &SquareFamily) -> Result<ColouringRun, ApproxError> {
    if !same_side(fam) {
        return Err(ApproxError::NotUnitFamily);
    }
    let g = build_graph(fam);
    let mut order: Vec<usize> = (0..fam.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (fam.squares[a].centre(), fam.squares[b].centre());
        ca.x.total_cmp(&cb.x).then(ca.y.total_cmp(&cb.y)).then(a.cmp(&b))
    });
    let delta = ply(fam);
    let run = colour_by_order(&g, order, 6 * delta);
    debug_assert!(run.back_degree.iter().all(|&d| d + 1 <= 6 * delta));
    assert!(run.k_used <= run.bound, "unit colouring used {} > 6Δ = {}", run.k_used, run.bound);
    Ok(run)
}

/// Eliminate a minimum-degree square each step and colour greedily in reverse. Uses at most
/// `9(Δ − 1)` colours when `Δ ≥ 2`; a family with no intersecting pair gets one colour.
pub fn colour_squares(fam: &SquareFamily) -> ColouringRun {
    let g = build_graph(fam);
    let (_, order) = degeneracy_order(&g);
    let delta = ply(fam);
    let bound = if delta >= 2 { 9 * (delta - 1) } else { delta };
    let run = colour_by_order(&g, order, bound);
    assert!(run.k_used <= run.bound, "colouring used {} > 9(Δ-1) = {}", run.k_used, run.bound);
    run
}

fn degeneracy_order(g: &IntersectionGraph) -> (usize, Vec<usize>) {
    let n = g.n;
    let mut deg: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let mut gone = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut k = 0;
    for _ in 0..n {
        let v = (0..n).filter(|&i| !gone[i]).min_by_key(|&i| (deg[i], i)).expect("vertices remain");
        k = k.max(deg[v]);
        gone[v] = true;
        order.push(v);
        for &w in &g.adj[v] {
            if !gone[w] {
                deg[w] -= 1;
            }
        }
    }
    (k, order)
}

/// Degeneracy of the intersection graph, with a min-degree elimination order.
pub fn degeneracy(fam: &SquareFamily) -> (usize, Vec<usize>) {
    degeneracy_order(&build_graph(fam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Square;

    fn unit_row(n: usize, gap: f64) -> SquareFamily {
        (0..n).map(|i| Square::axis(Point::new(i as f64 * gap, 0.0), 1.0).unwrap()).collect()
    }

    #[test]
    fn disjoint_rounds() {
        let fam = unit_row(5, 2.0);
        let run = hit_greedy(&fam, HitterKind::SixPointLeftmost).unwrap();
        assert_eq!(run.rounds.len(), 5);
        assert!(fam.is_hit_by(&run.points));
        assert_eq!(colour_unit_squares(&fam).unwrap().k_used, 1);
        assert_eq!(degeneracy(&fam).0, 0);
    }

    #[test]
    fn overlapping_row() {
        let fam = unit_row(6, 0.6);
        for mode in HitterKind::ALL {
            let run = hit_greedy(&fam, mode).unwrap();
            assert!(fam.is_hit_by(&run.points), "{mode}");
            assert!(run.within_bound());
        }
        let c = colour_squares(&fam);
        assert!(c.is_proper(&fam));
        assert_eq!(c.k_used, 2);
        assert_eq!(degeneracy(&fam).0, 1);
    }

    #[test]
    fn mode_checks() {
        let mut fam = unit_row(2, 0.5);
        fam.squares.push(Square::new(Point::ORIGIN, 2.0, 0.3).unwrap());
        assert!(matches!(hit_greedy(&fam, HitterKind::SixPointLeftmost), Err(ApproxError::ModeInapplicable { .. })));
        assert!(matches!(hit_greedy(&fam, HitterKind::AxisParallel4), Err(ApproxError::ModeInapplicable { .. })));
        assert!(hit_greedy(&fam, HitterKind::TenPoint).is_ok());
        assert_eq!(colour_unit_squares(&fam), Err(ApproxError::NotUnitFamily));
    }
}

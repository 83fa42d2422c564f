//! Exact τ, ν, χ, ω and Δ for small families.
//!
//! Every non-empty intersection of closed squares is a convex polygon whose vertices are
//! square vertices or crossings of two boundaries, so the hitting-set search only ever needs
//! those points (plus centres, for isolated squares).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{boundary_intersections, contains_point, squares_intersect, Point, SquareFamily};

/// Hard ceiling: masks are `u128`.
pub const MAX_EXACT: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("instance has {n} squares, above the limit of {limit} (raise it explicitly to proceed)")]
    InstanceTooLarge { n: usize, limit: usize },
    #[error("family is empty")]
    EmptyFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverLimits {
    pub tau_chi: usize,
    pub nu_omega: usize,
    /// Stop after this many search nodes and report the incumbent as non-optimal.
    pub node_budget: Option<u64>,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits { tau_chi: 30, nu_omega: 40, node_budget: None }
    }
}

impl SolverLimits {
    /// Lifts both soft caps to the hard ceiling.
    pub fn unbounded() -> Self {
        SolverLimits { tau_chi: MAX_EXACT, nu_omega: MAX_EXACT, node_budget: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Witness {
    Points(Vec<Point>),
    Subfamily(Vec<usize>),
    Colouring(Vec<usize>),
    Point(Point),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub value: usize,
    pub witness: Witness,
    pub optimal: bool,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionGraph {
    pub n: usize,
    pub adj: Vec<Vec<usize>>,
}

impl IntersectionGraph {
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Open-neighbourhood bitmasks; only valid for `n <= 128`.
    pub fn masks(&self) -> Vec<u128> {
        assert!(self.n <= MAX_EXACT);
        self.adj
            .iter()
            .map(|row| row.iter().fold(0u128, |m, &j| m | 1 << j))
            .collect()
    }

    /// Connected components, each sorted, in order of their smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut k = 0;
            while k < comp.len() {
                for &j in &self.adj[comp[k]] {
                    if !seen[j] {
                        seen[j] = true;
                        comp.push(j);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

pub fn build_graph(fam: &SquareFamily) -> IntersectionGraph {
    let n = fam.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if squares_intersect(&fam.squares[i], &fam.squares[j], fam.tol) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for row in &mut adj {
        row.sort_unstable();
    }
    IntersectionGraph { n, adj }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub point: Point,
    /// Indices of the squares containing the point, ascending.
    pub cover: Vec<usize>,
}

impl Candidate {
    pub fn mask(&self) -> u128 {
        self.cover.iter().fold(0u128, |m, &i| m | 1 << i)
    }
}

/// Vertices, centres and pairwise boundary crossings, deduplicated, each with its coverage.
pub fn candidate_points(fam: &SquareFamily) -> Vec<Candidate> {
    let tol = fam.tol;
    let mut raw: Vec<Point> = Vec::new();
    for s in &fam.squares {
        raw.extend(s.vertices());
        raw.push(s.centre());
    }
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            raw.extend(boundary_intersections(&fam.squares[i], &fam.squares[j], tol));
        }
    }
    let mut pts: Vec<Point> = Vec::with_capacity(raw.len());
    for p in raw {
        if !pts.iter().any(|q| q.dist(p) <= tol.eps()) {
            pts.push(p);
        }
    }
    pts.into_iter()
        .map(|p| Candidate {
            point: p,
            cover: (0..fam.len())
                .filter(|&i| contains_point(&fam.squares[i], p, tol))
                .collect(),
        })
        .collect()
}

/// Distinct coverage masks that are not strictly contained in another, with a witness point each.
pub fn maximal_masks(fam: &SquareFamily) -> Vec<(u128, Point)> {
    assert!(fam.len() <= MAX_EXACT);
    let mut ms: Vec<(u128, Point)> = Vec::new();
    for c in candidate_points(fam) {
        let m = c.mask();
        if m != 0 && !ms.iter().any(|&(x, _)| x == m) {
            ms.push((m, c.point));
        }
    }
    let keep: Vec<bool> = ms
        .iter()
        .map(|&(m, _)| !ms.iter().any(|&(x, _)| x != m && x & m == m))
        .collect();
    let mut out: Vec<_> = ms.into_iter().zip(keep).filter(|&(_, k)| k).map(|(e, _)| e).collect();
    out.sort_by_key(|&(m, _)| std::cmp::Reverse(m.count_ones()));
    out
}

fn check_size(fam: &SquareFamily, limit: usize) -> Result<(), SolverError> {
    if fam.is_empty() {
        return Err(SolverError::EmptyFamily);
    }
    let limit = limit.min(MAX_EXACT);
    if fam.len() > limit {
        return Err(SolverError::InstanceTooLarge { n: fam.len(), limit });
    }
    Ok(())
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

fn component_mask(comp: &[usize]) -> u128 {
    comp.iter().fold(0u128, |m, &i| m | 1 << i)
}

struct CoverSearch<'a> {
    masks: &'a [u128],
    nbr: &'a [u128],
    /// For each square, indices into `masks` of the candidates covering it.
    by_square: Vec<Vec<usize>>,
    best: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl CoverSearch<'_> {
    fn lower_bound(&self, uncovered: u128) -> usize {
        let mut order: Vec<usize> = bits(uncovered).collect();
        order.sort_by_key(|&s| self.by_square[s].len());
        let mut blocked = 0u128;
        let mut packing = 0;
        for s in order {
            if blocked >> s & 1 == 0 {
                packing += 1;
                blocked |= self.nbr[s] | 1 << s;
            }
        }
        let widest = self
            .masks
            .iter()
            .map(|m| (m & uncovered).count_ones())
            .max()
            .unwrap_or(1)
            .max(1) as usize;
        let need = (uncovered.count_ones() as usize).div_ceil(widest);
        packing.max(need)
    }

    fn run(&mut self, uncovered: u128, chosen: &mut Vec<usize>) {
        if uncovered == 0 {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if let Some(b) = self.budget {
            if self.nodes >= b {
                self.exhausted = true;
                return;
            }
        }
        self.nodes += 1;
        if chosen.len() + self.lower_bound(uncovered) >= self.best.len() {
            return;
        }
        let pivot = bits(uncovered)
            .min_by_key(|&s| self.by_square[s].len())
            .expect("uncovered is non-empty");
        let mut options: Vec<(u128, usize)> = Vec::new();
        for &k in &self.by_square[pivot] {
            let r = self.masks[k] & uncovered;
            if !options.iter().any(|&(x, _)| x & r == r) {
                options.retain(|&(x, _)| x & r != x);
                options.push((r, k));
            }
        }
        options.sort_by_key(|&(r, _)| std::cmp::Reverse(r.count_ones()));
        for (r, k) in options {
            chosen.push(k);
            self.run(uncovered & !r, chosen);
            chosen.pop();
        }
    }
}

fn greedy_cover(masks: &[u128], universe: u128) -> Vec<usize> {
    let mut left = universe;
    let mut out = Vec::new();
    while left != 0 {
        let (k, _) = masks
            .iter()
            .enumerate()
            .max_by_key(|&(_, m)| (m & left).count_ones())
            .expect("every square has a candidate");
        out.push(k);
        left &= !masks[k];
    }
    out
}

/// Minimum hitting set.
pub fn exact_tau(fam: &SquareFamily) -> Result<ExactResult, SolverError> {
    exact_tau_with(fam, &SolverLimits::default())
}

pub fn exact_tau_with(fam: &SquareFamily, limits: &SolverLimits) -> Result<ExactResult, SolverError> {
    check_size(fam, limits.tau_chi)?;
    let all = maximal_masks(fam);
    let masks: Vec<u128> = all.iter().map(|&(m, _)| m).collect();
    let graph = build_graph(fam);
    let nbr = graph.masks();
    let mut points = Vec::new();
    let mut nodes = 0;
    let mut optimal = true;
    for comp in graph.components() {
        let cm = component_mask(&comp);
        let local: Vec<usize> = (0..masks.len()).filter(|&k| masks[k] & cm != 0).collect();
        let local_masks: Vec<u128> = local.iter().map(|&k| masks[k] & cm).collect();
        let mut by_square = vec![Vec::new(); fam.len()];
        for (k, &m) in local_masks.iter().enumerate() {
            for s in bits(m) {
                by_square[s].push(k);
            }
        }
        let mut search = CoverSearch {
            masks: &local_masks,
            nbr: &nbr,
            by_square,
            best: greedy_cover(&local_masks, cm),
            nodes: 0,
            budget: limits.node_budget.map(|b| b.saturating_sub(nodes)),
            exhausted: false,
        };
        search.run(cm, &mut Vec::new());
        nodes += search.nodes;
        optimal &= !search.exhausted;
        points.extend(search.best.iter().map(|&k| all[local[k]].1));
    }
    Ok(ExactResult { value: points.len(), witness: Witness::Points(points), optimal, nodes_explored: nodes })
}

/// Maximum clique on bitmask adjacency (greedy-colouring bound, Tomita-style ordering).
struct CliqueSearch<'a> {
    adj: &'a [u128],
    best: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl CliqueSearch<'_> {
    fn colour_order(&self, cand: u128) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut left = cand;
        let mut colour = 0;
        while left != 0 {
            colour += 1;
            let mut avail = left;
            while avail != 0 {
                let v = avail.trailing_zeros() as usize;
                avail &= !(1 << v) & !self.adj[v];
                left &= !(1u128 << v);
                out.push((v, colour));
            }
        }
        out
    }

    fn run(&mut self, clique: &mut Vec<usize>, mut cand: u128) {
        if let Some(b) = self.budget {
            if self.nodes >= b {
                self.exhausted = true;
                return;
            }
        }
        self.nodes += 1;
        if cand == 0 {
            if clique.len() > self.best.len() {
                self.best = clique.clone();
            }
            return;
        }
        let order = self.colour_order(cand);
        for &(v, c) in order.iter().rev() {
            if clique.len() + c <= self.best.len() {
                return;
            }
            clique.push(v);
            self.run(clique, cand & self.adj[v]);
            clique.pop();
            cand &= !(1u128 << v);
        }
    }
}

fn max_clique(adj: &[u128], universe: u128, budget: Option<u64>) -> (Vec<usize>, u64, bool) {
    let mut s = CliqueSearch { adj, best: Vec::new(), nodes: 0, budget, exhausted: false };
    s.run(&mut Vec::new(), universe);
    s.best.sort_unstable();
    (s.best, s.nodes, !s.exhausted)
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Maximum packing (pairwise disjoint subfamily).
pub fn exact_nu(fam: &SquareFamily) -> Result<ExactResult, SolverError> {
    exact_nu_with(fam, &SolverLimits::default())
}

pub fn exact_nu_with(fam: &SquareFamily, limits: &SolverLimits) -> Result<ExactResult, SolverError> {
    check_size(fam, limits.nu_omega)?;
    let n = fam.len();
    let g = build_graph(fam).masks();
    let comp: Vec<u128> = g.iter().enumerate().map(|(i, &m)| !m & !(1u128 << i) & full_mask(n)).collect();
    let (best, nodes, optimal) = max_clique(&comp, full_mask(n), limits.node_budget);
    Ok(ExactResult { value: best.len(), witness: Witness::Subfamily(best), optimal, nodes_explored: nodes })
}

/// Maximum pairwise intersecting subfamily.
pub fn exact_omega(fam: &SquareFamily) -> Result<ExactResult, SolverError> {
    exact_omega_with(fam, &SolverLimits::default())
}

pub fn exact_omega_with(fam: &SquareFamily, limits: &SolverLimits) -> Result<ExactResult, SolverError> {
    check_size(fam, limits.nu_omega)?;
    let g = build_graph(fam).masks();
    let (best, nodes, optimal) = max_clique(&g, full_mask(fam.len()), limits.node_budget);
    Ok(ExactResult { value: best.len(), witness: Witness::Subfamily(best), optimal, nodes_explored: nodes })
}

/// DSATUR colouring restricted to `verts`; returns colours indexed by vertex (others untouched).
pub fn dsatur(adj: &[Vec<usize>], verts: &[usize], colour: &mut [usize]) -> usize {
    const NONE: usize = usize::MAX;
    for &v in verts {
        colour[v] = NONE;
    }
    let mut used = 0;
    for _ in 0..verts.len() {
        let pick = verts
            .iter()
            .copied()
            .filter(|&v| colour[v] == NONE)
            .max_by_key(|&v| {
                let mut seen: Vec<usize> = adj[v].iter().map(|&u| colour[u]).filter(|&c| c != NONE).collect();
                seen.sort_unstable();
                seen.dedup();
                (seen.len(), adj[v].len(), std::cmp::Reverse(v))
            })
            .expect("uncoloured vertex remains");
        let mut c = 0;
        while adj[pick].iter().any(|&u| colour[u] == c) {
            c += 1;
        }
        colour[pick] = c;
        used = used.max(c + 1);
    }
    used
}

struct ColourSearch<'a> {
    adj: &'a [Vec<usize>],
    order: Vec<usize>,
    k: usize,
    colour: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl ColourSearch<'_> {
    fn run(&mut self, pos: usize, used: usize) -> bool {
        if pos == self.order.len() {
            return true;
        }
        if let Some(b) = self.budget {
            if self.nodes >= b {
                self.exhausted = true;
                return false;
            }
        }
        self.nodes += 1;
        let v = self.order[pos];
        for c in 0..(used + 1).min(self.k) {
            if self.adj[v].iter().any(|&u| self.colour[u] == c) {
                continue;
            }
            self.colour[v] = c;
            if self.run(pos + 1, used.max(c + 1)) {
                return true;
            }
            self.colour[v] = usize::MAX;
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

/// Minimum proper colouring.
pub fn exact_chi(fam: &SquareFamily) -> Result<ExactResult, SolverError> {
    exact_chi_with(fam, &SolverLimits::default())
}

pub fn exact_chi_with(fam: &SquareFamily, limits: &SolverLimits) -> Result<ExactResult, SolverError> {
    check_size(fam, limits.tau_chi)?;
    let graph = build_graph(fam);
    let bitadj = graph.masks();
    let mut colour = vec![usize::MAX; fam.len()];
    let mut value = 0;
    let mut nodes = 0;
    let mut optimal = true;
    for comp in graph.components() {
        let (clique, cn, _) = max_clique(&bitadj, component_mask(&comp), None);
        nodes += cn;
        let ub = dsatur(&graph.adj, &comp, &mut colour);
        let mut best = ub;
        // Clique members first fixes the symmetric prefix; the rest follow DSATUR's order.
        let mut order = clique.clone();
        let mut rest: Vec<usize> = comp.iter().copied().filter(|v| !clique.contains(v)).collect();
        rest.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
        order.extend(rest);
        for k in clique.len()..ub {
            let mut s = ColourSearch {
                adj: &graph.adj,
                order: order.clone(),
                k,
                colour: vec![usize::MAX; fam.len()],
                nodes: 0,
                budget: limits.node_budget,
                exhausted: false,
            };
            for (i, &v) in clique.iter().enumerate() {
                s.colour[v] = i;
            }
            let found = s.run(clique.len(), clique.len());
            nodes += s.nodes;
            if found {
                for &v in &comp {
                    colour[v] = s.colour[v];
                }
                best = k;
                break;
            }
            if s.exhausted {
                optimal = false;
                break;
            }
        }
        value = value.max(best);
    }
    Ok(ExactResult { value, witness: Witness::Colouring(colour), optimal, nodes_explored: nodes })
}

/// Largest number of squares sharing a point.
#[allow(non_snake_case)]
pub fn max_degree_Delta(fam: &SquareFamily) -> Result<ExactResult, SolverError> {
    if fam.is_empty() {
        return Err(SolverError::EmptyFamily);
    }
    let cands = candidate_points(fam);
    let best = cands
        .iter()
        .max_by_key(|c| c.cover.len())
        .expect("a non-empty family has candidates");
    Ok(ExactResult {
        value: best.cover.len(),
        witness: Witness::Point(best.point),
        optimal: true,
        nodes_explored: cands.len() as u64,
    })
}

/// Re-checks a witness against the family with the geometric predicates.
pub fn validate_witness(fam: &SquareFamily, param: Param, res: &ExactResult) -> bool {
    let tol = fam.tol;
    let sq = &fam.squares;
    match (&res.witness, param) {
        (Witness::Points(p), Param::Tau) => p.len() == res.value && fam.is_hit_by(p),
        (Witness::Subfamily(s), Param::Nu) => {
            s.len() == res.value
                && s.iter().enumerate().all(|(a, &i)| {
                    s[a + 1..].iter().all(|&j| !squares_intersect(&sq[i], &sq[j], tol))
                })
        }
        (Witness::Subfamily(s), Param::Omega) => {
            s.len() == res.value
                && s.iter().enumerate().all(|(a, &i)| {
                    s[a + 1..].iter().all(|&j| squares_intersect(&sq[i], &sq[j], tol))
                })
        }
        (Witness::Colouring(c), Param::Chi) => {
            c.len() == sq.len()
                && c.iter().all(|&x| x < res.value)
                && (0..sq.len()).all(|i| {
                    (i + 1..sq.len()).all(|j| c[i] != c[j] || !squares_intersect(&sq[i], &sq[j], tol))
                })
        }
        (Witness::Point(p), Param::Delta) => {
            sq.iter().filter(|s| contains_point(s, *p, tol)).count() == res.value
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Tau,
    Nu,
    Chi,
    Omega,
    Delta,
}

impl std::str::FromStr for Param {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tau" => Ok(Param::Tau),
            "nu" => Ok(Param::Nu),
            "chi" => Ok(Param::Chi),
            "omega" => Ok(Param::Omega),
            "delta" => Ok(Param::Delta),
            other => Err(format!("unknown parameter '{other}' (expected tau, nu, chi, omega or delta)")),
        }
    }
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Param::Tau => "tau",
            Param::Nu => "nu",
            Param::Chi => "chi",
            Param::Omega => "omega",
            Param::Delta => "delta",
        })
    }
}

pub fn solve(fam: &SquareFamily, param: Param, limits: &SolverLimits) -> Result<ExactResult, SolverError> {
    match param {
        Param::Tau => exact_tau_with(fam, limits),
        Param::Nu => exact_nu_with(fam, limits),
        Param::Chi => exact_chi_with(fam, limits),
        Param::Omega => exact_omega_with(fam, limits),
        Param::Delta => max_degree_Delta(fam),
    }
}

//! Expectation thresholds: `q(F)` from integer covers and `q_f(F)` from
//! fractional covers.
//!
//! A cover only has to handle the minimal edges (`F ⊆ ⟨G⟩` iff every minimal
//! edge contains a member of `G`), and a member `S` not inside any minimal
//! edge covers nothing, so both problems are posed over the sub-edge
//! lattice. For the integer problem a further reduction is exact: replacing
//! `S` by the intersection of all minimal edges containing it covers the
//! same edges at no larger cost, so branch-and-bound only considers such
//! closed sets.

use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, invalid, Error, Result};
use crate::family::{GroundSet, IncreasingFamily, Subset};
use crate::numeric::compensated_sum;
use crate::simplex::{rational_from_f64, rational_pow, solve_packing, Scalar};
use crate::thresholds::{bisect, Method, ThresholdResult};

pub const DEFAULT_COVER_TOL: f64 = 1e-6;
/// Bound on `Σ_e 2^{|e|}` for lattice construction.
pub const MAX_LATTICE_WORK: u64 = 1_000_000;
/// Lattices up to this size are solved in exact rational arithmetic.
pub const MAX_EXACT_LP_CANDIDATES: usize = 200;
/// Dense tableau guard (rows × columns).
pub const MAX_TABLEAU_ENTRIES: usize = 20_000_000;
pub const EXHAUSTIVE_COVER_CANDIDATES: usize = 12;
/// Integer covers track covered edges in a 128-bit mask.
pub const MAX_COVER_EDGES: usize = 128;
pub const CERTIFICATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMode {
    Integer,
    Fractional,
}

/// Weighted cover `G`; binary weights in integer mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSolution {
    pub mode: CoverMode,
    pub p: f64,
    pub cost: f64,
    pub support: Vec<(Subset, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledWeight {
    pub set: Vec<String>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledCover {
    pub mode: CoverMode,
    pub p: f64,
    pub cost: f64,
    pub support: Vec<LabeledWeight>,
}

impl CoverSolution {
    fn new(mode: CoverMode, p: f64, support: Vec<(Subset, f64)>) -> Self {
        let cost = cover_cost(&support, p);
        Self { mode, p, cost, support }
    }

    /// Checks the cover invariants against `f`: every minimal edge covered
    /// (integer mode) or fractionally covered to `1 - 1e-9`, and the stored
    /// cost reproducible from the support.
    pub fn verify(&self, f: &IncreasingFamily) -> Result<()> {
        for &(s, w) in &self.support {
            f.ground().check(s)?;
            if w < 0.0 {
                return invalid(format!("negative weight {w} on {s:?}"));
            }
            if self.mode == CoverMode::Integer && w != 1.0 {
                return invalid(format!("integer cover has weight {w}"));
            }
        }
        for &t in f.minimal_edges() {
            let mass: f64 = self.support.iter().filter(|(s, _)| s.is_subset_of(t)).map(|&(_, w)| w).sum();
            let ok = match self.mode {
                CoverMode::Integer => mass >= 1.0,
                CoverMode::Fractional => mass >= 1.0 - CERTIFICATE_TOL,
            };
            if !ok {
                return invalid(format!("edge {t:?} covered with mass {mass}"));
            }
        }
        if (cover_cost(&self.support, self.p) - self.cost).abs() > CERTIFICATE_TOL {
            return Err(Error::Numerical("cover cost does not match its support".into()));
        }
        Ok(())
    }

    pub fn labeled(&self, ground: &GroundSet) -> LabeledCover {
        LabeledCover {
            mode: self.mode,
            p: self.p,
            cost: self.cost,
            support: self
                .support
                .iter()
                .map(|&(s, w)| LabeledWeight {
                    set: ground.labels_of(s),
                    weight: w,
                })
                .collect(),
        }
    }

    pub fn to_json(&self, ground: &GroundSet) -> String {
        serde_json::to_string_pretty(&self.labeled(ground)).expect("cover serializes")
    }
}

fn cover_cost(support: &[(Subset, f64)], p: f64) -> f64 {
    compensated_sum(support.iter().map(|&(s, w)| w * p.powi(s.len() as i32)))
}

fn require_nontrivial(f: &IncreasingFamily) -> Result<()> {
    if f.is_empty() {
        return domain("the empty family is p-small for every p");
    }
    if f.is_full() {
        return domain("the family 2^X is never p-small");
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("p = {p} must lie in (0, 1)"));
    }
    Ok(())
}

/// All `S` contained in some minimal edge, including `∅`, sorted.
pub fn candidate_lattice(f: &IncreasingFamily) -> Result<Vec<Subset>> {
    let mut work: u64 = 0;
    for e in f.minimal_edges() {
        work = work.saturating_add(1u64.checked_shl(e.len() as u32).unwrap_or(u64::MAX));
    }
    if work > MAX_LATTICE_WORK {
        return capacity(format!("sub-edge lattice work {work} exceeds {MAX_LATTICE_WORK}"));
    }
    let mut all = BTreeSet::new();
    for e in f.minimal_edges() {
        all.extend(e.subsets());
    }
    Ok(all.into_iter().collect())
}

/// Optimal fractional cover with the packing solution that certifies it.
#[derive(Debug, Clone)]
pub struct LpCover {
    pub cover: CoverSolution,
    /// `y_T` per minimal edge.
    pub duals: Vec<(Subset, f64)>,
    pub exact: bool,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualCheck {
    pub nonnegative: bool,
    /// `max_S (Σ_{T ⊇ S} y_T - p^{|S|})` over the lattice.
    pub max_violation: f64,
    pub dual_objective: f64,
    pub objective_gap: f64,
}

impl DualCheck {
    pub fn passes(&self) -> bool {
        self.nonnegative && self.max_violation <= CERTIFICATE_TOL && self.objective_gap <= CERTIFICATE_TOL
    }
}

impl LpCover {
    /// Recomputes dual feasibility and objective agreement from scratch.
    pub fn check_certificate(&self, f: &IncreasingFamily) -> Result<DualCheck> {
        let lattice = candidate_lattice(f)?;
        let p = self.cover.p;
        let nonnegative = self.duals.iter().all(|&(_, y)| y >= 0.0);
        let mut max_violation = f64::NEG_INFINITY;
        for s in lattice {
            let load: f64 = self.duals.iter().filter(|(t, _)| s.is_subset_of(*t)).map(|&(_, y)| y).sum();
            max_violation = max_violation.max(load - p.powi(s.len() as i32));
        }
        let dual_objective = compensated_sum(self.duals.iter().map(|&(_, y)| y));
        Ok(DualCheck {
            nonnegative,
            max_violation,
            dual_objective,
            objective_gap: (dual_objective - self.cover.cost).abs(),
        })
    }
}

struct CoverProgram {
    lattice: Vec<Subset>,
    /// For each candidate, the indices of minimal edges containing it.
    rows: Vec<Vec<usize>>,
}

impl CoverProgram {
    fn new(f: &IncreasingFamily) -> Result<Self> {
        let lattice = candidate_lattice(f)?;
        let edges = f.minimal_edges();
        if lattice.len().saturating_mul(lattice.len() + edges.len()) > MAX_TABLEAU_ENTRIES {
            return capacity(format!("LP with {} candidates exceeds the tableau guard", lattice.len()));
        }
        let rows = lattice
            .iter()
            .map(|s| (0..edges.len()).filter(|&t| s.is_subset_of(edges[t])).collect())
            .collect();
        Ok(Self { lattice, rows })
    }

    fn max_pivots(&self) -> usize {
        200 * (self.lattice.len() + self.rows.len()) + 10_000
    }
}

/// Minimum of `Σ g(S) p^{|S|}` over fractional covers.
pub fn lp_min_cover(f: &IncreasingFamily, p: f64) -> Result<LpCover> {
    require_nontrivial(f)?;
    check_p(p)?;
    let prog = CoverProgram::new(f)?;
    let edges = f.minimal_edges();
    let exact = prog.lattice.len() <= MAX_EXACT_LP_CANDIDATES;
    let (y, g, pivots): (Vec<f64>, Vec<f64>, usize) = if exact {
        let pr = rational_from_f64(p)?;
        let costs: Vec<BigRational> = prog.lattice.iter().map(|s| rational_pow(&pr, s.len())).collect();
        let sol = solve_packing(&prog.rows, &costs, edges.len(), prog.max_pivots())?;
        (
            sol.y.iter().map(Scalar::to_f64).collect(),
            sol.g.iter().map(Scalar::to_f64).collect(),
            sol.pivots,
        )
    } else {
        let costs: Vec<f64> = prog.lattice.iter().map(|s| p.powi(s.len() as i32)).collect();
        let sol = solve_packing(&prog.rows, &costs, edges.len(), prog.max_pivots())?;
        (sol.y, sol.g.iter().map(|&v| v.max(0.0)).collect(), sol.pivots)
    };
    let support: Vec<(Subset, f64)> = prog
        .lattice
        .iter()
        .zip(&g)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&s, &w)| (s, w))
        .collect();
    Ok(LpCover {
        cover: CoverSolution::new(CoverMode::Fractional, p, support),
        duals: edges.iter().copied().zip(y).collect(),
        exact,
        pivots,
    })
}

pub fn lp_min_cover_cost(f: &IncreasingFamily, p: f64) -> Result<(f64, CoverSolution)> {
    let lp = lp_min_cover(f, p)?;
    Ok((lp.cover.cost, lp.cover))
}

/// Minimum of `Σ_{S∈G} p^{|S|}` over covers `G` of the minimal edges.
pub fn min_cover_cost_integer(f: &IncreasingFamily, p: f64) -> Result<(f64, CoverSolution)> {
    require_nontrivial(f)?;
    check_p(p)?;
    let lattice = candidate_lattice(f)?;
    let support = if lattice.len() <= EXHAUSTIVE_COVER_CANDIDATES {
        exhaustive_cover(f, &lattice, p)
    } else {
        BranchAndBound::new(f, &lattice, p)?.solve()?
    };
    let sol = CoverSolution::new(CoverMode::Integer, p, support.into_iter().map(|s| (s, 1.0)).collect());
    Ok((sol.cost, sol))
}

/// Tries every subfamily of the candidates.
pub fn exhaustive_cover(f: &IncreasingFamily, candidates: &[Subset], p: f64) -> Vec<Subset> {
    assert!(candidates.len() < 32, "exhaustive cover over too many candidates");
    let covers = |g: &[Subset]| f.minimal_edges().iter().all(|t| g.iter().any(|s| s.is_subset_of(*t)));
    let mut best: Option<(f64, Vec<Subset>)> = None;
    for mask in 0u32..(1 << candidates.len()) {
        let g: Vec<Subset> = (0..candidates.len()).filter(|&i| mask >> i & 1 == 1).map(|i| candidates[i]).collect();
        if !covers(&g) {
            continue;
        }
        let cost = compensated_sum(g.iter().map(|s| p.powi(s.len() as i32)));
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, g));
        }
    }
    best.expect("the minimal edges themselves form a cover").1
}

struct BranchAndBound<'a> {
    edges: &'a [Subset],
    /// Closed candidates with cost and covered-edge mask, cheapest first.
    cands: Vec<(Subset, f64, u128)>,
    all: u128,
    best_cost: f64,
    best: Vec<usize>,
    nodes: usize,
}

const MAX_BB_NODES: usize = 5_000_000;

impl<'a> BranchAndBound<'a> {
    fn new(f: &'a IncreasingFamily, lattice: &[Subset], p: f64) -> Result<Self> {
        let edges = f.minimal_edges();
        if edges.len() > MAX_COVER_EDGES {
            return capacity(format!("integer covers limited to {MAX_COVER_EDGES} minimal edges"));
        }
        let mut closed = BTreeSet::new();
        for &s in lattice {
            let closure = edges
                .iter()
                .filter(|t| s.is_subset_of(**t))
                .fold(None, |acc: Option<Subset>, t| Some(acc.map_or(*t, |a| a.intersection(*t))))
                .expect("lattice members lie in an edge");
            closed.insert(closure);
        }
        let mut cands: Vec<(Subset, f64, u128)> = closed
            .into_iter()
            .map(|s| {
                let mask = (0..edges.len())
                    .filter(|&t| s.is_subset_of(edges[t]))
                    .fold(0u128, |m, t| m | 1 << t);
                (s, p.powi(s.len() as i32), mask)
            })
            .collect();
        cands.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let all = if edges.len() == 128 { u128::MAX } else { (1u128 << edges.len()) - 1 };
        Ok(Self {
            edges,
            cands,
            all,
            best_cost: f64::INFINITY,
            best: Vec::new(),
            nodes: 0,
        })
    }

    fn solve(mut self) -> Result<Vec<Subset>> {
        let greedy = self.greedy();
        self.best_cost = greedy.iter().map(|&i| self.cands[i].1).sum();
        self.best = greedy;
        let mut excluded = vec![false; self.cands.len()];
        let mut chosen = Vec::new();
        self.branch(0, 0.0, &mut excluded, &mut chosen)?;
        Ok(self.best.iter().map(|&i| self.cands[i].0).collect())
    }

    fn greedy(&self) -> Vec<usize> {
        let mut covered = 0u128;
        let mut picked = Vec::new();
        while covered != self.all {
            let (i, _) = self
                .cands
                .iter()
                .enumerate()
                .filter(|(_, c)| c.2 & !covered != 0)
                .map(|(i, c)| (i, c.1 / (c.2 & !covered).count_ones() as f64))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("every edge is its own candidate");
            covered |= self.cands[i].2;
            picked.push(i);
        }
        picked
    }

    fn branch(&mut self, covered: u128, cost: f64, excluded: &mut [bool], chosen: &mut Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > MAX_BB_NODES {
            return capacity("branch-and-bound node limit reached");
        }
        if covered == self.all {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = chosen.clone();
            }
            return Ok(());
        }
        // edge with the fewest available candidates
        let mut pick: Option<(usize, Vec<usize>)> = None;
        for t in 0..self.edges.len() {
            if covered >> t & 1 == 1 {
                continue;
            }
            let avail: Vec<usize> = (0..self.cands.len())
                .filter(|&i| !excluded[i] && self.cands[i].2 >> t & 1 == 1)
                .collect();
            if avail.is_empty() {
                return Ok(());
            }
            if pick.as_ref().is_none_or(|(_, a)| avail.len() < a.len()) {
                pick = Some((t, avail));
            }
        }
        let (_, options) = pick.expect("some edge is uncovered");
        if cost + self.lower_bound(covered, excluded)? >= self.best_cost - 1e-12 {
            return Ok(());
        }
        let mut newly_excluded = Vec::new();
        for i in options {
            chosen.push(i);
            let c = self.cands[i].1;
            self.branch(covered | self.cands[i].2, cost + c, excluded, chosen)?;
            chosen.pop();
            excluded[i] = true;
            newly_excluded.push(i);
        }
        for i in newly_excluded {
            excluded[i] = false;
        }
        Ok(())
    }

    /// Fractional cover value of the residual problem, less a safety margin.
    fn lower_bound(&self, covered: u128, excluded: &[bool]) -> Result<f64> {
        let open: Vec<usize> = (0..self.edges.len()).filter(|&t| covered >> t & 1 == 0).collect();
        let mut rows = Vec::new();
        let mut costs = Vec::new();
        for (i, c) in self.cands.iter().enumerate() {
            if excluded[i] || c.2 & !covered == 0 {
                continue;
            }
            rows.push(open.iter().enumerate().filter(|(_, &t)| c.2 >> t & 1 == 1).map(|(j, _)| j).collect());
            costs.push(c.1);
        }
        if open.len() == 1 {
            return Ok(costs.iter().copied().fold(f64::INFINITY, f64::min));
        }
        let sol = solve_packing(&rows, &costs, open.len(), 100_000)?;
        Ok(sol.objective - 1e-9)
    }
}

fn cover_threshold<C>(f: &IncreasingFamily, tol: f64, method: Method, cost: C) -> Result<ThresholdResult>
where
    C: Fn(&IncreasingFamily, f64) -> Result<f64>,
{
    require_nontrivial(f)?;
    candidate_lattice(f)?;
    bisect(|p| Ok(cost(f, p)? > 0.5), tol, method)
}

/// Largest `p` at which `F` is `p`-small.
pub fn solve_q(f: &IncreasingFamily, tol: f64) -> Result<ThresholdResult> {
    cover_threshold(f, tol, Method::IntegerCover, |f, p| Ok(min_cover_cost_integer(f, p)?.0))
}

/// Largest `p` at which `F` is weakly `p`-small.
pub fn solve_qf(f: &IncreasingFamily, tol: f64) -> Result<ThresholdResult> {
    cover_threshold(f, tol, Method::FractionalCover, |f, p| Ok(lp_min_cover(f, p)?.cover.cost))
}

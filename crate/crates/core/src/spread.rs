//! Spread certification for multi-hypergraphs.
//!
//! Only sets inside some edge matter: any other `S` has `|H ∩ ⟨S⟩| = 0`,
//! so every check runs over the sub-edge lattice, read off a table of
//! degrees `d(S) = Σ_{E ⊇ S} m(E)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, invalid, precondition, Result};
use crate::family::{GroundSet, MultiHypergraph, Subset};
use crate::numeric::{binomial, le_rel};

/// Bound on lattice construction work, `Σ_E Σ_{i ≤ depth} C(|E|, i)`.
pub const MAX_LATTICE_WORK: u64 = 10_000_000;
pub const SPREAD_REL_TOL: f64 = 1e-12;

/// Multiplicity-weighted degrees of all sets of size at most `max_size`
/// inside some edge.
#[derive(Debug, Clone)]
pub struct DegreeTable {
    total: u64,
    max_size: usize,
    degrees: HashMap<Subset, u64>,
}

impl DegreeTable {
    pub fn new(h: &MultiHypergraph) -> Result<Self> {
        Self::up_to(h, h.rank())
    }

    pub fn up_to(h: &MultiHypergraph, max_size: usize) -> Result<Self> {
        let mut work: u64 = 0;
        for &(e, _) in h.edges() {
            let t = e.len() as u64;
            for i in 0..=(max_size as u64).min(t) {
                work = work.saturating_add(binomial(t, i).min(u64::MAX as u128) as u64);
            }
        }
        if work > MAX_LATTICE_WORK {
            return capacity(format!("degree table work {work} exceeds {MAX_LATTICE_WORK}"));
        }
        let mut degrees: HashMap<Subset, u64> = HashMap::new();
        for &(e, m) in h.edges() {
            if max_size >= e.len() {
                for s in e.subsets() {
                    *degrees.entry(s).or_insert(0) += m;
                }
            } else {
                push_small_subsets(e, max_size, m, &mut degrees);
            }
        }
        Ok(Self {
            total: h.size(),
            max_size,
            degrees,
        })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// `d(S)`; zero for sets outside the lattice. `S` must not exceed the
    /// table's size bound.
    pub fn degree(&self, s: Subset) -> u64 {
        debug_assert!(s.len() <= self.max_size);
        self.degrees.get(&s).copied().unwrap_or(0)
    }

    /// Lattice members in canonical order.
    pub fn sets(&self) -> Vec<Subset> {
        let mut v: Vec<Subset> = self.degrees.keys().copied().collect();
        v.sort();
        v
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}

fn push_small_subsets(e: Subset, max_size: usize, m: u64, out: &mut HashMap<Subset, u64>) {
    let elems: Vec<usize> = e.iter().collect();
    fn walk(elems: &[usize], start: usize, cur: Subset, left: usize, m: u64, out: &mut HashMap<Subset, u64>) {
        *out.entry(cur).or_insert(0) += m;
        if left == 0 {
            return;
        }
        for i in start..elems.len() {
            let mut next = cur;
            next.insert(elems[i]);
            walk(elems, i + 1, next, left - 1, m, out);
        }
    }
    walk(&elems, 0, Subset::EMPTY, max_size, m, out);
}

fn require_nonempty(h: &MultiHypergraph) -> Result<()> {
    if h.is_empty() {
        return domain("spread is undefined for an empty hypergraph");
    }
    Ok(())
}

/// `κ* = min_S (|H| / d(S))^{1/|S|}` with the minimizing `S`; the triple
/// `(total, degree, size)` gives `κ*` exactly as `(total/degree)^{1/size}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadOptimum {
    pub kappa: f64,
    pub witness: Subset,
    pub total: u64,
    pub degree: u64,
    pub size: usize,
}

pub fn optimal_spread(h: &MultiHypergraph) -> Result<SpreadOptimum> {
    require_nonempty(h)?;
    let table = DegreeTable::new(h)?;
    Ok(optimal_spread_from(&table))
}

pub fn optimal_spread_from(table: &DegreeTable) -> SpreadOptimum {
    let total = table.total();
    let mut best = SpreadOptimum {
        kappa: f64::INFINITY,
        witness: Subset::EMPTY,
        total,
        degree: total,
        size: 0,
    };
    for s in table.sets() {
        if s.is_empty() {
            continue;
        }
        let d = table.degree(s);
        let kappa = (total as f64 / d as f64).powf(1.0 / s.len() as f64);
        if kappa < best.kappa {
            best = SpreadOptimum {
                kappa,
                witness: s,
                total,
                degree: d,
                size: s.len(),
            };
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadCheck {
    pub holds: bool,
    /// Largest `observed / allowed` over the lattice.
    pub worst_ratio: f64,
    /// The set attaining the worst ratio when the check fails.
    pub witness: Option<Subset>,
}

/// Whether `d(S) ≤ κ^{-|S|} |H|` for every nonempty `S`.
pub fn check_spread(h: &MultiHypergraph, kappa: f64) -> Result<SpreadCheck> {
    require_nonempty(h)?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return invalid(format!("κ = {kappa} must be positive and finite"));
    }
    let table = DegreeTable::new(h)?;
    Ok(check_spread_from(&table, kappa))
}

pub fn check_spread_from(table: &DegreeTable, kappa: f64) -> SpreadCheck {
    let total = table.total() as f64;
    let mut worst = 0.0f64;
    let mut witness = None;
    for s in table.sets() {
        if s.is_empty() {
            continue;
        }
        let ratio = table.degree(s) as f64 * kappa.powi(s.len() as i32) / total;
        if ratio > worst {
            worst = ratio;
            witness = Some(s);
        }
    }
    let holds = worst <= 1.0 + SPREAD_REL_TOL;
    SpreadCheck {
        holds,
        worst_ratio: worst,
        witness: if holds { None } else { witness },
    }
}

/// A probability measure supported on finitely many sets.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHypergraph {
    ground: GroundSet,
    edges: Vec<(Subset, f64)>,
}

impl WeightedHypergraph {
    pub fn new(ground: GroundSet, edges: Vec<(Subset, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for &(e, w) in &edges {
            ground.check(e)?;
            if !(w >= 0.0 && w.is_finite()) {
                return invalid(format!("weight {w} is not a nonnegative number"));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return invalid(format!("weights sum to {total}, not 1"));
        }
        Ok(Self { ground, edges })
    }

    /// The uniform measure on the edges of `h`, counting multiplicity.
    pub fn uniform(h: &MultiHypergraph) -> Result<Self> {
        require_nonempty(h)?;
        let total = h.size() as f64;
        Self::new(h.ground().clone(), h.edges().iter().map(|&(e, m)| (e, m as f64 / total)).collect())
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn edges(&self) -> &[(Subset, f64)] {
        &self.edges
    }
}

/// Whether `ν(⟨S⟩) ≤ q^{|S|}` for every nonempty `S`.
pub fn measure_spread(nu: &WeightedHypergraph, q: f64) -> Result<SpreadCheck> {
    if !(q > 0.0 && q <= 1.0) {
        return invalid(format!("q = {q} must lie in (0, 1]"));
    }
    let mut mass: HashMap<Subset, f64> = HashMap::new();
    let mut work: u64 = 0;
    for &(e, w) in nu.edges() {
        work = work.saturating_add(1u64.checked_shl(e.len() as u32).unwrap_or(u64::MAX));
        if work > MAX_LATTICE_WORK {
            return capacity("support lattice too large");
        }
        for s in e.subsets() {
            *mass.entry(s).or_insert(0.0) += w;
        }
    }
    let mut sets: Vec<Subset> = mass.keys().copied().filter(|s| !s.is_empty()).collect();
    sets.sort();
    let mut worst = 0.0f64;
    let mut witness = None;
    for s in sets {
        let ratio = mass[&s] / q.powi(s.len() as i32);
        if ratio > worst {
            worst = ratio;
            witness = Some(s);
        }
    }
    let holds = worst <= 1.0 + SPREAD_REL_TOL;
    Ok(SpreadCheck {
        holds,
        worst_ratio: worst,
        witness: if holds { None } else { witness },
    })
}

/// `(q; r_1 > ... > r_λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadProfile {
    q: f64,
    radii: Vec<usize>,
}

impl SpreadProfile {
    pub fn new(q: f64, radii: Vec<usize>) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return invalid(format!("q = {q} must lie in (0, 1]"));
        }
        if radii.is_empty() || radii.contains(&0) {
            return invalid("radii must be a nonempty list of positive integers");
        }
        if radii.windows(2).any(|w| w[0] <= w[1]) {
            return invalid("radii must be strictly decreasing");
        }
        Ok(Self { q, radii })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn radii(&self) -> &[usize] {
        &self.radii
    }

    pub fn lambda(&self) -> usize {
        self.radii.len()
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(q, self.radii.clone())
    }

    /// Smallest `j` constrained for sets of size `a`: the least `r_{i+1}`
    /// over the ranges `r_i ≥ a ≥ r_{i+1}`; `None` when no range applies.
    pub fn min_j(&self, a: usize) -> Option<usize> {
        self.radii
            .windows(2)
            .filter(|w| w[0] >= a && a >= w[1])
            .map(|w| w[1])
            .min()
    }
}

/// `M_0(A), ..., M_{|A|}(A)` by scanning the edges.
pub fn intersection_profile(h: &MultiHypergraph, a: Subset) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + 1];
    for &(e, m) in h.edges() {
        out[e.intersection(a).len()] += m;
    }
    out
}

/// `M_j(A)` from degrees by inclusion–exclusion:
/// `M_j = Σ_{C ⊆ A} (-1)^{|C|-j} C(|C|, j) d(C)`.
pub fn intersection_profile_from(table: &DegreeTable, a: Subset) -> Vec<u64> {
    let n = a.len();
    assert!(n <= table.max_size(), "set larger than the degree table bound");
    let mut layer = vec![0i128; n + 1];
    for c in a.subsets() {
        layer[c.len()] += table.degree(c) as i128;
    }
    (0..=n)
        .map(|j| {
            let v: i128 = (j..=n)
                .map(|c| {
                    let t = binomial(c as u64, j as u64) as i128 * layer[c];
                    if (c - j) % 2 == 0 {
                        t
                    } else {
                        -t
                    }
                })
                .sum();
            u64::try_from(v).expect("intersection counts are nonnegative")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiroWitness {
    pub set: Subset,
    pub j: usize,
    pub count: u64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiroCheck {
    pub holds: bool,
    pub worst_ratio: f64,
    pub witness: Option<SpiroWitness>,
    pub sets_checked: usize,
}

fn spiro_bounds(h: &MultiHypergraph, profile: &SpreadProfile, max_set: Option<usize>) -> Result<usize> {
    require_nonempty(h)?;
    let r1 = profile.radii()[0];
    if h.rank() > r1 {
        return precondition(format!("hypergraph has rank {} but the profile needs it {r1}-bounded", h.rank()));
    }
    Ok(max_set.map_or(r1, |m| m.min(r1)))
}

/// Whether `M_j(A) ≤ q^j |H|` for every `A` inside an edge with
/// `r_i ≥ |A| ≥ r_{i+1}` and every `j ≥ r_{i+1}`. `max_set` caps `|A|`.
pub fn check_spiro(h: &MultiHypergraph, profile: &SpreadProfile, max_set: Option<usize>) -> Result<SpiroCheck> {
    let cap = spiro_bounds(h, profile, max_set)?;
    let table = DegreeTable::up_to(h, cap)?;
    Ok(check_spiro_from(&table, profile, cap))
}

pub fn check_spiro_from(table: &DegreeTable, profile: &SpreadProfile, max_set: usize) -> SpiroCheck {
    let total = table.total() as f64;
    let mut worst = 0.0f64;
    let mut witness: Option<SpiroWitness> = None;
    let mut checked = 0;
    for a in table.sets() {
        if a.len() > max_set {
            continue;
        }
        let Some(j0) = profile.min_j(a.len()) else {
            continue;
        };
        checked += 1;
        let m = intersection_profile_from(table, a);
        for (j, &count) in m.iter().enumerate().skip(j0) {
            let bound = profile.q().powi(j as i32) * total;
            let ratio = count as f64 / bound;
            if ratio > worst {
                worst = ratio;
                if !le_rel(count as f64, bound, SPREAD_REL_TOL) {
                    witness = Some(SpiroWitness { set: a, j, count, bound });
                }
            }
        }
    }
    let holds = worst <= 1.0 + SPREAD_REL_TOL;
    SpiroCheck {
        holds,
        worst_ratio: worst,
        witness: if holds { None } else { witness },
        sets_checked: checked,
    }
}

/// Smallest `q` for which `check_spiro` passes with the given radii;
/// `0.0` when the radii leave nothing to check.
pub fn optimal_spiro_q(h: &MultiHypergraph, radii: &[usize], max_set: Option<usize>) -> Result<f64> {
    let profile = SpreadProfile::new(1.0, radii.to_vec())?;
    let cap = spiro_bounds(h, &profile, max_set)?;
    let table = DegreeTable::up_to(h, cap)?;
    let total = table.total() as f64;
    let mut q = 0.0f64;
    for a in table.sets() {
        let Some(j0) = profile.min_j(a.len()) else {
            continue;
        };
        if a.len() > cap {
            continue;
        }
        let m = intersection_profile_from(&table, a);
        for (j, &count) in m.iter().enumerate().skip(j0.max(1)) {
            if count > 0 {
                q = q.max((count as f64 / total).powf(1.0 / j as f64));
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyper(n: usize, edges: &[(&[usize], u64)]) -> MultiHypergraph {
        let g = GroundSet::alphabetic(n).unwrap();
        MultiHypergraph::new(
            g,
            edges
                .iter()
                .map(|(e, m)| (Subset::from_indices(e.iter().copied()).unwrap(), *m))
                .collect(),
        )
        .unwrap()
    }

    /// Hamilton cycles of K4 over edges 01,02,03,12,13,23 (indices 0..6).
    fn k4_cycles() -> MultiHypergraph {
        hyper(6, &[(&[0, 3, 5, 2], 1), (&[0, 4, 5, 1], 1), (&[1, 3, 4, 2], 1)])
    }

    /// Tries every nonempty subset of the ground set.
    fn brute_kappa(h: &MultiHypergraph) -> f64 {
        let n = h.ground().len();
        let mut best = f64::INFINITY;
        for bits in 1u128..(1 << n) {
            let s = Subset::from_bits(bits);
            let d = h.degree(s);
            if d > 0 {
                best = best.min((h.size() as f64 / d as f64).powf(1.0 / s.len() as f64));
            }
        }
        best
    }

    #[test]
    fn single_edge_has_unit_spread() {
        let h = hyper(3, &[(&[0, 1, 2], 1)]);
        let opt = optimal_spread(&h).unwrap();
        assert_eq!(opt.kappa, 1.0);
        assert!(check_spread(&h, 1.0).unwrap().holds);
        let c = check_spread(&h, 1.01).unwrap();
        assert!(!c.holds && c.witness.is_some());
    }

    #[test]
    fn k4_hamilton_cycles() {
        let h = k4_cycles();
        let opt = optimal_spread(&h).unwrap();
        assert!((opt.kappa - 1.5f64.sqrt()).abs() < 1e-12);
        assert!((opt.kappa - brute_kappa(&h)).abs() < 1e-12);
        // witness: a perfect matching of K4, inside 2 of the 3 cycles
        assert_eq!((opt.degree, opt.size), (2, 2));
        assert!(check_spread(&h, opt.kappa).unwrap().holds);
        assert!(!check_spread(&h, opt.kappa + 0.01).unwrap().holds);
    }

    #[test]
    fn matchings_kappa_against_brute_force() {
        let h = hyper(6, &[(&[0, 5], 1), (&[1, 4], 1), (&[2, 3], 1)]);
        assert!((optimal_spread(&h).unwrap().kappa - brute_kappa(&h)).abs() < 1e-12);
        assert!((brute_kappa(&h) - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn profiles_agree_and_partition() {
        let h = hyper(6, &[(&[0, 1, 2], 2), (&[1, 2, 3], 1), (&[3, 4, 5], 3), (&[0, 4, 5], 1)]);
        let table = DegreeTable::new(&h).unwrap();
        for a in table.sets() {
            let direct = intersection_profile(&h, a);
            assert_eq!(direct, intersection_profile_from(&table, a), "A={a:?}");
            assert_eq!(direct.iter().sum::<u64>(), h.size());
        }
    }

    #[test]
    fn spiro_examples() {
        let h = hyper(3, &[(&[0, 1, 2], 1)]);
        assert!(check_spiro(&h, &SpreadProfile::new(1.0, vec![3, 1]).unwrap(), None).unwrap().holds);
        let c = check_spiro(&h, &SpreadProfile::new(0.9, vec![3, 1]).unwrap(), None).unwrap();
        assert!(!c.holds);
        assert!(c.witness.is_some());
        assert!(check_spiro(&h, &SpreadProfile::new(0.9, vec![2, 1]).unwrap(), None).is_err());
    }

    #[test]
    fn optimal_spiro_q_is_tight() {
        let h = k4_cycles();
        let q = optimal_spiro_q(&h, &[4, 1], None).unwrap();
        assert!(check_spiro(&h, &SpreadProfile::new(q, vec![4, 1]).unwrap(), None).unwrap().holds);
        assert!(!check_spiro(&h, &SpreadProfile::new(q * 0.999, vec![4, 1]).unwrap(), None).unwrap().holds);
    }

    #[test]
    fn measure_spread_examples() {
        let h = hyper(3, &[(&[0, 1], 1)]);
        let nu = WeightedHypergraph::uniform(&h).unwrap();
        assert!(measure_spread(&nu, 1.0).unwrap().holds);
        assert!(!measure_spread(&nu, 0.9).unwrap().holds);
        let k4 = k4_cycles();
        let q = 1.0 / optimal_spread(&k4).unwrap().kappa;
        assert!(measure_spread(&WeightedHypergraph::uniform(&k4).unwrap(), q).unwrap().holds);
        let g = GroundSet::alphabetic(2).unwrap();
        assert!(WeightedHypergraph::new(g, vec![(Subset::singleton(0), 0.5)]).is_err());
    }

    #[test]
    fn scaling_multiplicities_changes_nothing() {
        let h = k4_cycles();
        let h3 = h.scaled(3).unwrap();
        assert_eq!(optimal_spread(&h).unwrap().kappa, optimal_spread(&h3).unwrap().kappa);
        let p = SpreadProfile::new(0.8, vec![4, 2, 1]).unwrap();
        assert_eq!(check_spiro(&h, &p, None).unwrap().holds, check_spiro(&h3, &p, None).unwrap().holds);
    }
}

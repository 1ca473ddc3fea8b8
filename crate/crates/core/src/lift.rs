//! The rainbow lift of a hypergraph onto `X × [k]`.
//!
//! `H′` holds every rainbow coloring of every edge of `H`, inheriting
//! multiplicity. `H″` has the same members with multiplicity multiplied by
//! `(k - t)_{r - t}` for an edge of size `t`, so that each edge of `H`
//! accounts for exactly `(k)_r` edges of `H″`.
//!
//! Colored sets are stored as [`Subset`]s of the product ground, with the
//! pair `(x, c)` at index `x·k + (c - 1)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, invalid, precondition, Error, Result};
use crate::family::{ColoredSubset, GroundSet, MultiHypergraph, Subset, MAX_ELEMENTS};
use crate::measures::{count_hits, McEstimate};
use crate::numeric::{binomial, checked_falling_factorial, le_rel};
use crate::rng::trial_rng;
use crate::spread::{
    check_spiro, check_spiro_from, intersection_profile_from, optimal_spread, DegreeTable, SpreadProfile,
};

/// Bound on the number of distinct colored edges materialized.
pub const MAX_LIFT_EDGES: u128 = 1_000_000;
const REL_TOL: f64 = 1e-12;
const TRANSVERSAL_STREAM: u64 = 0x7472_616e_7376;

/// `(k)_r = k (k-1) ... (k-r+1)`.
pub fn falling_factorial(k: u64, r: u64) -> Result<u128> {
    if r > k {
        return domain(format!("(k)_r needs r ≤ k, got k = {k}, r = {r}"));
    }
    checked_falling_factorial(k, r).ok_or_else(|| Error::Capacity(format!("({k})_{r} overflows 128 bits")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColoredHypergraph {
    source: MultiHypergraph,
    k: u32,
    padded_rank: Option<usize>,
    hyper: MultiHypergraph,
}

impl ColoredHypergraph {
    pub fn source(&self) -> &MultiHypergraph {
        &self.source
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `r` for `H″`; `None` for an unpadded `H′`.
    pub fn padded_rank(&self) -> Option<usize> {
        self.padded_rank
    }

    /// The colored edges as a hypergraph on the product ground.
    pub fn hypergraph(&self) -> &MultiHypergraph {
        &self.hyper
    }

    pub fn size(&self) -> u64 {
        self.hyper.size()
    }

    pub fn encode(&self, x: usize, c: u32) -> usize {
        x * self.k as usize + (c as usize - 1)
    }

    pub fn decode(&self, i: usize) -> (usize, u32) {
        (i / self.k as usize, (i % self.k as usize) as u32 + 1)
    }

    pub fn to_colored(&self, s: Subset) -> ColoredSubset {
        ColoredSubset::new(self.source.ground().len(), self.k, s.iter().map(|i| self.decode(i)))
            .expect("indices decode into the product ground")
    }

    pub fn from_colored(&self, s: &ColoredSubset) -> Result<Subset> {
        if s.ground_len() != self.source.ground().len() || s.k() != self.k {
            return invalid("colored set does not match the lift's ground or color count");
        }
        Subset::from_indices(s.pairs().iter().map(|&(x, c)| self.encode(x, c)))
    }

    pub fn projection(&self, s: Subset) -> Subset {
        s.iter().map(|i| self.decode(i).0).collect()
    }

    pub fn colored_edges(&self) -> Vec<(ColoredSubset, u64)> {
        self.hyper.edges().iter().map(|&(e, m)| (self.to_colored(e), m)).collect()
    }
}

fn product_ground(g: &GroundSet, k: u32) -> Result<GroundSet> {
    let n = g.len();
    if n * k as usize > MAX_ELEMENTS {
        return capacity(format!("product ground {n}×{k} exceeds {MAX_ELEMENTS} elements"));
    }
    GroundSet::new((0..n).flat_map(|x| (1..=k).map(move |c| format!("{}:{c}", g.label(x)))))
}

/// `H′`.
pub fn lift_rainbow(h: &MultiHypergraph, k: u32) -> Result<ColoredHypergraph> {
    if h.is_empty() {
        return invalid("cannot lift an empty hypergraph");
    }
    if (k as usize) < h.rank() {
        return precondition(format!("k = {k} is below the rank {}", h.rank()));
    }
    let ground = product_ground(h.ground(), k)?;
    let mut count: u128 = 0;
    for &(e, _) in h.edges() {
        count = count.saturating_add(falling_factorial(k as u64, e.len() as u64)?);
    }
    if count > MAX_LIFT_EDGES {
        return capacity(format!("lift would have {count} distinct colored edges"));
    }
    let ku = k as usize;
    let mut edges = Vec::with_capacity(count as usize);
    for &(e, m) in h.edges() {
        let elems: Vec<usize> = e.iter().collect();
        let mut cur = Subset::EMPTY;
        colorings(&elems, ku, 0, 0u128, &mut cur, m, &mut edges);
    }
    let hyper = MultiHypergraph::new(ground, edges)?;
    Ok(ColoredHypergraph {
        source: h.clone(),
        k,
        padded_rank: None,
        hyper,
    })
}

fn colorings(elems: &[usize], k: usize, depth: usize, used: u128, cur: &mut Subset, m: u64, out: &mut Vec<(Subset, u64)>) {
    if depth == elems.len() {
        out.push((*cur, m));
        return;
    }
    for c in 0..k {
        if used >> c & 1 == 1 {
            continue;
        }
        let idx = elems[depth] * k + c;
        cur.insert(idx);
        colorings(elems, k, depth + 1, used | 1 << c, cur, m, out);
        cur.remove(idx);
    }
}

/// `H″` from `H′`.
pub fn pad_lift(lifted: &ColoredHypergraph, r: usize) -> Result<ColoredHypergraph> {
    if lifted.padded_rank.is_some() {
        return invalid("lift is already padded");
    }
    let k = lifted.k as u64;
    if r < lifted.source.rank() {
        return domain(format!("r = {r} is below the largest edge size {}", lifted.source.rank()));
    }
    if r as u64 > k {
        return domain(format!("r = {r} exceeds k = {k}"));
    }
    let mut edges = Vec::with_capacity(lifted.hyper.distinct_len());
    for &(e, m) in lifted.hyper.edges() {
        let t = e.len() as u64;
        let factor = falling_factorial(k - t, r as u64 - t)?;
        let m2 = u64::try_from(factor)
            .ok()
            .and_then(|f| f.checked_mul(m))
            .ok_or_else(|| Error::Capacity("padded multiplicity overflows".into()))?;
        edges.push((e, m2));
    }
    let hyper = MultiHypergraph::new(lifted.hyper.ground().clone(), edges)?;
    let want = falling_factorial(k, r as u64)? * lifted.source.size() as u128;
    if hyper.size() as u128 != want {
        return Err(Error::Numerical(format!("|H″| = {} but (k)_r|H| = {want}", hyper.size())));
    }
    Ok(ColoredHypergraph {
        source: lifted.source.clone(),
        k: lifted.k,
        padded_rank: Some(r),
        hyper,
    })
}

/// `H″` padded to the rank of `h`.
pub fn lift_padded(h: &MultiHypergraph, k: u32) -> Result<ColoredHypergraph> {
    pad_lift(&lift_rainbow(h, k)?, h.rank())
}

fn require_padded_of(h: &MultiHypergraph, lifted: &ColoredHypergraph) -> Result<usize> {
    if lifted.source() != h {
        return invalid("the lift was not built from this hypergraph");
    }
    lifted
        .padded_rank
        .ok_or_else(|| Error::InvalidInput("the lift must be padded first".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftSpreadReport {
    pub holds: bool,
    /// `d″(S) = (k-s)_{r-s} d_H(S_X)` for every checked `S`.
    pub identity_holds: bool,
    /// `d″(S) ≤ e^s |H″| / (kκ)^s` for every checked `S`.
    pub bound_holds: bool,
    /// `(k)_s ≥ (k/e)^s` for `s ≤ depth`.
    pub factorial_bound_holds: bool,
    pub worst_ratio: f64,
    pub sets_checked: usize,
    pub witness: Option<Subset>,
}

/// Checks the lifted spread bound on every colored set of size at most
/// `depth` inside an edge of `H″`.
pub fn verify_lift_spread(h: &MultiHypergraph, lifted: &ColoredHypergraph, kappa: f64, depth: usize) -> Result<LiftSpreadReport> {
    let r = require_padded_of(h, lifted)?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return invalid(format!("κ = {kappa} must be positive"));
    }
    let opt = optimal_spread(h)?;
    if kappa > opt.kappa * (1.0 + REL_TOL) {
        return precondition(format!("κ = {kappa} exceeds the optimal spread {}", opt.kappa));
    }
    let k = lifted.k as u64;
    let base = DegreeTable::up_to(h, depth)?;
    let table = DegreeTable::up_to(lifted.hypergraph(), depth)?;
    let total = lifted.size() as f64;
    let mut identity_holds = true;
    let mut bound_holds = true;
    let mut worst = 0.0f64;
    let mut witness = None;
    let mut checked = 0;
    for s in table.sets() {
        if s.is_empty() || s.len() > depth {
            continue;
        }
        checked += 1;
        let sz = s.len() as u64;
        let d2 = table.degree(s) as u128;
        let expected = falling_factorial(k - sz, r as u64 - sz)? * base.degree(lifted.projection(s)) as u128;
        if d2 != expected {
            identity_holds = false;
            witness.get_or_insert(s);
        }
        let bound = std::f64::consts::E.powi(sz as i32) * total / (k as f64 * kappa).powi(sz as i32);
        let ratio = d2 as f64 / bound;
        worst = worst.max(ratio);
        if !le_rel(d2 as f64, bound, REL_TOL) {
            bound_holds = false;
            witness.get_or_insert(s);
        }
    }
    let factorial_bound_holds = (1..=(depth as u64).min(k)).all(|s| {
        let ff = falling_factorial(k, s).expect("s ≤ k") as f64;
        le_rel((k as f64 / std::f64::consts::E).powi(s as i32), ff, REL_TOL)
    });
    Ok(LiftSpreadReport {
        holds: identity_holds && bound_holds && factorial_bound_holds,
        identity_holds,
        bound_holds,
        factorial_bound_holds,
        worst_ratio: worst,
        sets_checked: checked,
        witness,
    })
}

/// One failed step of the lifted Spiro chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFailure {
    pub link: String,
    pub set: Subset,
    pub s: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftSpiroReport {
    pub holds: bool,
    /// `H` is `(1/κ; radii)`-spread on sets up to the depth.
    pub premise: bool,
    /// `H″` is `(min(1, 3e/(kκ)); radii)`-spread on sets up to the depth.
    pub conclusion: bool,
    pub failures: Vec<ChainFailure>,
    /// Largest `M_s(A) / (|H″| (3e/(kκ))^s)` seen.
    pub worst_ratio: f64,
    pub sets_checked: usize,
}

/// Checks the lifted Spiro bound and each step of the chain behind it:
///
/// ```text
/// L0 = M″_s(A)
/// L1 = Σ_t #{T ∈ H″ : |A∩T| = s, |A_X∩T_X| = t}          (= L0)
/// L2 = (k-s)_{r-s} Σ_t N_t(A_X) C(t, s)                    (≥ L1)
/// L3 = (k-s)_{r-s} Σ_{t=s}^{|A|} |H| (2/κ)^t                (≥ L2 under the premise)
/// L4 = |H″|/(k)_s (2/κ)^s / (1 - 2/κ)                     (≥ L3)
/// L5 = |H″|/(k)_s (3/κ)^s                                  (≥ L4 for κ ≥ 6)
/// L6 = |H″| (3e/(kκ))^s                                    (≥ L5)
/// ```
///
/// `L1` is evaluated from the profile of `H` by counting, for each edge of
/// `H` meeting `A_X` in `t` elements, the colorings agreeing with `A` on
/// exactly `s` of them.
pub fn verify_lift_spiro(
    h: &MultiHypergraph,
    lifted: &ColoredHypergraph,
    kappa: f64,
    radii: &[usize],
    depth: usize,
) -> Result<LiftSpiroReport> {
    let r = require_padded_of(h, lifted)?;
    if !(kappa >= 6.0 && kappa.is_finite()) {
        return precondition(format!("κ = {kappa} must be at least 6"));
    }
    if !h.is_uniform() {
        return precondition("the source hypergraph must be uniform");
    }
    if radii.last() != Some(&1) {
        return precondition("the last radius must be 1");
    }
    let k = lifted.k as u64;
    let profile_h = SpreadProfile::new(1.0 / kappa, radii.to_vec())?;
    let premise = check_spiro(h, &profile_h, Some(depth))?.holds;
    let q2 = (3.0 * std::f64::consts::E / (k as f64 * kappa)).min(1.0);
    let profile_h2 = SpreadProfile::new(q2, radii.to_vec())?;
    let cap = depth.min(radii[0]);
    let base = DegreeTable::up_to(h, cap)?;
    let table = DegreeTable::up_to(lifted.hypergraph(), cap)?;
    let conclusion = check_spiro_from(&table, &profile_h2, cap).holds;

    let size_h = h.size() as f64;
    let size_h2 = lifted.size() as f64;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for a in table.sets() {
        if a.len() > cap {
            continue;
        }
        let Some(j0) = profile_h2.min_j(a.len()) else {
            continue;
        };
        checked += 1;
        let width = a.len();
        let m2 = intersection_profile_from(&table, a);
        if m2.iter().sum::<u64>() != lifted.size() {
            failures.push(ChainFailure {
                link: "partition".into(),
                set: a,
                s: 0,
                lhs: m2.iter().sum::<u64>() as f64,
                rhs: size_h2,
            });
        }
        let ax = lifted.projection(a);
        let n_t = intersection_profile_from(&base, ax);
        for s in j0.max(1)..=width {
            let su = s as u64;
            let pad = falling_factorial(k - su, r as u64 - su)? as f64;
            let ks = falling_factorial(k, su)? as f64;
            let l0 = m2[s] as f64;
            let mut l1 = 0.0;
            let mut l2 = 0.0;
            let mut l3 = 0.0;
            for t in s..=width {
                l1 += n_t[t] as f64 * exact_agreements(k, r as u64, t as u64, su)? as f64;
                l2 += pad * n_t[t] as f64 * binomial(t as u64, su) as f64;
                l3 += pad * size_h * (2.0 / kappa).powi(t as i32);
            }
            let l4 = size_h2 / ks * (2.0 / kappa).powi(s as i32) / (1.0 - 2.0 / kappa);
            let l5 = size_h2 / ks * (3.0 / kappa).powi(s as i32);
            let l6 = size_h2 * (3.0 * std::f64::consts::E / (k as f64 * kappa)).powi(s as i32);
            worst = worst.max(l0 / l6);
            let mut link = |name: &str, lhs: f64, rhs: f64, ok: bool| {
                if !ok {
                    failures.push(ChainFailure {
                        link: name.into(),
                        set: a,
                        s,
                        lhs,
                        rhs,
                    });
                }
            };
            link("L0=L1", l0, l1, l0 == l1);
            link("L1<=L2", l1, l2, le_rel(l1, l2, REL_TOL));
            if premise {
                link("L2<=L3", l2, l3, le_rel(l2, l3, REL_TOL));
            }
            link("L3<=L4", l3, l4, le_rel(l3, l4, REL_TOL));
            link("L4<=L5", l4, l5, le_rel(l4, l5, REL_TOL));
            link("L5<=L6", l5, l6, le_rel(l5, l6, REL_TOL));
        }
    }
    Ok(LiftSpiroReport {
        holds: failures.is_empty() && (!premise || conclusion),
        premise,
        conclusion,
        failures,
        worst_ratio: worst,
        sets_checked: checked,
    })
}

/// Injective colorings of an `r`-set from `[k]` that agree with `t` fixed
/// distinct colors on exactly `s` of `t` designated elements.
fn exact_agreements(k: u64, r: u64, t: u64, s: u64) -> Result<i128> {
    let mut total: i128 = 0;
    for u in s..=t {
        let term = binomial(u, s) as i128 * binomial(t, u) as i128 * falling_factorial(k - u, r - u)? as i128;
        total += if (u - s).is_multiple_of(2) { term } else { -term };
    }
    Ok(total)
}

/// Per-element color masks (bit `c - 1` for color `c`) from pairs.
pub fn color_masks_from_pairs(n: usize, k: u32, pairs: &[(usize, u32)]) -> Result<Vec<u128>> {
    if k == 0 || k > 128 {
        return invalid("color count must lie in 1..=128");
    }
    let mut masks = vec![0u128; n];
    for &(x, c) in pairs {
        if x >= n || c == 0 || c > k {
            return invalid(format!("pair ({x}, {c}) out of range"));
        }
        masks[x] |= 1 << (c - 1);
    }
    Ok(masks)
}

/// Whether some edge has a system of distinct representatives: distinct
/// colors `c(x)` with `(x, c(x))` in the sample for each element `x`.
pub fn has_rainbow_transversal(masks: &[u128], h: &MultiHypergraph) -> bool {
    h.edges().iter().any(|&(e, _)| edge_has_transversal(masks, e))
}

pub(crate) fn edge_has_transversal(masks: &[u128], e: Subset) -> bool {
    let elems: Vec<u128> = e.iter().map(|x| masks.get(x).copied().unwrap_or(0)).collect();
    if elems.contains(&0) {
        return false;
    }
    if (elems.iter().fold(0u128, |a, &m| a | m).count_ones() as usize) < elems.len() {
        return false;
    }
    let mut owner = [usize::MAX; 128];
    for i in 0..elems.len() {
        let mut seen = 0u128;
        if !augment(i, &elems, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(i: usize, elems: &[u128], owner: &mut [usize; 128], seen: &mut u128) -> bool {
    let mut avail = elems[i] & !*seen;
    while avail != 0 {
        let c = avail.trailing_zeros() as usize;
        avail &= avail - 1;
        *seen |= 1 << c;
        if owner[c] == usize::MAX || augment(owner[c], elems, owner, seen) {
            owner[c] = i;
            return true;
        }
    }
    false
}

pub(crate) fn check_model(h: &MultiHypergraph, k: u32, p: f64) -> Result<()> {
    if k == 0 || k > 128 {
        return invalid("color count must lie in 1..=128");
    }
    if (k as usize) < h.rank() {
        return precondition(format!("k = {k} is below the rank {}", h.rank()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return invalid(format!("p = {p} must lie in (0, 1]"));
    }
    Ok(())
}

/// `X′_{p/k}`: each pair present independently with probability `p/k`.
pub(crate) fn transversal_element<R: Rng>(k: u32, p: f64, rng: &mut R) -> u128 {
    let q = p / k as f64;
    (0..k).filter(|_| rng.gen::<f64>() < q).fold(0u128, |m, c| m | 1 << c)
}

/// Present with probability `p`, then one uniform color.
pub(crate) fn colored_element<R: Rng>(k: u32, p: f64, rng: &mut R) -> u128 {
    if rng.gen::<f64>() < p {
        1u128 << rng.gen_range(0..k)
    } else {
        0
    }
}

/// One draw of `X′_{p/k}` and whether it holds a rainbow transversal.
pub fn transversal_trial(h: &MultiHypergraph, k: u32, p: f64, seed: u64) -> Result<bool> {
    check_model(h, k, p)?;
    let mut rng = trial_rng(seed, TRANSVERSAL_STREAM, 0);
    let masks: Vec<u128> = (0..h.ground().len()).map(|_| transversal_element(k, p, &mut rng)).collect();
    Ok(has_rainbow_transversal(&masks, h))
}

pub fn transversal_mc(h: &MultiHypergraph, k: u32, p: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    check_model(h, k, p)?;
    if samples == 0 {
        return precondition("Monte Carlo needs at least one sample");
    }
    let n = h.ground().len();
    let hits = count_hits(samples, seed, TRANSVERSAL_STREAM, |rng| {
        let masks: Vec<u128> = (0..n).map(|_| transversal_element(k, p, rng)).collect();
        has_rainbow_transversal(&masks, h)
    });
    Ok(McEstimate::from_hits(hits, samples, seed))
}

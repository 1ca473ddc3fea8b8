//! Hybrid samples interpolating between the colored model and the
//! transversal model `X′_{p/k}`.
//!
//! In hybrid `i`, elements with index below `i` are present with
//! probability `p` and get one uniform color; the rest carry each color
//! independently with probability `p/k`. Hybrid `0` is the transversal
//! model and hybrid `n` the colored one. A sample is a vector of per-element
//! color masks and hits when it contains a rainbow transversal of an edge.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::family::{MultiHypergraph, Subset};
use crate::lift::{check_model, colored_element, edge_has_transversal, has_rainbow_transversal, transversal_element};
use crate::measures::{count_hits, McEstimate};
use crate::numeric::compensated_sum;
use crate::rng::trial_rng;

/// Bound on the states visited by [`exact_hybrid_hit`].
pub const MAX_EXACT_STATES: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HybridIndex(usize);

impl HybridIndex {
    pub fn new(i: usize, n: usize) -> Result<Self> {
        if i > n {
            return invalid(format!("hybrid index {i} exceeds the ground size {n}"));
        }
        Ok(Self(i))
    }

    pub fn value(self) -> usize {
        self.0
    }
}

fn draw<R: rand::Rng>(n: usize, k: u32, p: f64, i: usize, rng: &mut R) -> Vec<u128> {
    (0..n)
        .map(|x| if x < i { colored_element(k, p, rng) } else { transversal_element(k, p, rng) })
        .collect()
}

/// One hybrid sample, as per-element color masks (bit `c - 1` for color `c`).
pub fn hybrid_sample(h: &MultiHypergraph, k: u32, p: f64, i: HybridIndex, seed: u64) -> Result<Vec<u128>> {
    check_model(h, k, p)?;
    let n = h.ground().len();
    HybridIndex::new(i.0, n)?;
    let mut rng = trial_rng(seed, i.0 as u64, 0);
    Ok(draw(n, k, p, i.0, &mut rng))
}

/// Monte Carlo hit frequencies of hybrids `0..=n`, each on its own stream.
pub fn chain_hit_estimates(h: &MultiHypergraph, k: u32, p: f64, samples: u64, seed: u64) -> Result<Vec<McEstimate>> {
    check_model(h, k, p)?;
    if samples == 0 {
        return precondition("Monte Carlo needs at least one sample");
    }
    let n = h.ground().len();
    Ok((0..=n)
        .map(|i| {
            let hits = count_hits(samples, seed, i as u64, |rng| has_rainbow_transversal(&draw(n, k, p, i, rng), h));
            McEstimate::from_hits(hits, samples, seed)
        })
        .collect())
}

/// Exact hit probability of hybrid `i`, by depth-first enumeration of the
/// support with early exits once every outcome below a node agrees.
pub fn exact_hybrid_hit(h: &MultiHypergraph, k: u32, p: f64, i: HybridIndex) -> Result<f64> {
    check_model(h, k, p)?;
    let n = h.ground().len();
    HybridIndex::new(i.0, n)?;
    let elems: Vec<usize> = h.support().iter().collect();
    let colored = elems.iter().filter(|&&x| x < i.0).count();
    let states = (k as f64 + 1.0).powi(colored as i32) * 2f64.powi((k as usize * (elems.len() - colored)) as i32);
    if states > MAX_EXACT_STATES {
        return crate::error::capacity(format!("{states:e} hybrid states exceed {MAX_EXACT_STATES:e}"));
    }
    let full = if k == 128 { u128::MAX } else { (1u128 << k) - 1 };
    let q = p / k as f64;
    let mut search = Search {
        h,
        elems: &elems,
        i: i.0,
        k,
        p,
        q,
        full,
        low: vec![0; n],
        high: vec![0; n],
        terms: Vec::new(),
    };
    for &x in &elems {
        search.high[x] = full;
    }
    search.run(0, 1.0);
    Ok(compensated_sum(search.terms).min(1.0))
}

struct Search<'a> {
    h: &'a MultiHypergraph,
    elems: &'a [usize],
    i: usize,
    k: u32,
    p: f64,
    q: f64,
    full: u128,
    /// Decided masks with undecided elements empty.
    low: Vec<u128>,
    /// Decided masks with undecided elements carrying every color.
    high: Vec<u128>,
    terms: Vec<f64>,
}

impl Search<'_> {
    fn hits(masks: &[u128], h: &MultiHypergraph) -> bool {
        h.edges().iter().any(|&(e, _): &(Subset, u64)| edge_has_transversal(masks, e))
    }

    fn run(&mut self, depth: usize, weight: f64) {
        if weight == 0.0 {
            return;
        }
        if Self::hits(&self.low, self.h) {
            self.terms.push(weight);
            return;
        }
        if depth == self.elems.len() || !Self::hits(&self.high, self.h) {
            return;
        }
        let x = self.elems[depth];
        if x < self.i {
            self.set(x, 0);
            self.run(depth + 1, weight * (1.0 - self.p));
            for c in 0..self.k {
                self.set(x, 1 << c);
                self.run(depth + 1, weight * self.p / self.k as f64);
            }
        } else {
            let k = self.k as i32;
            let mut m: u128 = 0;
            loop {
                let ones = m.count_ones() as i32;
                self.set(x, m);
                self.run(depth + 1, weight * self.q.powi(ones) * (1.0 - self.q).powi(k - ones));
                if m == self.full {
                    break;
                }
                m += 1;
            }
        }
        self.low[x] = 0;
        self.high[x] = self.full;
    }

    fn set(&mut self, x: usize, m: u128) {
        self.low[x] = m;
        self.high[x] = m;
    }
}

/// Exact hit probabilities of hybrids `0..=n`.
pub fn exact_chain(h: &MultiHypergraph, k: u32, p: f64) -> Result<Vec<f64>> {
    let n = h.ground().len();
    (0..=n).map(|i| exact_hybrid_hit(h, k, p, HybridIndex(i))).collect()
}

/// `p d/k - 1 + (1 - p/k)^d`: for an element whose completing colors form a
/// set of size `d`, the probability that one uniform color lands in the set
/// minus the probability that independent colors at rate `p/k` hit it.
pub fn pointwise_gap(p: f64, k: u32, d: u32) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("p = {p} must lie in (0, 1)"));
    }
    if d == 0 || d > k {
        return precondition(format!("d = {d} must lie in 1..={k}"));
    }
    if d == 1 {
        return Ok(0.0);
    }
    let q = p / k as f64;
    let qd = q * d as f64;
    if qd >= 0.1 {
        return Ok(qd + (d as f64 * (-q).ln_1p()).exp_m1());
    }
    // the closed form cancels badly here; the terms Σ_{j≥2} C(d, j)(-q)^j
    // shrink by at least a factor of 10 each
    let mut term = 1.0;
    let mut terms = Vec::with_capacity(d as usize);
    for j in 1..=d {
        term *= -q * (d - j + 1) as f64 / j as f64;
        if j >= 2 {
            terms.push(term);
        }
        if term.abs() < f64::MIN_POSITIVE {
            break;
        }
    }
    Ok(compensated_sum(terms.into_iter().rev()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::GroundSet;
    use crate::generators::hamilton_cycles;

    fn edge_ab() -> MultiHypergraph {
        MultiHypergraph::simple(GroundSet::alphabetic(2).unwrap(), vec![Subset::from_indices([0, 1]).unwrap()]).unwrap()
    }

    #[test]
    fn single_edge_chain_endpoints() {
        let h = edge_ab();
        let chain = exact_chain(&h, 2, 1.0).unwrap();
        assert!((chain[0] - 7.0 / 16.0).abs() < 1e-15);
        assert!((chain[2] - 0.5).abs() < 1e-15);
        assert!(chain.windows(2).all(|w| w[0] <= w[1] + 1e-15), "{chain:?}");
    }

    #[test]
    fn exact_matches_brute_force() {
        // hybrid 1 on {ab}, k = 2, p = 0.7: a colored, b transversal
        let h = edge_ab();
        let (p, k) = (0.7, 2u32);
        let q = p / k as f64;
        let mut brute = 0.0;
        for a in 0..3u32 {
            let wa = if a == 0 { 1.0 - p } else { p / 2.0 };
            for mb in 0u128..4 {
                let ones = mb.count_ones() as i32;
                let wb = q.powi(ones) * (1.0 - q).powi(2 - ones);
                let ma = if a == 0 { 0 } else { 1u128 << (a - 1) };
                if has_rainbow_transversal(&[ma, mb], &h) {
                    brute += wa * wb;
                }
            }
        }
        let exact = exact_hybrid_hit(&h, k, p, HybridIndex::new(1, 2).unwrap()).unwrap();
        assert!((exact - brute).abs() < 1e-15);
    }

    #[test]
    fn hybrid_samples_are_deterministic() {
        let h = hamilton_cycles(4).unwrap();
        let i = HybridIndex::new(3, 6).unwrap();
        assert_eq!(hybrid_sample(&h, 4, 0.5, i, 9).unwrap(), hybrid_sample(&h, 4, 0.5, i, 9).unwrap());
        let s = hybrid_sample(&h, 4, 0.5, i, 9).unwrap();
        assert!(s[..3].iter().all(|m| m.count_ones() <= 1));
        assert!(HybridIndex::new(7, 6).is_err());
    }

    #[test]
    fn estimates_agree_with_exact_chain() {
        let h = edge_ab();
        let exact = exact_chain(&h, 2, 0.6).unwrap();
        let mc = chain_hit_estimates(&h, 2, 0.6, 40_000, 1).unwrap();
        for (e, m) in exact.iter().zip(&mc) {
            assert!(m.within(*e, 4.0), "{e} vs {m:?}");
        }
    }

    #[test]
    fn gap_against_series() {
        for &(p, k, d) in &[(0.3, 5u32, 3u32), (0.9, 4, 4), (1e-6, 10, 7), (0.5, 100, 2)] {
            let q = p / k as f64;
            // p d/k - 1 + Σ_j C(d, j) (-q)^j  =  Σ_{j≥2} C(d, j) (-q)^j
            let mut series = 0.0;
            let mut binom = 1.0;
            for j in 1..=d {
                binom = binom * (d - j + 1) as f64 / j as f64;
                if j >= 2 {
                    series += binom * (-q).powi(j as i32);
                }
            }
            let gap = pointwise_gap(p, k, d).unwrap();
            assert!((gap - series).abs() <= 1e-12 * series.abs(), "{p} {k} {d}: {gap} vs {series}");
            assert!(gap >= 0.0);
        }
        assert_eq!(pointwise_gap(0.5, 3, 1).unwrap(), 0.0);
        assert!(pointwise_gap(0.5, 3, 4).is_err());
        assert!(pointwise_gap(1.0, 3, 2).is_err());
    }
}

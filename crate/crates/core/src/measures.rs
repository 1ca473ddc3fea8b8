//! Product measures `μ_p`, the randomly-colored measure `μ_p^k`, and the
//! per-element generalisation `μ_{p_1,...,p_n}`.
//!
//! Exact evaluation has two engines. The default is inclusion–exclusion
//! over sub-collections of minimal edges, grouped by the union of each
//! sub-collection so that coefficients stay exact integers. Direct
//! enumeration over subsets of the support is the fallback and the oracle.
//! The colored measure sums over subsets `T` of the support, weighting each
//! by the fraction of colorings of `T` that contain a rainbow minimal edge.

use std::collections::HashMap;

use rayon::prelude::*;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chromatic::{ChromaticCounter, MAX_CONFLICT_VERTICES};
use crate::error::{capacity, domain, invalid, precondition, Error, Result};
use crate::family::{is_rainbow_on, IncreasingFamily, Subset, MAX_COLORS, MAX_ENUMERATION_ELEMENTS};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::rng::trial_rng;

/// Inclusion–exclusion is used up to this many minimal edges.
pub const MAX_IE_EDGES: usize = 20;
/// The colored engines enumerate subsets of a support of at most this size.
pub const MAX_COLORED_SUPPORT: usize = 20;
/// Direct coloring enumeration is allowed up to this many colorings.
pub const MAX_COLORING_ENUMERATION: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    pvec: Vec<f64>,
    k: Option<u32>,
}

impl MeasureParams {
    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::per_element(vec![p; n])
    }

    pub fn per_element(pvec: Vec<f64>) -> Result<Self> {
        if pvec.is_empty() {
            return invalid("probability vector is empty");
        }
        if let Some((i, p)) = pvec.iter().enumerate().find(|(_, &p)| !(p > 0.0 && p <= 1.0)) {
            return invalid(format!("p[{i}] = {p} is outside (0, 1]"));
        }
        Ok(Self { pvec, k: None })
    }

    pub fn with_colors(mut self, k: u32) -> Result<Self> {
        if k == 0 {
            return invalid("color count k must be at least 1");
        }
        if k > MAX_COLORS {
            return capacity(format!("at most {MAX_COLORS} colors supported"));
        }
        self.k = Some(k);
        Ok(self)
    }

    pub fn pvec(&self) -> &[f64] {
        &self.pvec
    }

    pub fn k(&self) -> Option<u32> {
        self.k
    }

    pub fn len(&self) -> usize {
        self.pvec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pvec.is_empty()
    }

    fn check_against(&self, f: &IncreasingFamily) -> Result<()> {
        if self.pvec.len() != f.ground().len() {
            return invalid(format!(
                "probability vector has {} entries, ground set has {}",
                self.pvec.len(),
                f.ground().len()
            ));
        }
        Ok(())
    }

    fn require_k(&self) -> Result<u32> {
        self.k.ok_or_else(|| Error::InvalidInput("colored measure needs a color count k".into()))
    }
}

fn require_nontrivial(f: &IncreasingFamily) -> Result<()> {
    if f.is_empty() {
        return domain("the empty family has measure 0 for every p");
    }
    if f.is_full() {
        return domain("the family 2^X has measure 1 for every p");
    }
    Ok(())
}

fn product_over(s: Subset, pvec: &[f64]) -> f64 {
    s.iter().map(|x| pvec[x]).product()
}

/// `∏_{x∈T} p_x ∏_{x∈U∖T} (1 - p_x)`.
fn outcome_weight(t: Subset, universe: Subset, pvec: &[f64]) -> f64 {
    universe
        .iter()
        .map(|x| if t.contains(x) { pvec[x] } else { 1.0 - pvec[x] })
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductEngine {
    InclusionExclusion,
    Enumeration,
}

/// Precomputed evaluator for `μ_p(F)`, reusable across many `p`.
#[derive(Debug, Clone)]
pub struct ProductMeasure {
    family: IncreasingFamily,
    engine: ProductEngine,
    /// `(∪A, Σ (-1)^{|A|+1})` grouped by union; empty for enumeration.
    terms: Vec<(Subset, f64)>,
}

impl ProductMeasure {
    pub fn new(f: &IncreasingFamily) -> Result<Self> {
        let engine = if f.len() <= MAX_IE_EDGES {
            ProductEngine::InclusionExclusion
        } else if f.support().len() <= MAX_ENUMERATION_ELEMENTS {
            ProductEngine::Enumeration
        } else {
            return capacity(format!(
                "{} minimal edges over a support of {} elements exceeds both exact-engine guards",
                f.len(),
                f.support().len()
            ));
        };
        Self::with_engine(f, engine)
    }

    pub fn with_engine(f: &IncreasingFamily, engine: ProductEngine) -> Result<Self> {
        require_nontrivial(f)?;
        let terms = match engine {
            ProductEngine::InclusionExclusion => {
                if f.len() > MAX_IE_EDGES {
                    return capacity(format!(
                        "inclusion–exclusion limited to {MAX_IE_EDGES} minimal edges, got {}",
                        f.len()
                    ));
                }
                let mut coeffs: HashMap<Subset, i64> = HashMap::new();
                union_coefficients(f.minimal_edges(), 0, Subset::EMPTY, 1, &mut coeffs);
                let mut terms: Vec<(Subset, f64)> = coeffs
                    .into_iter()
                    .filter(|&(_, c)| c != 0)
                    .map(|(u, c)| (u, c as f64))
                    .collect();
                terms.sort_by_key(|a| a.0);
                terms
            }
            ProductEngine::Enumeration => {
                if f.support().len() > MAX_ENUMERATION_ELEMENTS {
                    return capacity(format!(
                        "enumeration limited to a support of {MAX_ENUMERATION_ELEMENTS} elements"
                    ));
                }
                Vec::new()
            }
        };
        Ok(Self {
            family: f.clone(),
            engine,
            terms,
        })
    }

    pub fn engine(&self) -> ProductEngine {
        self.engine
    }

    pub fn eval(&self, params: &MeasureParams) -> Result<f64> {
        params.check_against(&self.family)?;
        let pvec = params.pvec();
        Ok(match self.engine {
            ProductEngine::InclusionExclusion => {
                compensated_sum(self.terms.iter().map(|&(u, c)| c * product_over(u, pvec)))
            }
            ProductEngine::Enumeration => {
                let support = self.family.support();
                compensated_sum(
                    support
                        .subsets()
                        .filter(|t| self.family.contains_unchecked(*t))
                        .map(|t| outcome_weight(t, support, pvec)),
                )
            }
        })
    }

    pub fn eval_uniform(&self, p: f64) -> Result<f64> {
        self.eval(&MeasureParams::uniform(self.family.ground().len(), p)?)
    }
}

/// Accumulates `Σ_{A ⊆ edges[i..], A ≠ ∅} sign·(-1)^{|A|+1}` keyed by `union ∪ (∪A)`.
fn union_coefficients(edges: &[Subset], start: usize, union: Subset, sign: i64, out: &mut HashMap<Subset, i64>) {
    for j in start..edges.len() {
        let u = union.union(edges[j]);
        *out.entry(u).or_insert(0) += sign;
        union_coefficients(edges, j + 1, u, -sign, out);
    }
}

/// Exact `μ_p(F)` (per-element `p` allowed).
pub fn mu_exact(f: &IncreasingFamily, params: &MeasureParams) -> Result<f64> {
    ProductMeasure::new(f)?.eval(params)
}

/// Exact `μ_p(F)` by direct enumeration of subsets of the support.
pub fn mu_enumerate(f: &IncreasingFamily, params: &MeasureParams) -> Result<f64> {
    ProductMeasure::with_engine(f, ProductEngine::Enumeration)?.eval(params)
}

/// Colorings of `v_t` that are rainbow on at least one edge of `inner`
/// (`inner` = minimal edges inside `v_t`, `v_t` = their union).
struct RainbowCounter {
    k: u64,
    chromatic: ChromaticCounter,
}

impl RainbowCounter {
    fn new(k: u64) -> Self {
        Self {
            k,
            chromatic: ChromaticCounter::new(k),
        }
    }

    fn count(&mut self, inner: &[Subset], v_t: Subset) -> Result<u128> {
        if inner.is_empty() {
            return Ok(0);
        }
        if inner.len() <= MAX_IE_EDGES && v_t.len() <= MAX_CONFLICT_VERTICES {
            return self.count_ie(inner, v_t);
        }
        let total = (self.k as u128).checked_pow(v_t.len() as u32);
        match total {
            Some(t) if t <= MAX_COLORING_ENUMERATION => Ok(count_rainbow_by_enumeration(inner, v_t, self.k)),
            _ => capacity(format!(
                "{} edges over {} elements exceed the inclusion–exclusion and enumeration guards",
                inner.len(),
                v_t.len()
            )),
        }
    }

    /// `Σ_{A≠∅} (-1)^{|A|+1} N(A) k^{|V_T| - |V(A)|}` where `N(A)` counts
    /// colorings of `V(A)` injective on every edge of `A`.
    fn count_ie(&mut self, inner: &[Subset], v_t: Subset) -> Result<u128> {
        let local: Vec<usize> = v_t.iter().collect();
        let to_local = |e: Subset| -> u32 {
            e.iter()
                .map(|x| local.iter().position(|&y| y == x).expect("edge inside V_T"))
                .fold(0u32, |acc, i| acc | 1 << i)
        };
        let edges: Vec<u32> = inner.iter().map(|&e| to_local(e)).collect();
        let width = local.len();
        let mut acc: i128 = 0;
        let adj = vec![0u32; width];
        self.ie_walk(&edges, 0, 0, &adj, 1, width, &mut acc)?;
        u128::try_from(acc).map_err(|_| Error::Numerical("negative rainbow count".into()))
    }

    #[allow(clippy::too_many_arguments)]
    fn ie_walk(
        &mut self,
        edges: &[u32],
        start: usize,
        union: u32,
        adj: &[u32],
        sign: i128,
        width: usize,
        acc: &mut i128,
    ) -> Result<()> {
        for j in start..edges.len() {
            let e = edges[j];
            let u = union | e;
            let mut next = adj.to_vec();
            for v in local_bits(e) {
                next[v] |= e & !(1 << v);
            }
            let compact = compact_graph(&next, u);
            let n_a = self.chromatic.count(&compact)?;
            let free = width as u32 - u.count_ones();
            let term = (self.k as i128)
                .checked_pow(free)
                .and_then(|f| f.checked_mul(n_a))
                .and_then(|t| t.checked_mul(sign))
                .ok_or_else(|| Error::Capacity("rainbow count overflows 128 bits".into()))?;
            *acc = acc
                .checked_add(term)
                .ok_or_else(|| Error::Capacity("rainbow count overflows 128 bits".into()))?;
            self.ie_walk(edges, j + 1, u, &next, -sign, width, acc)?;
        }
        Ok(())
    }
}

fn local_bits(mut m: u32) -> impl Iterator<Item = usize> {
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

fn compact_graph(adj: &[u32], keep: u32) -> Vec<u32> {
    let idx: Vec<usize> = local_bits(keep).collect();
    idx.iter()
        .map(|&v| {
            idx.iter()
                .enumerate()
                .filter(|&(_, &w)| adj[v] >> w & 1 == 1)
                .fold(0u32, |acc, (j, _)| acc | 1 << j)
        })
        .collect()
}

fn count_rainbow_by_enumeration(inner: &[Subset], v_t: Subset, k: u64) -> u128 {
    let verts: Vec<usize> = v_t.iter().collect();
    let n = v_t.max_index().map_or(0, |m| m + 1);
    let mut colors = vec![1u32; n];
    let mut digits = vec![0u64; verts.len()];
    let mut count = 0u128;
    loop {
        for (d, &x) in digits.iter().zip(&verts) {
            colors[x] = *d as u32 + 1;
        }
        if inner.iter().any(|&e| is_rainbow_on(e, &colors)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return count;
            }
            digits[i] += 1;
            if digits[i] < k {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn edges_inside(f: &IncreasingFamily, t: Subset) -> (Vec<Subset>, Subset) {
    let inner: Vec<Subset> = f
        .minimal_edges()
        .iter()
        .copied()
        .filter(|e| e.is_subset_of(t))
        .collect();
    let v_t = inner.iter().fold(Subset::EMPTY, |acc, e| acc.union(*e));
    (inner, v_t)
}

fn check_colors(k: u32) -> Result<()> {
    if k == 0 {
        return precondition("color count k must be at least 1");
    }
    if k > MAX_COLORS {
        return capacity(format!("at most {MAX_COLORS} colors supported"));
    }
    Ok(())
}

/// Number of the `k^{|T|}` colorings of `T` under which some minimal edge
/// inside `T` is rainbow.
pub fn rainbow_coloring_count(t: Subset, f: &IncreasingFamily, k: u32) -> Result<u128> {
    check_colors(k)?;
    f.ground().check(t)?;
    let (inner, v_t) = edges_inside(f, t);
    let core = RainbowCounter::new(k as u64).count(&inner, v_t)?;
    let outside = (t.len() - v_t.len()) as u32;
    (k as u128)
        .checked_pow(outside)
        .and_then(|m| m.checked_mul(core))
        .ok_or_else(|| Error::Capacity("rainbow count overflows 128 bits".into()))
}

/// Same count by enumerating all colorings of `V_T`; the cross-check route.
pub fn rainbow_coloring_count_enumerate(t: Subset, f: &IncreasingFamily, k: u32) -> Result<u128> {
    check_colors(k)?;
    f.ground().check(t)?;
    let (inner, v_t) = edges_inside(f, t);
    let total = (k as u128).checked_pow(v_t.len() as u32);
    if !matches!(total, Some(x) if x <= MAX_COLORING_ENUMERATION) {
        return capacity("coloring enumeration limited to 10^7 colorings");
    }
    let core = if inner.is_empty() {
        0
    } else {
        count_rainbow_by_enumeration(&inner, v_t, k as u64)
    };
    Ok((k as u128).pow((t.len() - v_t.len()) as u32) * core)
}

/// Precomputed evaluator for a colored measure `μ_p^k(F^rb)` or
/// `μ_p^k(F^all)`: a table of `(T, w(T))` over subsets `T` of the support
/// with `w(T)` the probability that a uniform coloring of `T` lands in the
/// colored family.
#[derive(Debug, Clone)]
pub struct ColoredMeasure {
    n: usize,
    k: u32,
    support: Subset,
    table: Vec<(Subset, f64)>,
}

impl ColoredMeasure {
    pub fn rainbow(f: &IncreasingFamily, k: u32) -> Result<Self> {
        let support = Self::prepare(f, k)?;
        let mut by_core: HashMap<Subset, f64> = HashMap::new();
        let mut counter = RainbowCounter::new(k as u64);
        let mut table = Vec::new();
        for t in support.subsets() {
            let (inner, v_t) = edges_inside(f, t);
            if inner.is_empty() {
                continue;
            }
            // rc(T)/k^{|T|} = N(V_T)/k^{|V_T|}, a function of V_T alone
            let w = match by_core.get(&v_t) {
                Some(&w) => w,
                None => {
                    let n_core = counter.count(&inner, v_t)?;
                    let w = n_core as f64 / (k as f64).powi(v_t.len() as i32);
                    by_core.insert(v_t, w);
                    w
                }
            };
            if w > 0.0 {
                table.push((t, w));
            }
        }
        Ok(Self {
            n: f.ground().len(),
            k,
            support,
            table,
        })
    }

    /// `F^all`: every coloring of a member of `F` is a member, so each
    /// `T ∈ F` carries weight `k^{|T|} / k^{|T|}`.
    pub fn all(f: &IncreasingFamily, k: u32) -> Result<Self> {
        let support = Self::prepare(f, k)?;
        let table = support
            .subsets()
            .filter(|t| f.contains_unchecked(*t))
            .map(|t| {
                let colorings = (k as f64).powi(t.len() as i32);
                (t, colorings / (k as f64).powi(t.len() as i32))
            })
            .collect();
        Ok(Self {
            n: f.ground().len(),
            k,
            support,
            table,
        })
    }

    fn prepare(f: &IncreasingFamily, k: u32) -> Result<Subset> {
        check_colors(k)?;
        require_nontrivial(f)?;
        let support = f.support();
        if support.len() > MAX_COLORED_SUPPORT {
            return capacity(format!(
                "colored exact engine limited to a support of {MAX_COLORED_SUPPORT} elements, got {}",
                support.len()
            ));
        }
        Ok(support)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn eval(&self, params: &MeasureParams) -> Result<f64> {
        if params.len() != self.n {
            return invalid("probability vector length does not match the ground set");
        }
        let pvec = params.pvec();
        let mut acc = CompensatedSum::new();
        for &(t, w) in &self.table {
            acc.add(w * outcome_weight(t, self.support, pvec));
        }
        Ok(acc.value())
    }

    pub fn eval_uniform(&self, p: f64) -> Result<f64> {
        self.eval(&MeasureParams::uniform(self.n, p)?)
    }
}

/// Exact `μ_p^k(F^rb)`.
pub fn mu_colored_exact(f: &IncreasingFamily, params: &MeasureParams) -> Result<f64> {
    params.check_against(f)?;
    let k = params.require_k()?;
    ColoredMeasure::rainbow(f, k)?.eval(params)
}

/// Exact `μ_p^k(F^all)`; equals `μ_p(F)`.
pub fn mu_colored_all_exact(f: &IncreasingFamily, params: &MeasureParams) -> Result<f64> {
    params.check_against(f)?;
    let k = params.require_k()?;
    ColoredMeasure::all(f, k)?.eval(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_hits(hits: u64, samples: u64, seed: u64) -> Self {
        let estimate = hits as f64 / samples as f64;
        Self {
            estimate,
            stderr: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }

    /// True when `value` is within `z` standard errors (the band never
    /// shrinks below `1/samples`, so exact 0 or 1 estimates stay usable).
    pub fn within(&self, value: f64, z: f64) -> bool {
        let band = (z * self.stderr).max(1.0 / self.samples as f64);
        (self.estimate - value).abs() <= band
    }

    pub const CSV_HEADER: [&'static str; 4] = ["estimate", "stderr", "samples", "seed"];
}

/// Counts trials `0..samples` for which `trial` returns true, in parallel;
/// each trial receives its own stream `(stream, t)` of the master seed.
pub(crate) fn count_hits<F>(samples: u64, seed: u64, stream: u64, trial: F) -> u64
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> bool + Sync,
{
    (0..samples)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = trial_rng(seed, stream, t);
            trial(&mut rng)
        })
        .count() as u64
}

/// Monte Carlo estimate of `μ_p^k(F^rb)`. Each trial colors every element
/// uniformly from `[k]` and keeps it with its own `p_i`.
pub fn mu_colored_mc(f: &IncreasingFamily, params: &MeasureParams, samples: u64, seed: u64) -> Result<McEstimate> {
    params.check_against(f)?;
    let k = params.require_k()?;
    if samples == 0 {
        return precondition("Monte Carlo needs at least one sample");
    }
    let n = f.ground().len();
    let pvec = params.pvec();
    let edges = f.minimal_edges();
    let hits = count_hits(samples, seed, 0, |rng| {
        let mut colors = vec![0u32; n];
        let mut included = Subset::EMPTY;
        for x in 0..n {
            colors[x] = rng.gen_range(1..=k);
            if rng.gen::<f64>() < pvec[x] {
                included.insert(x);
            }
        }
        edges
            .iter()
            .any(|&e| e.is_subset_of(included) && is_rainbow_on(e, &colors))
    });
    Ok(McEstimate::from_hits(hits, samples, seed))
}

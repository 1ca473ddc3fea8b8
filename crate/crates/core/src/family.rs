//! Ground sets, subsets, multi-hypergraphs and increasing families.
//!
//! Subsets are bitsets over element indices (at most [`MAX_ELEMENTS`]
//! elements). An increasing family is stored through its antichain of
//! minimal edges; a [`MultiHypergraph`] keeps distinct edges together with
//! their multiplicities.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{capacity, invalid, Error, Result};

/// Largest supported ground set.
pub const MAX_ELEMENTS: usize = 128;
/// Largest supported color count for colored sets and samples.
pub const MAX_COLORS: u32 = 128;
/// Enumeration guard for [`IncreasingFamily::count_members`].
pub const MAX_ENUMERATION_ELEMENTS: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return invalid("ground set must contain at least one element");
        }
        if labels.len() > MAX_ELEMENTS {
            return capacity(format!(
                "ground set has {} elements, at most {MAX_ELEMENTS} supported",
                labels.len()
            ));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return invalid(format!("element {i} has an empty label"));
            }
            if index.insert(label.clone(), i).is_some() {
                return invalid(format!("duplicate element label {label:?}"));
            }
        }
        Ok(Self { labels, index })
    }

    /// Ground set labelled `a, b, c, ...` for n <= 26 and `x1, x2, ...` beyond.
    pub fn alphabetic(n: usize) -> Result<Self> {
        if n <= 26 {
            Self::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string()))
        } else {
            Self::new((1..=n).map(|i| format!("x{i}")))
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn full(&self) -> Subset {
        Subset::prefix(self.len())
    }

    /// Builds a subset from labels.
    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset> {
        let mut s = Subset::EMPTY;
        for l in labels {
            match self.index_of(l.as_ref()) {
                Some(i) => s.insert(i),
                None => return invalid(format!("unknown element label {:?}", l.as_ref())),
            }
        }
        Ok(s)
    }

    pub fn labels_of(&self, s: Subset) -> Vec<String> {
        s.iter().map(|i| self.labels[i].clone()).collect()
    }

    /// Checks that every member of `s` is an element of this ground set.
    pub fn check(&self, s: Subset) -> Result<()> {
        match s.max_index() {
            Some(m) if m >= self.len() => invalid(format!(
                "subset uses element index {m}, ground set has {} elements",
                self.len()
            )),
            _ => Ok(()),
        }
    }
}

/// A set of element indices below [`MAX_ELEMENTS`].
///
/// Ordering is lexicographic on the sorted index lists, which is the
/// canonical order for edges.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Subset(u128);

impl From<Subset> for Vec<usize> {
    fn from(s: Subset) -> Self {
        s.iter().collect()
    }
}

impl TryFrom<Vec<usize>> for Subset {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Subset::from_indices(v)
    }
}

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u128) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_ELEMENTS, "element index {i} out of range");
        Subset(1u128 << i)
    }

    /// The set `{0, 1, ..., n-1}`.
    pub fn prefix(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS);
        if n == MAX_ELEMENTS {
            Subset(u128::MAX)
        } else {
            Subset((1u128 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut s = Subset::EMPTY;
        for i in indices {
            if i >= MAX_ELEMENTS {
                return capacity(format!("element index {i} exceeds {MAX_ELEMENTS}"));
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= Subset::singleton(i).0;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !Subset::singleton(i).0;
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_ELEMENTS && self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn max_index(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(127 - self.0.leading_zeros() as usize)
        }
    }

    pub fn min_index(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }

    /// All subsets of `self` (including the empty set and `self`).
    pub fn subsets(self) -> Submasks {
        Submasks {
            mask: self.0,
            next: Some(self.0),
        }
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Subset::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

pub struct SubsetIter(u128);

impl Iterator for SubsetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SubsetIter {}

pub struct Submasks {
    mask: u128,
    next: Option<u128>,
}

impl Iterator for Submasks {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & self.mask)
        };
        Some(Subset(cur))
    }
}

/// Edge multiset over a ground set. Identical edges are merged and their
/// multiplicities added.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiHypergraph {
    ground: GroundSet,
    edges: Vec<(Subset, u64)>,
    rank: usize,
}

impl MultiHypergraph {
    pub fn new(ground: GroundSet, edges: Vec<(Subset, u64)>) -> Result<Self> {
        let mut merged: BTreeMap<Subset, u64> = BTreeMap::new();
        for (e, m) in edges {
            ground.check(e)?;
            if m == 0 {
                return invalid(format!("edge {e:?} has multiplicity 0"));
            }
            let slot = merged.entry(e).or_insert(0);
            *slot = slot
                .checked_add(m)
                .ok_or_else(|| Error::Capacity("multiplicity overflow".into()))?;
        }
        let edges: Vec<(Subset, u64)> = merged.into_iter().collect();
        let rank = edges.iter().map(|(e, _)| e.len()).max().unwrap_or(0);
        Ok(Self { ground, edges, rank })
    }

    pub fn simple(ground: GroundSet, edges: Vec<Subset>) -> Result<Self> {
        Self::new(ground, edges.into_iter().map(|e| (e, 1)).collect())
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    /// Distinct edges with multiplicities, in canonical order.
    pub fn edges(&self) -> &[(Subset, u64)] {
        &self.edges
    }

    /// `|H|`, multiplicities counted.
    pub fn size(&self) -> u64 {
        self.edges.iter().map(|(_, m)| m).sum()
    }

    pub fn distinct_len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The bound r: maximum edge size.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_uniform(&self) -> bool {
        self.edges.iter().all(|(e, _)| e.len() == self.rank)
    }

    pub fn multiplicity(&self, e: Subset) -> u64 {
        self.edges
            .binary_search_by(|(x, _)| x.cmp(&e))
            .map(|i| self.edges[i].1)
            .unwrap_or(0)
    }

    /// `|H ∩ ⟨S⟩|`: number of edges (with multiplicity) containing `s`.
    pub fn degree(&self, s: Subset) -> u64 {
        self.edges
            .iter()
            .filter(|(e, _)| s.is_subset_of(*e))
            .map(|(_, m)| m)
            .sum()
    }

    /// Union of all edges.
    pub fn support(&self) -> Subset {
        self.edges
            .iter()
            .fold(Subset::EMPTY, |acc, (e, _)| acc.union(*e))
    }

    /// Every multiplicity multiplied by `c`.
    pub fn scaled(&self, c: u64) -> Result<Self> {
        if c == 0 {
            return invalid("scale factor must be positive");
        }
        Self::new(
            self.ground.clone(),
            self.edges.iter().map(|&(e, m)| (e, m * c)).collect(),
        )
    }

    /// The increasing family generated by the edges.
    pub fn to_family(&self) -> IncreasingFamily {
        IncreasingFamily::new(self.ground.clone(), self.edges.iter().map(|(e, _)| *e).collect())
            .expect("edges already validated against ground")
    }
}

/// An increasing family `F ⊆ 2^X`, stored as its antichain of minimal edges.
#[derive(Debug, Clone, PartialEq)]
pub struct IncreasingFamily {
    ground: GroundSet,
    minimal: Vec<Subset>,
}

impl IncreasingFamily {
    /// Reduces `edges` to its antichain of minimal members. The result is
    /// independent of input order. An empty edge list gives the empty family.
    pub fn new(ground: GroundSet, edges: Vec<Subset>) -> Result<Self> {
        for &e in &edges {
            ground.check(e)?;
        }
        let mut sorted = edges;
        sorted.sort_by_key(|e| (e.len(), *e));
        sorted.dedup();
        let mut minimal: Vec<Subset> = Vec::with_capacity(sorted.len());
        for e in sorted {
            if !minimal.iter().any(|m| m.is_subset_of(e)) {
                minimal.push(e);
            }
        }
        minimal.sort();
        Ok(Self { ground, minimal })
    }

    pub fn from_labels<S: AsRef<str>>(ground: GroundSet, edges: &[&[S]]) -> Result<Self> {
        let subsets = edges
            .iter()
            .map(|e| ground.subset(e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ground, subsets)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn minimal_edges(&self) -> &[Subset] {
        &self.minimal
    }

    pub fn len(&self) -> usize {
        self.minimal.len()
    }

    /// True for the empty family (no members at all).
    pub fn is_empty(&self) -> bool {
        self.minimal.is_empty()
    }

    /// True when ∅ is a minimal edge, i.e. `F = 2^X`.
    pub fn is_full(&self) -> bool {
        self.minimal.first().is_some_and(|e| e.is_empty())
    }

    /// Neither empty nor `2^X`.
    pub fn is_nontrivial(&self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    /// `ℓ(F)`: the largest minimal-edge size.
    pub fn ell(&self) -> Result<usize> {
        self.minimal
            .iter()
            .map(|e| e.len())
            .max()
            .ok_or(Error::UndefinedEll)
    }

    /// Union of the minimal edges; elements outside it never affect membership.
    pub fn support(&self) -> Subset {
        self.minimal.iter().fold(Subset::EMPTY, |acc, e| acc.union(*e))
    }

    pub fn contains(&self, t: Subset) -> Result<bool> {
        self.ground.check(t)?;
        Ok(self.contains_unchecked(t))
    }

    pub(crate) fn contains_unchecked(&self, t: Subset) -> bool {
        self.minimal.iter().any(|e| e.is_subset_of(t))
    }

    /// Membership in `F^rb`: `s` contains a minimal edge whose elements all
    /// received distinct colors.
    pub fn is_rainbow_member(&self, s: &ColoredSubset) -> Result<bool> {
        let colors = self.proper_coloring(s)?;
        let support = s.projection();
        Ok(self
            .minimal
            .iter()
            .any(|e| e.is_subset_of(support) && is_rainbow_on(*e, &colors)))
    }

    /// Membership in `F^all`: the projection of `s` lies in `F`.
    pub fn is_all_member(&self, s: &ColoredSubset) -> Result<bool> {
        self.proper_coloring(s)?;
        Ok(self.contains_unchecked(s.projection()))
    }

    fn proper_coloring(&self, s: &ColoredSubset) -> Result<Vec<u32>> {
        if s.ground_len() != self.ground.len() {
            return invalid("colored subset is over a different ground set");
        }
        if !s.is_proper() {
            return invalid("colored subset repeats an element");
        }
        let mut colors = vec![0u32; self.ground.len()];
        for &(x, c) in s.pairs() {
            colors[x] = c;
        }
        Ok(colors)
    }

    /// Number of `T ⊆ X` belonging to the family.
    pub fn count_members(&self) -> Result<u64> {
        let n = self.ground.len();
        if n > MAX_ENUMERATION_ELEMENTS {
            return capacity(format!(
                "member enumeration limited to {MAX_ENUMERATION_ELEMENTS} elements, got {n}"
            ));
        }
        // elements outside the support double the count each
        let support = self.support();
        let outside = n - support.len();
        let inside = support
            .subsets()
            .filter(|t| self.contains_unchecked(*t))
            .count() as u64;
        Ok(inside << outside)
    }

    /// The family viewed as a simple hypergraph of its minimal edges.
    pub fn to_hypergraph(&self) -> MultiHypergraph {
        MultiHypergraph::simple(self.ground.clone(), self.minimal.clone())
            .expect("minimal edges already validated")
    }
}

/// True when the elements of `e` carry pairwise distinct colors.
pub(crate) fn is_rainbow_on(e: Subset, colors: &[u32]) -> bool {
    let mut seen: u128 = 0;
    for x in e.iter() {
        let bit = 1u128 << (colors[x] - 1);
        if seen & bit != 0 {
            return false;
        }
        seen |= bit;
    }
    true
}

/// A set of `(element, color)` pairs over `X × [k]`, colors in `1..=k`.
///
/// Repeated elements are representable (they occur in the transversal
/// model) but such a set is not *proper*.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColoredSubset {
    n: usize,
    k: u32,
    pairs: BTreeSet<(usize, u32)>,
}

impl ColoredSubset {
    pub fn new<I: IntoIterator<Item = (usize, u32)>>(n: usize, k: u32, pairs: I) -> Result<Self> {
        if k == 0 {
            return invalid("color count k must be at least 1");
        }
        if k > MAX_COLORS {
            return capacity(format!("at most {MAX_COLORS} colors supported"));
        }
        let pairs: BTreeSet<(usize, u32)> = pairs.into_iter().collect();
        for &(x, c) in &pairs {
            if x >= n {
                return invalid(format!("element index {x} outside ground set of size {n}"));
            }
            if c == 0 || c > k {
                return invalid(format!("color {c} outside 1..={k}"));
            }
        }
        Ok(Self { n, k, pairs })
    }

    pub fn ground_len(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, u32)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// All first coordinates distinct.
    pub fn is_proper(&self) -> bool {
        self.projection().len() == self.pairs.len()
    }

    /// All colors distinct.
    pub fn is_rainbow(&self) -> bool {
        let colors: BTreeSet<u32> = self.pairs.iter().map(|&(_, c)| c).collect();
        colors.len() == self.pairs.len()
    }

    /// `S_X`: projection onto the ground set.
    pub fn projection(&self) -> Subset {
        self.pairs.iter().map(|&(x, _)| x).collect()
    }

    /// Per-element bitmask of present colors (bit `c-1` for color `c`).
    pub fn color_masks(&self) -> Vec<u128> {
        let mut masks = vec![0u128; self.n];
        for &(x, c) in &self.pairs {
            masks[x] |= 1u128 << (c - 1);
        }
        masks
    }
}

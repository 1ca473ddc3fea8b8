//! Small instances of the application families, plus seeded random and toy
//! families for property tests.
//!
//! Host-based families use the host's edges as ground elements; a family
//! member is a set of host edges. Structures with the same edge set merge
//! into one member with multiplicity equal to the number of structures.

use std::collections::{BTreeMap, HashMap};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{capacity, domain, invalid, Result};
use crate::family::{GroundSet, IncreasingFamily, MultiHypergraph, Subset, MAX_ELEMENTS};

/// Largest vertex count for permutation-based enumeration.
pub const MAX_ENUMERATION_VERTICES: usize = 9;

/// A simple `u`-uniform hypergraph on vertices `0..n` (`u = 2` for graphs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostGraph {
    n: usize,
    u: usize,
    edges: Vec<u64>,
    index: HashMap<u64, usize>,
}

fn vertex_mask(vs: &[usize]) -> u64 {
    vs.iter().fold(0u64, |m, &v| m | 1 << v)
}

fn mask_vertices(m: u64) -> Vec<usize> {
    (0..64).filter(|&v| m >> v & 1 == 1).collect()
}

impl HostGraph {
    pub fn new(n: usize, u: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || n > 64 {
            return invalid(format!("vertex count {n} must lie in 1..=64"));
        }
        if u == 0 || u > n {
            return invalid(format!("uniformity {u} must lie in 1..={n}"));
        }
        let mut masks = Vec::with_capacity(edges.len());
        for e in &edges {
            if e.iter().any(|&v| v >= n) {
                return invalid(format!("edge {e:?} has a vertex outside 0..{n}"));
            }
            let m = vertex_mask(e);
            if m.count_ones() as usize != u || e.len() != u {
                return invalid(format!("edge {e:?} is not a {u}-set"));
            }
            masks.push(m);
        }
        masks.sort_by_key(|&m| mask_vertices(m));
        if masks.windows(2).any(|w| w[0] == w[1]) {
            return invalid("host edges must be distinct");
        }
        let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(Self {
            n,
            u,
            edges: masks,
            index,
        })
    }

    /// `K_n^{(u)}`.
    pub fn complete(n: usize, u: usize) -> Result<Self> {
        if n > 64 {
            return invalid("at most 64 vertices");
        }
        let mut edges = Vec::new();
        let mut cur = Vec::new();
        fn walk(n: usize, u: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == u {
                out.push(cur.clone());
                return;
            }
            for v in start..n {
                cur.push(v);
                walk(n, u, v + 1, cur, out);
                cur.pop();
            }
        }
        walk(n, u, 0, &mut cur, &mut edges);
        Self::new(n, u, edges)
    }

    /// A graph (`u = 2`) from an edge list.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, 2, edges.iter().map(|&(a, b)| vec![a, b]).collect())
    }

    pub fn without_edges(&self, remove: &[Vec<usize>]) -> Result<Self> {
        let drop: Vec<u64> = remove.iter().map(|e| vertex_mask(e)).collect();
        let keep = self
            .edges
            .iter()
            .filter(|m| !drop.contains(m))
            .map(|&m| mask_vertices(m))
            .collect();
        Self::new(self.n, self.u, keep)
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn uniformity(&self) -> usize {
        self.u
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> Vec<Vec<usize>> {
        self.edges.iter().map(|&m| mask_vertices(m)).collect()
    }

    fn edge_index(&self, vs: &[usize]) -> Option<usize> {
        self.index.get(&vertex_mask(vs)).copied()
    }

    fn has_edge(&self, vs: &[usize]) -> bool {
        self.edge_index(vs).is_some()
    }

    /// Labels vertices from 1; single digits are concatenated (`"12"`).
    pub fn edge_label(&self, i: usize) -> String {
        let vs = mask_vertices(self.edges[i]);
        let parts: Vec<String> = vs.iter().map(|v| (v + 1).to_string()).collect();
        if self.n <= 9 {
            parts.concat()
        } else {
            parts.join("-")
        }
    }

    /// The ground set whose elements are this host's edges.
    pub fn edge_ground(&self) -> Result<GroundSet> {
        if self.edges.is_empty() {
            return invalid("host has no edges");
        }
        if self.edges.len() > MAX_ELEMENTS {
            return capacity(format!("host has {} edges, at most {MAX_ELEMENTS} supported", self.edges.len()));
        }
        GroundSet::new((0..self.edges.len()).map(|i| self.edge_label(i)))
    }

    /// `d(T)`: edges containing `T`.
    pub fn degree(&self, t: &[usize]) -> Result<usize> {
        if t.iter().any(|&v| v >= self.n) {
            return invalid("vertex out of range");
        }
        let m = vertex_mask(t);
        if m.count_ones() as usize >= self.u {
            return domain(format!("|T| = {} must be below the uniformity {}", m.count_ones(), self.u));
        }
        Ok(self.edges.iter().filter(|&&e| e & m == m).count())
    }

    /// `δ_ℓ = min_{|T| = ℓ} d(T)`.
    pub fn min_degree_ell(&self, ell: usize) -> Result<usize> {
        if ell >= self.u {
            return domain(format!("ℓ = {ell} must be below the uniformity {}", self.u));
        }
        let mut best = usize::MAX;
        for_each_subset(self.n, ell, &mut |t| {
            best = best.min(self.degree(t).expect("valid subset"));
        });
        Ok(best)
    }
}

fn for_each_subset(n: usize, size: usize, f: &mut dyn FnMut(&[usize])) {
    fn walk(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for v in start..n {
            cur.push(v);
            walk(n, size, v + 1, cur, f);
            cur.pop();
        }
    }
    walk(n, size, 0, &mut Vec::new(), f);
}

/// Calls `f` on each cyclic order of `0..n` up to rotation and reflection:
/// vertex 0 first and the second vertex below the last.
fn for_each_cyclic_order(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn walk(n: usize, order: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize])) {
        if order.len() == n {
            if n < 3 || order[1] < order[n - 1] {
                f(order);
            }
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                order.push(v);
                walk(n, order, used, f);
                order.pop();
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; n];
    used[0] = true;
    walk(n, &mut vec![0], &mut used, f);
}

fn collect_members(ground: GroundSet, members: BTreeMap<Subset, u64>) -> Result<MultiHypergraph> {
    MultiHypergraph::new(ground, members.into_iter().collect())
}

fn check_cycle_size(n: usize) -> Result<()> {
    if n < 3 {
        return invalid(format!("cycles need n ≥ 3, got {n}"));
    }
    if n > MAX_ENUMERATION_VERTICES {
        return capacity(format!("cycle enumeration limited to n ≤ {MAX_ENUMERATION_VERTICES}"));
    }
    Ok(())
}

/// Hamilton cycles of `K_n` as sets of `K_n` edges: `(n-1)!/2` members.
pub fn hamilton_cycles(n: usize) -> Result<MultiHypergraph> {
    power_hamilton(n, 1)
}

/// `rp`-th powers of Hamilton cycles of `K_n`: each vertex pair at cyclic
/// distance at most `rp` is an edge. Cycles with the same power merge.
pub fn power_hamilton(n: usize, rp: usize) -> Result<MultiHypergraph> {
    check_cycle_size(n)?;
    if rp == 0 {
        return invalid("power must be at least 1");
    }
    let host = HostGraph::complete(n, 2)?;
    let ground = host.edge_ground()?;
    let mut members: BTreeMap<Subset, u64> = BTreeMap::new();
    for_each_cyclic_order(n, &mut |order| {
        let mut s = Subset::EMPTY;
        for i in 0..n {
            for d in 1..=rp.min(n / 2) {
                let e = host.edge_index(&[order[i], order[(i + d) % n]]).expect("complete host");
                s.insert(e);
            }
        }
        *members.entry(s).or_insert(0) += 1;
    });
    collect_members(ground, members)
}

/// Hamilton `ℓ`-cycles of `K_n^{(u)}`: for a cyclic vertex order, the
/// hyperedges `{v_{i(u-ℓ)+1}, ..., v_{i(u-ℓ)+u}}`, `i = 0..n/(u-ℓ)`.
/// Distinct hyperedge sets are kept once.
pub fn ell_cycles(n: usize, u: usize, ell: usize) -> Result<MultiHypergraph> {
    if ell == 0 || ell >= u {
        return invalid(format!("need 1 ≤ ℓ < u, got ℓ = {ell}, u = {u}"));
    }
    if n <= u {
        return invalid(format!("need n > u, got n = {n}, u = {u}"));
    }
    let step = u - ell;
    if !n.is_multiple_of(step) {
        return domain(format!("u - ℓ = {step} does not divide n = {n}"));
    }
    check_cycle_size(n)?;
    let host = HostGraph::complete(n, u)?;
    let ground = host.edge_ground()?;
    let t = n / step;
    let mut members: BTreeMap<Subset, u64> = BTreeMap::new();
    for_each_cyclic_order(n, &mut |order| {
        let mut s = Subset::EMPTY;
        for i in 0..t {
            let vs: Vec<usize> = (0..u).map(|j| order[(i * step + j) % n]).collect();
            s.insert(host.edge_index(&vs).expect("complete host"));
        }
        members.insert(s, 1);
    });
    collect_members(ground, members)
}

/// Perfect matchings of the host.
pub fn perfect_matchings(host: &HostGraph) -> Result<MultiHypergraph> {
    if !host.n.is_multiple_of(host.u) {
        return domain(format!("uniformity {} does not divide {} vertices", host.u, host.n));
    }
    let ground = host.edge_ground()?;
    let mut members: BTreeMap<Subset, u64> = BTreeMap::new();
    let full = if host.n == 64 { u64::MAX } else { (1u64 << host.n) - 1 };
    let mut count = 0usize;
    fn walk(host: &HostGraph, covered: u64, full: u64, cur: Subset, out: &mut BTreeMap<Subset, u64>, count: &mut usize) -> Result<()> {
        if covered == full {
            out.insert(cur, 1);
            *count += 1;
            if *count > 10_000_000 {
                return capacity("too many perfect matchings");
            }
            return Ok(());
        }
        let v = (!covered).trailing_zeros();
        for (i, &e) in host.edges.iter().enumerate() {
            if e >> v & 1 == 1 && e & covered == 0 {
                let mut next = cur;
                next.insert(i);
                walk(host, covered | e, full, next, out, count)?;
            }
        }
        Ok(())
    }
    walk(host, 0, full, Subset::EMPTY, &mut members, &mut count)?;
    if members.is_empty() {
        return domain("host has no perfect matching");
    }
    collect_members(ground, members)
}

/// Distinct edge-set images of spanning embeddings of `tree` into `host`.
pub fn tree_embeddings(host: &HostGraph, tree: &HostGraph) -> Result<MultiHypergraph> {
    if host.u != 2 || tree.u != 2 {
        return invalid("tree embeddings need graphs");
    }
    if tree.n != host.n {
        return invalid("the tree must span the host");
    }
    if tree.n > 8 {
        return capacity("tree embeddings limited to 8 vertices");
    }
    if tree.edges.len() + 1 != tree.n || !connected(tree) {
        return invalid("the pattern is not a tree");
    }
    let ground = host.edge_ground()?;
    let tree_edges: Vec<(usize, usize)> = tree
        .edges()
        .into_iter()
        .map(|e| (e[0], e[1]))
        .collect();
    let mut members: BTreeMap<Subset, u64> = BTreeMap::new();
    let n = host.n;
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn walk(
        v: usize,
        n: usize,
        host: &HostGraph,
        tree_edges: &[(usize, usize)],
        image: &mut [usize],
        used: &mut [bool],
        out: &mut BTreeMap<Subset, u64>,
    ) {
        if v == n {
            let mut s = Subset::EMPTY;
            for &(a, b) in tree_edges {
                s.insert(host.edge_index(&[image[a], image[b]]).expect("checked"));
            }
            out.insert(s, 1);
            return;
        }
        for w in 0..n {
            if used[w] {
                continue;
            }
            // tree edges back to already-placed vertices must land on host edges
            let ok = tree_edges.iter().all(|&(a, b)| {
                let other = if a == v { b } else if b == v { a } else { return true };
                other > v || host.has_edge(&[w, image[other]])
            });
            if !ok {
                continue;
            }
            used[w] = true;
            image[v] = w;
            walk(v + 1, n, host, tree_edges, image, used, out);
            used[w] = false;
        }
        image[v] = usize::MAX;
    }
    walk(0, n, host, &tree_edges, &mut image, &mut used, &mut members);
    if members.is_empty() {
        return domain("the host has no spanning copy of the tree");
    }
    collect_members(ground, members)
}

fn connected(g: &HostGraph) -> bool {
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let mut next = 0u64;
        for &e in &g.edges {
            if e & frontier != 0 {
                next |= e;
            }
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen.count_ones() as usize == g.n
}

/// Seeded random antichain on `n` alphabetic elements: between 1 and
/// `max_edges` random sets of size 1 to `max_size`, then reduced.
pub fn random_family(n: usize, max_edges: usize, max_size: usize, seed: u64) -> Result<IncreasingFamily> {
    if max_edges == 0 || max_size == 0 {
        return invalid("random families need at least one edge of size at least one");
    }
    let ground = GroundSet::alphabetic(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=max_edges);
    let edges = (0..m)
        .map(|_| {
            let size = rng.gen_range(1..=max_size.min(n));
            Subset::from_indices(sample(&mut rng, n, size)).expect("indices below n")
        })
        .collect();
    IncreasingFamily::new(ground, edges)
}

/// One edge of size `r`.
pub fn single_edge(r: usize) -> Result<IncreasingFamily> {
    let ground = GroundSet::alphabetic(r)?;
    IncreasingFamily::new(ground, vec![Subset::prefix(r)])
}

/// `petals` edges of size `edge_size` sharing exactly the first `core`
/// elements.
pub fn sunflower(core: usize, petals: usize, edge_size: usize) -> Result<IncreasingFamily> {
    if petals == 0 || edge_size <= core {
        return invalid("a sunflower needs at least one petal and edges larger than the core");
    }
    let extra = edge_size - core;
    let ground = GroundSet::alphabetic(core + petals * extra)?;
    let edges = (0..petals)
        .map(|i| {
            Subset::from_indices((0..core).chain(core + i * extra..core + (i + 1) * extra)).expect("within ground")
        })
        .collect();
    IncreasingFamily::new(ground, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> u64 {
        (1..=n).product()
    }

    #[test]
    fn host_degrees() {
        let k4 = HostGraph::complete(4, 2).unwrap();
        assert_eq!(k4.min_degree_ell(1).unwrap(), 3);
        let k5 = HostGraph::complete(5, 3).unwrap();
        assert_eq!(k5.min_degree_ell(2).unwrap(), 3);
        assert!(k4.min_degree_ell(2).is_err());
        let g = k4.without_edges(&[vec![0, 1]]).unwrap();
        assert_eq!(g.degree(&[0]).unwrap(), 2);
        assert_eq!(g.min_degree_ell(1).unwrap(), 2);
        assert_eq!(k4.edge_label(0), "12");
    }

    #[test]
    fn hamilton_counts_and_structure() {
        for n in 3..=7 {
            let h = hamilton_cycles(n).unwrap();
            assert_eq!(h.size(), factorial(n as u64 - 1) / 2);
            assert_eq!(h.distinct_len() as u64, h.size());
            assert!(h.is_uniform() && h.rank() == n);
            let host = HostGraph::complete(n, 2).unwrap();
            let edges = host.edges();
            for &(e, _) in h.edges() {
                let mut deg = vec![0; n];
                for i in e.iter() {
                    deg[edges[i][0]] += 1;
                    deg[edges[i][1]] += 1;
                }
                assert!(deg.iter().all(|&d| d == 2));
            }
        }
    }

    #[test]
    fn power_of_five_cycle_collapses() {
        let h = power_hamilton(5, 2).unwrap();
        assert_eq!(h.distinct_len(), 1);
        assert_eq!(h.size(), 12);
        assert_eq!(h.rank(), 10);
        let h7 = power_hamilton(7, 2).unwrap();
        assert!(h7.edges().iter().all(|(e, _)| e.len() == 14));
        assert_eq!(power_hamilton(6, 1).unwrap(), hamilton_cycles(6).unwrap());
    }

    #[test]
    fn ell_cycles_shapes() {
        let h = ell_cycles(6, 3, 2).unwrap();
        assert!(h.edges().iter().all(|(e, _)| e.len() == 6));
        assert_eq!(h.ground().len(), 20);
        let g = ell_cycles(6, 2, 1).unwrap();
        assert_eq!(g.edges(), hamilton_cycles(6).unwrap().edges());
        assert!(matches!(ell_cycles(7, 3, 1), Err(crate::error::Error::Domain(_))));
    }

    #[test]
    fn matchings_counts() {
        assert_eq!(perfect_matchings(&HostGraph::complete(4, 2).unwrap()).unwrap().size(), 3);
        assert_eq!(perfect_matchings(&HostGraph::complete(6, 2).unwrap()).unwrap().size(), 15);
        // K6^(3): choose the triple with vertex 0, the rest is forced
        assert_eq!(perfect_matchings(&HostGraph::complete(6, 3).unwrap()).unwrap().size(), 10);
        assert!(perfect_matchings(&HostGraph::complete(5, 2).unwrap()).is_err());
    }

    #[test]
    fn tree_images() {
        let k3 = HostGraph::complete(3, 2).unwrap();
        let p3 = HostGraph::graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(tree_embeddings(&k3, &p3).unwrap().size(), 3);
        assert_eq!(tree_embeddings(&p3, &p3).unwrap().size(), 1);
        let k4 = HostGraph::complete(4, 2).unwrap();
        let star = HostGraph::graph(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(tree_embeddings(&k4, &star).unwrap().size(), 4);
    }

    #[test]
    fn toy_families() {
        assert_eq!(single_edge(3).unwrap().ell().unwrap(), 3);
        let s = sunflower(1, 2, 2).unwrap();
        let want = IncreasingFamily::from_labels(GroundSet::alphabetic(3).unwrap(), &[&["a", "b"], &["a", "c"]]).unwrap();
        assert_eq!(s, want);
        assert_eq!(random_family(8, 6, 4, 9).unwrap(), random_family(8, 6, 4, 9).unwrap());
        let f = random_family(8, 6, 4, 9).unwrap();
        assert!(f.len() <= 6 && f.ell().unwrap() <= 4);
    }
}

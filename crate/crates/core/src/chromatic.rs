//! Proper-coloring counts of small graphs.
//!
//! Graphs are adjacency bitmasks (`adj[v]` has bit `w` set iff `vw` is an
//! edge). Simplicial vertices are peeled off in closed form, components are
//! multiplied, and whatever remains is split by deletion–contraction
//! (addition–contraction on dense graphs) with a memo keyed by the
//! compacted adjacency form.

use std::collections::HashMap;

use crate::error::{capacity, invalid, Result};

/// Largest graph handed to the counter.
pub const MAX_CONFLICT_VERTICES: usize = 16;

#[derive(Debug)]
pub struct ChromaticCounter {
    k: i128,
    memo: HashMap<Vec<u32>, i128>,
}

impl ChromaticCounter {
    pub fn new(k: u64) -> Self {
        Self {
            k: k as i128,
            memo: HashMap::new(),
        }
    }

    pub fn colors(&self) -> u64 {
        self.k as u64
    }

    /// Number of proper colorings of the graph with `k` colors.
    pub fn count(&mut self, adj: &[u32]) -> Result<i128> {
        let n = adj.len();
        if n > MAX_CONFLICT_VERTICES {
            return capacity(format!(
                "conflict graph has {n} vertices, cap is {MAX_CONFLICT_VERTICES}"
            ));
        }
        let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        for (v, &row) in adj.iter().enumerate() {
            if row & !all != 0 || row >> v & 1 == 1 {
                return invalid("adjacency has loops or out-of-range vertices");
            }
            for w in bits(row) {
                if adj[w] >> v & 1 == 0 {
                    return invalid("adjacency is not symmetric");
                }
            }
        }
        Ok(self.solve(adj.to_vec()))
    }

    fn solve(&mut self, mut g: Vec<u32>) -> i128 {
        let mut factor: i128 = 1;
        // peel simplicial vertices: P(G) = (k - deg v) P(G - v)
        'peel: loop {
            for v in 0..g.len() {
                let nbrs = g[v];
                if is_clique(&g, nbrs) {
                    let deg = nbrs.count_ones() as i128;
                    if deg >= self.k {
                        return 0;
                    }
                    factor *= self.k - deg;
                    g = remove_vertex(&g, v);
                    continue 'peel;
                }
            }
            break;
        }
        if g.is_empty() {
            return factor;
        }
        let comps = components(&g);
        if comps.len() > 1 {
            let mut prod = factor;
            for c in comps {
                let sub = induced(&g, c);
                prod *= self.solve(sub);
                if prod == 0 {
                    return 0;
                }
            }
            return prod;
        }
        if let Some(&v) = self.memo.get(&g) {
            return factor * v;
        }
        let n = g.len();
        let edges: u32 = g.iter().map(|r| r.count_ones()).sum::<u32>() / 2;
        let value = if 2 * edges as usize > n * (n - 1) / 2 {
            let (u, v) = first_non_edge(&g).expect("non-complete graph has a non-edge");
            let mut plus = g.clone();
            plus[u] |= 1 << v;
            plus[v] |= 1 << u;
            self.solve(plus) + self.solve(contract(&g, u, v))
        } else {
            let (u, v) = first_edge(&g).expect("graph without simplicial vertices has an edge");
            let mut minus = g.clone();
            minus[u] &= !(1 << v);
            minus[v] &= !(1 << u);
            self.solve(minus) - self.solve(contract(&g, u, v))
        };
        self.memo.insert(g, value);
        factor * value
    }
}

fn bits(mut m: u32) -> impl Iterator<Item = usize> {
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

fn is_clique(g: &[u32], set: u32) -> bool {
    bits(set).all(|w| set & !(1 << w) & !g[w] == 0)
}

fn remove_vertex(g: &[u32], v: usize) -> Vec<u32> {
    let low = (1u32 << v) - 1;
    g.iter()
        .enumerate()
        .filter(|&(w, _)| w != v)
        .map(|(_, &m)| (m & low) | ((m >> (v + 1)) << v))
        .collect()
}

/// Merges `v` into `u`.
fn contract(g: &[u32], u: usize, v: usize) -> Vec<u32> {
    let mut h = g.to_vec();
    let merged = (h[u] | h[v]) & !(1 << u) & !(1 << v);
    h[u] = merged;
    for w in bits(merged) {
        h[w] |= 1 << u;
    }
    remove_vertex(&h, v)
}

fn components(g: &[u32]) -> Vec<u32> {
    let n = g.len();
    let mut unseen: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut out = Vec::new();
    while unseen != 0 {
        let start = unseen.trailing_zeros() as usize;
        let mut comp = 1u32 << start;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0;
            for w in bits(frontier) {
                next |= g[w];
            }
            frontier = next & !comp;
            comp |= next;
        }
        unseen &= !comp;
        out.push(comp);
    }
    out
}

fn induced(g: &[u32], keep: u32) -> Vec<u32> {
    let idx: Vec<usize> = bits(keep).collect();
    idx.iter()
        .map(|&v| {
            idx.iter()
                .enumerate()
                .filter(|&(_, &w)| g[v] >> w & 1 == 1)
                .fold(0u32, |acc, (j, _)| acc | 1 << j)
        })
        .collect()
}

fn first_edge(g: &[u32]) -> Option<(usize, usize)> {
    g.iter()
        .enumerate()
        .find(|(_, &m)| m != 0)
        .map(|(u, &m)| (u, m.trailing_zeros() as usize))
}

fn first_non_edge(g: &[u32]) -> Option<(usize, usize)> {
    let n = g.len();
    (0..n).find_map(|u| ((u + 1)..n).find(|&v| g[u] >> v & 1 == 0).map(|v| (u, v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(adj: &[u32], k: u64) -> i128 {
        let n = adj.len();
        let mut colors = vec![0u64; n];
        let mut count = 0i128;
        loop {
            let ok = (0..n).all(|v| bits(adj[v]).all(|w| colors[v] != colors[w]));
            if ok {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                colors[i] += 1;
                if colors[i] < k {
                    break;
                }
                colors[i] = 0;
                i += 1;
            }
        }
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> Vec<u32> {
        let mut g = vec![0u32; n];
        for &(u, v) in edges {
            g[u] |= 1 << v;
            g[v] |= 1 << u;
        }
        g
    }

    #[test]
    fn closed_forms() {
        let mut c = ChromaticCounter::new(3);
        assert_eq!(c.count(&graph(3, &[(0, 1), (1, 2), (0, 2)])).unwrap(), 6);
        assert_eq!(c.count(&graph(2, &[])).unwrap(), 9);
        // C4 at k: (k-1)^4 + (k-1)
        assert_eq!(c.count(&graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])).unwrap(), 18);
        assert_eq!(c.count(&[]).unwrap(), 1);
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        // all graphs on 5 vertices from a fixed edge order, sampled by mask
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|u| ((u + 1)..5).map(move |v| (u, v))).collect();
        for mask in (0u32..1 << pairs.len()).step_by(7) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let g = graph(5, &edges);
            for k in 1..=4 {
                let mut c = ChromaticCounter::new(k);
                assert_eq!(c.count(&g).unwrap(), brute(&g, k), "mask {mask} k {k}");
            }
        }
    }

    #[test]
    fn petersen_like_non_chordal() {
        // C5 plus a pendant: (k-1)^5 - (k-1) for C5 times (k-1)
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)]);
        let mut c = ChromaticCounter::new(3);
        assert_eq!(c.count(&g).unwrap(), 30 * 2);
        assert_eq!(c.count(&g).unwrap(), brute(&g, 3));
    }

    #[test]
    fn rejects_bad_adjacency() {
        let mut c = ChromaticCounter::new(2);
        assert!(c.count(&[0b10, 0]).is_err());
        assert!(c.count(&[0; 17]).is_err());
    }
}

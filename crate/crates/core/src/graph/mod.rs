//! Bounded-degree simple graphs, vertex colorings and graph-level metrics.

mod enumerate;
mod generators;
mod io;

pub use enumerate::{all_graphs, all_regular_graphs, canonical_graph_code};
pub use generators::{
    gen_complete, gen_cycle, gen_disjoint_union, gen_path, gen_random_regular,
    RANDOM_REGULAR_ATTEMPTS,
};
pub use io::{parse_coloring, parse_graph, write_coloring, write_graph};

use std::collections::VecDeque;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable simple graph with an enforced degree bound.
///
/// Vertices are dense `0..n` indices; neighbor lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundedGraph {
    d_max: usize,
    adjacency: Vec<Vec<usize>>,
}

impl BoundedGraph {
    /// Validates and builds a graph. Duplicate pairs (in either orientation)
    /// collapse to a single edge.
    pub fn new(n: usize, edges: &[(usize, usize)], d_max: usize) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(adjacency, d_max)
    }

    /// Builds from neighbor lists, checking every invariant.
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>, d_max: usize) -> Result<Self> {
        let n = adjacency.len();
        for list in &mut adjacency {
            list.sort_unstable();
        }
        for (u, list) in adjacency.iter().enumerate() {
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Invalid(format!("duplicate neighbor at vertex {u}")));
            }
            if list.len() > d_max {
                return Err(Error::DegreeExceeded(u));
            }
            for &v in list {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if v == u {
                    return Err(Error::SelfLoop(u));
                }
                if adjacency[v].binary_search(&u).is_err() {
                    return Err(Error::Invalid(format!("edge {u}->{v} has no reverse")));
                }
            }
        }
        Ok(Self { d_max, adjacency })
    }

    /// Re-checks all structural invariants.
    pub fn validate(&self) -> Result<()> {
        Self::from_adjacency(self.adjacency.clone(), self.d_max).map(|_| ())
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adjacency.first().map(Vec::len)?;
        self.adjacency.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Component label per vertex (labels ordered by smallest member) and the
    /// number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        let (label, count) = self.components();
        let mut sizes = vec![0; count];
        for l in label {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().1 == 1
    }

    /// BFS distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within distance `r` of `v`, in BFS order (root first).
    pub fn ball_vertices(&self, v: usize, r: usize) -> Vec<usize> {
        let mut order = vec![v];
        let mut depth = vec![0usize];
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            let du = depth[head];
            head += 1;
            if du == r {
                continue;
            }
            for &w in &self.adjacency[u] {
                if !order.contains(&w) {
                    order.push(w);
                    depth.push(du + 1);
                }
            }
        }
        order
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: perm.len(),
            });
        }
        let mut adjacency = vec![Vec::new(); n];
        for (u, list) in self.adjacency.iter().enumerate() {
            adjacency[perm[u]] = list.iter().map(|&v| perm[v]).collect();
        }
        Self::from_adjacency(adjacency, self.d_max)
    }

    /// The induced subgraph on vertices where `keep` is true, renumbered in
    /// increasing order of original index.
    pub fn induced(&self, keep: &[bool]) -> (Self, Vec<usize>) {
        let mut index = vec![usize::MAX; self.n()];
        let mut originals = Vec::new();
        for v in 0..self.n() {
            if keep[v] {
                index[v] = originals.len();
                originals.push(v);
            }
        }
        let adjacency = originals
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter(|&&w| keep[w])
                    .map(|&w| index[w])
                    .collect()
            })
            .collect();
        (
            Self {
                d_max: self.d_max,
                adjacency,
            },
            originals,
        )
    }
}

/// Normalized edit distance `|E(G1) △ E(G2)| / n` on a shared vertex set.
pub fn edit_distance(g1: &BoundedGraph, g2: &BoundedGraph) -> Result<Ratio<u64>> {
    if g1.n() != g2.n() {
        return Err(Error::SizeMismatch {
            expected: g1.n(),
            actual: g2.n(),
        });
    }
    if g1.n() == 0 {
        return Ok(Ratio::from_integer(0));
    }
    let mut diff = 0u64;
    for u in 0..g1.n() {
        let (a, b) = (g1.neighbors(u), g2.neighbors(u));
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    diff += u64::from(*x > u);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    diff += u64::from(*y > u);
                    j += 1;
                }
                (Some(x), None) => {
                    diff += u64::from(*x > u);
                    i += 1;
                }
                (None, Some(y)) => {
                    diff += u64::from(*y > u);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
    }
    Ok(Ratio::new(diff, g1.n() as u64))
}

/// A vertex coloring with palette `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexColoring {
    k: u32,
    colors: Vec<u32>,
}

impl VertexColoring {
    pub fn new(k: u32, colors: Vec<u32>) -> Result<Self> {
        if let Some((vertex, &color)) = colors
            .iter()
            .enumerate()
            .find(|(_, &c)| c == 0 || c > k)
        {
            return Err(Error::InvalidColor { vertex, color, k });
        }
        Ok(Self { k, colors })
    }

    pub fn constant(n: usize, k: u32, color: u32) -> Result<Self> {
        Self::new(k, vec![color; n])
    }

    /// The `index`-th of the `k^n` colorings in base-`k` order (vertex 0 is
    /// the least significant digit).
    pub fn from_index(n: usize, k: u32, mut index: u64) -> Self {
        let mut colors = Vec::with_capacity(n);
        for _ in 0..n {
            colors.push((index % u64::from(k)) as u32 + 1);
            index /= u64::from(k);
        }
        Self { k, colors }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn get(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.colors.len() == n {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                expected: n,
                actual: self.colors.len(),
            })
        }
    }

    /// Recolored copy; `v` moves to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut colors = vec![0; self.colors.len()];
        for (v, &c) in self.colors.iter().enumerate() {
            colors[perm[v]] = c;
        }
        Self { k: self.k, colors }
    }

    /// Product coloring: pair `(a, b)` maps to `(b - 1) * self.k + a`.
    pub fn product(&self, other: &VertexColoring) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        let colors = self
            .colors
            .iter()
            .zip(&other.colors)
            .map(|(&a, &b)| (b - 1) * self.k + a)
            .collect();
        Ok(Self {
            k: self.k * other.k,
            colors,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_c4() {
        let g = BoundedGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], 2).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert!((0..4).all(|v| g.degree(v) == 2));
        assert_eq!(g.neighbors(0), &[1, 3]);
    }

    #[test]
    fn dedups_reversed_pairs() {
        let g = BoundedGraph::new(2, &[(0, 1), (1, 0)], 1).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
    }

    #[test]
    fn rejects_self_loop_and_degree_overflow() {
        assert_eq!(
            BoundedGraph::new(3, &[(0, 0)], 2).unwrap_err(),
            Error::SelfLoop(0)
        );
        assert_eq!(
            BoundedGraph::new(3, &[(0, 1), (0, 2)], 1).unwrap_err(),
            Error::DegreeExceeded(0)
        );
        assert!(matches!(
            BoundedGraph::new(2, &[(0, 2)], 1),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn edit_distance_examples() {
        let c4 = gen_cycle(4).unwrap();
        assert_eq!(edit_distance(&c4, &c4).unwrap(), Ratio::from_integer(0));
        let p4 = BoundedGraph::new(4, &[(0, 1), (1, 2), (2, 3)], 2).unwrap();
        assert_eq!(edit_distance(&c4, &p4).unwrap(), Ratio::new(1, 4));
        let empty = BoundedGraph::new(2, &[], 1).unwrap();
        let k2 = gen_complete(2).unwrap();
        assert_eq!(edit_distance(&empty, &k2).unwrap(), Ratio::new(1, 2));
        assert!(matches!(
            edit_distance(&k2, &c4),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn coloring_validation_and_indexing() {
        assert!(VertexColoring::new(2, vec![1, 3]).is_err());
        assert!(VertexColoring::new(2, vec![0]).is_err());
        let c = VertexColoring::from_index(3, 2, 0b101);
        assert_eq!(c.colors(), &[2, 1, 2]);
    }

    #[test]
    fn ball_vertices_bfs_order() {
        let g = gen_path(5).unwrap();
        assert_eq!(g.ball_vertices(2, 1), vec![2, 1, 3]);
        assert_eq!(g.ball_vertices(0, 2), vec![0, 1, 2]);
    }
}

use std::collections::HashSet;

use rand::seq::SliceRandom;

use super::BoundedGraph;
use crate::error::{Error, Result};
use crate::rng::rng_from;

/// Attempts the configuration model makes before giving up.
pub const RANDOM_REGULAR_ATTEMPTS: usize = 10_000;

fn require_vertices(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Infeasible("generators need n >= 1".into()))
    } else {
        Ok(())
    }
}

/// Cycle on `n` vertices with degree bound 2. For `n < 3` the simple-graph
/// analogue is returned (a single vertex or a single edge).
pub fn gen_cycle(n: usize) -> Result<BoundedGraph> {
    require_vertices(n)?;
    let mut edges: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if n >= 3 {
        edges.push((n - 1, 0));
    }
    BoundedGraph::new(n, &edges, 2)
}

pub fn gen_path(n: usize) -> Result<BoundedGraph> {
    require_vertices(n)?;
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    BoundedGraph::new(n, &edges, 2)
}

pub fn gen_complete(n: usize) -> Result<BoundedGraph> {
    require_vertices(n)?;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    BoundedGraph::new(n, &edges, n - 1)
}

/// `G1 ∪ G2` with the vertices of `G2` shifted by `|V(G1)|`.
pub fn gen_disjoint_union(g1: &BoundedGraph, g2: &BoundedGraph) -> BoundedGraph {
    let offset = g1.n();
    let mut adjacency = g1.adjacency.clone();
    adjacency.extend(
        g2.adjacency
            .iter()
            .map(|list| list.iter().map(|&v| v + offset).collect()),
    );
    BoundedGraph {
        d_max: g1.d_max.max(g2.d_max),
        adjacency,
    }
}

/// Uniform `d`-regular simple graph via the configuration model, rejecting
/// any pairing with a loop or a repeated edge.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<BoundedGraph> {
    if (n * d) % 2 == 1 {
        return Err(Error::Infeasible(format!("n*d = {} is odd", n * d)));
    }
    if d >= n && !(n == 1 && d == 0) {
        return Err(Error::Infeasible(format!("degree {d} needs more than {n} vertices")));
    }
    let mut rng = rng_from(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    let mut seen = HashSet::with_capacity(n * d / 2);
    'attempt: for _ in 0..RANDOM_REGULAR_ATTEMPTS {
        points.shuffle(&mut rng);
        seen.clear();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return BoundedGraph::new(n, &edges, d);
    }
    Err(Error::RetryExhausted(RANDOM_REGULAR_ATTEMPTS))
}

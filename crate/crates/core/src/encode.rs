//! Edge colorings encoded as vertex colorings.
//!
//! An edge coloring `c: E → [k]` is first refined to `c1 = c + k·(j − 1)`
//! where `j` properly colors, within each color class of `c`, the edges at
//! distance at most 2 in the line graph. Equal `c1` values then sit on edges
//! at line-graph distance at least 3, so for every edge `uv` the sets
//! `c2(u) = {c1(e) : e ∋ u}` and `c2(v)` meet in exactly `{c1(uv)}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BoundedGraph;

/// Colors `1..=k` on the edges of a graph, keyed by `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    k: u32,
    colors: BTreeMap<(usize, usize), u32>,
}

impl EdgeColoring {
    /// Validates that every edge of `g` is colored exactly once.
    pub fn new(g: &BoundedGraph, k: u32, entries: &[((usize, usize), u32)]) -> Result<Self> {
        let mut colors = BTreeMap::new();
        for &((a, b), color) in entries {
            let key = (a.min(b), a.max(b));
            if !(a < g.n() && b < g.n() && g.has_edge(a, b)) {
                return Err(Error::Invalid(format!("({a}, {b}) is not an edge")));
            }
            if color == 0 || color > k {
                return Err(Error::InvalidColor {
                    vertex: key.0,
                    color,
                    k,
                });
            }
            if colors.insert(key, color).is_some() {
                return Err(Error::Invalid(format!("edge ({a}, {b}) colored twice")));
            }
        }
        if colors.len() != g.edge_count() {
            return Err(Error::SizeMismatch {
                expected: g.edge_count(),
                actual: colors.len(),
            });
        }
        Ok(Self { k, colors })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        self.colors.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.colors.iter().map(|(&e, &c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// A set of colors per vertex; `sets[v]` holds the `c1`-colors at `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSetColoring {
    palette: u32,
    sets: Vec<BTreeSet<u32>>,
}

impl VertexSetColoring {
    pub fn new(palette: u32, sets: Vec<BTreeSet<u32>>) -> Self {
        Self { palette, sets }
    }

    pub fn palette(&self) -> u32 {
        self.palette
    }

    pub fn set(&self, v: usize) -> &BTreeSet<u32> {
        &self.sets[v]
    }

    pub fn sets(&self) -> &[BTreeSet<u32>] {
        &self.sets
    }

    pub fn set_mut(&mut self, v: usize) -> &mut BTreeSet<u32> {
        &mut self.sets[v]
    }
}

/// `30 d³ k`, the palette allowed for `c1`.
pub fn palette_limit(d: usize, k: u32) -> u64 {
    30 * (d.max(1) as u64).pow(3) * u64::from(k)
}

/// Returns `(c1, c2)`.
pub fn encode_edge_coloring(
    g: &BoundedGraph,
    c: &EdgeColoring,
) -> Result<(EdgeColoring, VertexSetColoring)> {
    let k = c.k();
    let mut layer: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for ((u, v), color) in c.iter() {
        let mut used: Vec<u32> = Vec::new();
        for &x in [u, v].iter().chain(g.neighbors(u)).chain(g.neighbors(v)) {
            for &y in g.neighbors(x) {
                let f = (x.min(y), x.max(y));
                if f == (u, v) || c.get(f.0, f.1) != Some(color) {
                    continue;
                }
                if let Some(&j) = layer.get(&f) {
                    used.push(j);
                }
            }
        }
        used.sort_unstable();
        used.dedup();
        let mut j = 1;
        for x in used {
            if x == j {
                j += 1;
            } else if x > j {
                break;
            }
        }
        layer.insert((u, v), j);
    }
    let layers = layer.values().copied().max().unwrap_or(1);
    let needed = u64::from(k) * u64::from(layers);
    let bound = palette_limit(g.max_degree(), k);
    if needed > bound {
        return Err(Error::PaletteOverflow { needed, bound });
    }
    let palette = needed as u32;
    let c1 = EdgeColoring {
        k: palette,
        colors: c
            .iter()
            .map(|(e, color)| (e, color + k * (layer[&e] - 1)))
            .collect(),
    };
    let mut sets = vec![BTreeSet::new(); g.n()];
    for ((u, v), x) in c1.iter() {
        sets[u].insert(x);
        sets[v].insert(x);
    }
    Ok((c1, VertexSetColoring::new(palette, sets)))
}

/// Recovers `c` from the vertex sets: `c1(uv)` is the unique common element
/// of `c2(u)` and `c2(v)`, and `c = ((c1 − 1) mod k) + 1`.
pub fn decode_edge_coloring(
    g: &BoundedGraph,
    c2: &VertexSetColoring,
    k: u32,
) -> Result<EdgeColoring> {
    if c2.sets.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            actual: c2.sets.len(),
        });
    }
    let mut colors = BTreeMap::new();
    for (u, v) in g.edges() {
        let mut common = c2.sets[u].intersection(&c2.sets[v]);
        match (common.next(), common.next()) {
            (Some(&x), None) => {
                colors.insert((u, v), (x - 1) % k + 1);
            }
            _ => return Err(Error::AmbiguousIntersection(u, v)),
        }
    }
    Ok(EdgeColoring { k, colors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_random_regular};

    #[test]
    fn single_edge() {
        let g = gen_complete(2).unwrap();
        let c = EdgeColoring::new(&g, 2, &[((0, 1), 2)]).unwrap();
        let (c1, c2) = encode_edge_coloring(&g, &c).unwrap();
        let x = c1.get(0, 1).unwrap();
        assert_eq!((x - 1) % 2 + 1, 2);
        assert_eq!(c2.set(0), c2.set(1));
        assert_eq!(c2.set(0).len(), 1);
        assert_eq!(decode_edge_coloring(&g, &c2, 2).unwrap(), c);
    }

    #[test]
    fn monochromatic_triangle_gets_distinct_layers() {
        let g = gen_complete(3).unwrap();
        let c = EdgeColoring::new(&g, 1, &[((0, 1), 1), ((1, 2), 1), ((0, 2), 1)]).unwrap();
        let (c1, _) = encode_edge_coloring(&g, &c).unwrap();
        let values: BTreeSet<u32> = c1.iter().map(|(_, x)| x).collect();
        assert_eq!(values.len(), 3);
    }

    #[test]
    fn star_round_trip() {
        let g = BoundedGraph::new(4, &[(0, 1), (0, 2), (0, 3)], 3).unwrap();
        let c = EdgeColoring::new(&g, 3, &[((0, 1), 1), ((0, 2), 2), ((0, 3), 3)]).unwrap();
        let (_, c2) = encode_edge_coloring(&g, &c).unwrap();
        let back = decode_edge_coloring(&g, &c2, 3).unwrap();
        assert_eq!(
            back.iter().map(|(_, x)| x).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn corrupted_sets_are_rejected() {
        let g = BoundedGraph::new(3, &[(0, 1), (1, 2)], 2).unwrap();
        let c = EdgeColoring::new(&g, 1, &[((0, 1), 1), ((1, 2), 1)]).unwrap();
        let (c1, mut c2) = encode_edge_coloring(&g, &c).unwrap();
        // Duplicate c1(0,1) onto vertex 2, so the sets at 1 and 2 share two values.
        let a = c1.get(0, 1).unwrap();
        c2.set_mut(2).insert(a);
        assert_eq!(
            decode_edge_coloring(&g, &c2, 1).unwrap_err(),
            Error::AmbiguousIntersection(1, 2)
        );
    }

    #[test]
    fn validation() {
        let g = gen_complete(3).unwrap();
        assert!(EdgeColoring::new(&g, 2, &[((0, 1), 1)]).is_err());
        assert!(EdgeColoring::new(&g, 2, &[((0, 1), 3), ((1, 2), 1), ((0, 2), 1)]).is_err());
        assert!(EdgeColoring::new(&g, 2, &[((0, 1), 1), ((1, 0), 1), ((0, 2), 1)]).is_err());
    }

    #[test]
    fn cubic_graph_encoding_respects_distance_three() {
        let g = gen_random_regular(30, 3, 9).unwrap();
        let entries: Vec<_> = g.edges().into_iter().map(|e| (e, 1)).collect();
        let c = EdgeColoring::new(&g, 1, &entries).unwrap();
        let (c1, c2) = encode_edge_coloring(&g, &c).unwrap();
        for (u, v) in g.edges() {
            assert_eq!(c2.set(u).intersection(c2.set(v)).count(), 1);
        }
        assert!(u64::from(c1.k()) <= palette_limit(3, 1));
    }
}

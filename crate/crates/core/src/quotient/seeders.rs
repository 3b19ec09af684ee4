//! Structured starting colorings for quotient-set search.

use crate::graph::{BoundedGraph, VertexColoring};
use crate::registry::{Named, Registry};

pub trait Seeder: Named + Send + Sync {
    fn colorings(&self, g: &BoundedGraph, k: u32) -> Vec<VertexColoring>;
}

/// Every constant coloring.
pub struct Constant;

/// Component indicators: component `i` (by smallest vertex) gets color
/// `i mod k + 1`, plus "one component colored 2, the rest 1" for the first
/// few components.
pub struct Components;

/// Color by BFS depth from the smallest vertex of each component, mod `k`.
pub struct BfsLayers;

/// Split the BFS order into `k` contiguous, nearly equal blocks.
pub struct BalancedCut;

const COMPONENT_SINGLES: usize = 8;

impl Named for Constant {
    fn name(&self) -> &str {
        "constant"
    }
}

impl Seeder for Constant {
    fn colorings(&self, g: &BoundedGraph, k: u32) -> Vec<VertexColoring> {
        (1..=k)
            .map(|c| VertexColoring::constant(g.n(), k, c).expect("in palette"))
            .collect()
    }
}

impl Named for Components {
    fn name(&self) -> &str {
        "components"
    }
}

impl Seeder for Components {
    fn colorings(&self, g: &BoundedGraph, k: u32) -> Vec<VertexColoring> {
        let (label, count) = g.components();
        if count < 2 || k < 2 {
            return Vec::new();
        }
        let mut out = vec![VertexColoring::new(
            k,
            label.iter().map(|&l| (l as u32 % k) + 1).collect(),
        )
        .expect("in palette")];
        for single in 0..count.min(COMPONENT_SINGLES) {
            out.push(
                VertexColoring::new(
                    k,
                    label
                        .iter()
                        .map(|&l| if l == single { 2 } else { 1 })
                        .collect(),
                )
                .expect("in palette"),
            );
        }
        out
    }
}

fn bfs_order_and_depth(g: &BoundedGraph) -> (Vec<usize>, Vec<usize>) {
    let mut depth = vec![usize::MAX; g.n()];
    let mut order = Vec::with_capacity(g.n());
    for s in 0..g.n() {
        if depth[s] != usize::MAX {
            continue;
        }
        depth[s] = 0;
        let mut head = order.len();
        order.push(s);
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in g.neighbors(u) {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    order.push(w);
                }
            }
        }
    }
    (order, depth)
}

impl Named for BfsLayers {
    fn name(&self) -> &str {
        "bfs-layers"
    }
}

impl Seeder for BfsLayers {
    fn colorings(&self, g: &BoundedGraph, k: u32) -> Vec<VertexColoring> {
        if k < 2 {
            return Vec::new();
        }
        let (_, depth) = bfs_order_and_depth(g);
        vec![VertexColoring::new(k, depth.iter().map(|&d| (d as u32 % k) + 1).collect())
            .expect("in palette")]
    }
}

impl Named for BalancedCut {
    fn name(&self) -> &str {
        "balanced-cut"
    }
}

impl Seeder for BalancedCut {
    fn colorings(&self, g: &BoundedGraph, k: u32) -> Vec<VertexColoring> {
        if k < 2 || g.n() == 0 {
            return Vec::new();
        }
        let (order, _) = bfs_order_and_depth(g);
        let mut colors = vec![1; g.n()];
        for (pos, &v) in order.iter().enumerate() {
            colors[v] = (pos * k as usize / g.n()) as u32 + 1;
        }
        vec![VertexColoring::new(k, colors).expect("in palette")]
    }
}

pub fn default_seeders() -> Registry<dyn Seeder> {
    let mut reg: Registry<dyn Seeder> = Registry::new("seeder");
    reg.register(Box::new(Constant))
        .register(Box::new(Components))
        .register(Box::new(BfsLayers))
        .register(Box::new(BalancedCut));
    reg
}

/// Fills the BFS order with colors in proportion to `fractions` (one entry
/// per color, summing to one).
pub fn transport_coloring(g: &BoundedGraph, k: u32, fractions: &[f64]) -> VertexColoring {
    let (order, _) = bfs_order_and_depth(g);
    let n = g.n();
    let mut colors = vec![k; n];
    let mut cumulative = 0.0;
    let mut pos = 0;
    for (i, f) in fractions.iter().enumerate().take(k as usize) {
        cumulative += f;
        let end = ((cumulative * n as f64).round() as usize).min(n);
        while pos < end {
            colors[order[pos]] = i as u32 + 1;
            pos += 1;
        }
    }
    VertexColoring::new(k, colors).expect("in palette")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_cycle, gen_disjoint_union};

    #[test]
    fn registry_has_all_seeders() {
        let reg = default_seeders();
        assert_eq!(
            reg.names(),
            vec!["balanced-cut", "bfs-layers", "components", "constant"]
        );
    }

    #[test]
    fn component_indicator_for_unions() {
        let c4 = gen_cycle(4).unwrap();
        let u = gen_disjoint_union(&c4, &c4);
        let seeds = Components.colorings(&u, 2);
        assert_eq!(seeds[0].colors(), &[1, 1, 1, 1, 2, 2, 2, 2]);
        assert!(Components.colorings(&c4, 2).is_empty());
    }

    #[test]
    fn balanced_cut_is_balanced() {
        let g = gen_cycle(9).unwrap();
        let c = &BalancedCut.colorings(&g, 3)[0];
        for color in 1..=3 {
            assert_eq!(c.colors().iter().filter(|&&x| x == color).count(), 3);
        }
    }

    #[test]
    fn transport_matches_fractions() {
        let g = gen_cycle(10).unwrap();
        let c = transport_coloring(&g, 2, &[0.3, 0.7]);
        assert_eq!(c.colors().iter().filter(|&&x| x == 1).count(), 3);
    }
}

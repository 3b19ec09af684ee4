//! Exhaustive enumeration of small graphs up to isomorphism.

use std::collections::BTreeMap;

use super::BoundedGraph;
use crate::canon::{canonical_order, packed_adjacency, AdjMatrix};

/// Isomorphism-invariant byte code of a whole (unrooted) graph.
pub fn canonical_graph_code(g: &BoundedGraph) -> Vec<u8> {
    let degrees: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let order = canonical_order(&g.adjacency, &degrees);
    let mut code = (g.n() as u32).to_le_bytes().to_vec();
    code.extend(order.iter().map(|&v| degrees[v] as u8));
    code.extend(packed_adjacency(&AdjMatrix::new(&g.adjacency), &order));
    code
}

/// One representative per isomorphism class of graphs on exactly `n`
/// vertices with maximum degree at most `d_max`, sorted by canonical code.
///
/// Built by vertex augmentation: deleting any vertex of such a graph leaves
/// a smaller one, so extending every class by one vertex in all admissible
/// ways reaches every class.
pub fn all_graphs(n: usize, d_max: usize) -> Vec<BoundedGraph> {
    let mut layer: BTreeMap<Vec<u8>, BoundedGraph> = BTreeMap::new();
    if n == 0 {
        return Vec::new();
    }
    let single = BoundedGraph::from_adjacency(vec![Vec::new()], d_max).expect("valid");
    layer.insert(canonical_graph_code(&single), single);
    for size in 1..n {
        let mut next = BTreeMap::new();
        for g in layer.values() {
            let open: Vec<usize> = (0..size).filter(|&v| g.degree(v) < d_max).collect();
            for subset in subsets_up_to(&open, d_max) {
                let mut adjacency = g.adjacency.clone();
                for &v in &subset {
                    adjacency[v].push(size);
                }
                adjacency.push(subset);
                let h = BoundedGraph::from_adjacency(adjacency, d_max).expect("valid");
                next.entry(canonical_graph_code(&h)).or_insert(h);
            }
        }
        layer = next;
    }
    layer.into_values().collect()
}

/// Every `d`-regular graph on `n` vertices up to isomorphism.
pub fn all_regular_graphs(n: usize, d: usize) -> Vec<BoundedGraph> {
    all_graphs(n, d)
        .into_iter()
        .filter(|g| g.regular_degree() == Some(d))
        .collect()
}

fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &x in items {
        let grown: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut t = s.clone();
                t.push(x);
                t
            })
            .collect();
        out.extend(grown);
    }
    out
}

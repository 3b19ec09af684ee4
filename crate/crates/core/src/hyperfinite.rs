//! τ_q(G): the fewest vertices whose deletion leaves components of at most
//! `q` vertices, with certificates that can be re-checked against a graph.

use std::collections::VecDeque;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balls::RootedBall;
use crate::error::{Error, Result};
use crate::graph::{BoundedGraph, VertexColoring};
use crate::rng::{derive_seed, rng_from};
use crate::stats::ball_distribution;

/// Largest graph accepted by [`tau_exact`].
pub const EXACT_MAX_VERTICES: usize = 24;
/// Search nodes [`tau_exact`] may visit before giving up.
pub const EXACT_NODE_BUDGET: u64 = 50_000_000;

pub const RED: u32 = 1;
pub const BLUE: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub q: usize,
    pub n: usize,
    /// Sorted ascending.
    pub deleted: Vec<usize>,
    /// Component sizes of `G − S`, largest first.
    pub component_sizes: Vec<usize>,
    pub eps: f64,
    pub mode: PartitionMode,
}

/// Components of `g` restricted to vertices with `removed[v] == false`, in
/// order of their least vertex.
pub fn surviving_components(g: &BoundedGraph, removed: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = removed.to_vec();
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &w in g.neighbors(comp[i]) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

impl PartitionCertificate {
    /// Builds a certificate for `deleted`, failing with `Infeasible` if some
    /// component of `G − S` exceeds `q`.
    pub fn from_deleted(
        g: &BoundedGraph,
        q: usize,
        deleted: &[usize],
        mode: PartitionMode,
    ) -> Result<Self> {
        let mut removed = vec![false; g.n()];
        for &v in deleted {
            if v >= g.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
            }
            removed[v] = true;
        }
        let mut sizes: Vec<usize> = surviving_components(g, &removed)
            .iter()
            .map(Vec::len)
            .collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(&big) = sizes.first() {
            if big > q {
                return Err(Error::Infeasible(format!(
                    "a component of {big} vertices survives, more than q = {q}"
                )));
            }
        }
        let deleted: Vec<usize> = (0..g.n()).filter(|&v| removed[v]).collect();
        Ok(Self {
            q,
            n: g.n(),
            eps: if g.n() == 0 {
                0.0
            } else {
                deleted.len() as f64 / g.n() as f64
            },
            deleted,
            component_sizes: sizes,
            mode,
        })
    }

    pub fn size(&self) -> usize {
        self.deleted.len()
    }

    /// `|S| / n` as an exact ratio.
    pub fn eps_exact(&self) -> Ratio<u64> {
        Ratio::new(self.deleted.len() as u64, self.n.max(1) as u64)
    }

    /// Re-scans `G − S` and checks every recorded field against it.
    pub fn verify(&self, g: &BoundedGraph) -> Result<()> {
        if self.n != g.n() {
            return Err(Error::SizeMismatch {
                expected: g.n(),
                actual: self.n,
            });
        }
        let fresh = Self::from_deleted(g, self.q, &self.deleted, self.mode)?;
        if fresh.deleted != self.deleted {
            return Err(Error::Invalid("deleted set is not sorted and distinct".into()));
        }
        if fresh.component_sizes != self.component_sizes {
            return Err(Error::Invalid("component inventory does not match".into()));
        }
        if fresh.eps != self.eps {
            return Err(Error::Invalid("eps does not match |S|/n".into()));
        }
        Ok(())
    }
}

/// Exact τ_q by branch and bound. Every connected `(q+1)`-subset of a
/// surviving component must lose a vertex, so the search branches on such a
/// subset inside the largest oversized component; vertices skipped by
/// earlier branches are kept for good.
pub fn tau_exact(g: &BoundedGraph, q: usize) -> Result<PartitionCertificate> {
    let n = g.n();
    if n > EXACT_MAX_VERTICES {
        return Err(Error::BudgetExceeded(format!(
            "exact τ_q handles at most {EXACT_MAX_VERTICES} vertices, got {n}"
        )));
    }
    let incumbent = tau_heuristic(g, q, 0, 1);
    let mut search = Exact {
        adj: (0..n)
            .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
            .collect(),
        all: ((1u64 << n) - 1) as u32,
        q,
        best: incumbent.deleted.iter().fold(0u32, |m, &v| m | 1 << v),
        nodes: 0,
    };
    search.recurse(0, 0)?;
    let deleted: Vec<usize> = (0..n).filter(|&v| search.best >> v & 1 == 1).collect();
    PartitionCertificate::from_deleted(g, q, &deleted, PartitionMode::Exact)
}

struct Exact {
    adj: Vec<u32>,
    all: u32,
    q: usize,
    best: u32,
    nodes: u64,
}

impl Exact {
    /// Vertices of `within` reachable from `start`, at most `limit` of
    /// them, in BFS order.
    fn grow(&self, start: usize, within: u32, limit: usize) -> Vec<usize> {
        let mut seen = 1u32 << start;
        let mut order = vec![start];
        let mut i = 0;
        while i < order.len() && order.len() < limit {
            let mut fresh = self.adj[order[i]] & within & !seen;
            while fresh != 0 && order.len() < limit {
                let w = fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                seen |= 1 << w;
                order.push(w);
            }
            i += 1;
        }
        order
    }

    fn component(&self, start: usize, within: u32) -> u32 {
        self.grow(start, within, usize::MAX)
            .into_iter()
            .fold(0, |m, v| m | 1 << v)
    }

    /// Disjoint connected `(q+1)`-sets packed greedily into `alive`; each
    /// needs its own deletion.
    fn lower_bound(&self, alive: u32) -> u32 {
        let mut rest = alive;
        let mut count = 0;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            let part = self.grow(s, rest, self.q + 1);
            if part.len() > self.q {
                count += 1;
                for v in part {
                    rest &= !(1 << v);
                }
            } else {
                rest &= !self.component(s, rest);
            }
        }
        count
    }

    fn recurse(&mut self, deleted: u32, kept: u32) -> Result<()> {
        self.nodes += 1;
        if self.nodes > EXACT_NODE_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "exact τ_q visited {EXACT_NODE_BUDGET} search nodes"
            )));
        }
        let size = deleted.count_ones();
        if size >= self.best.count_ones() {
            return Ok(());
        }
        let alive = self.all & !deleted;
        let mut rest = alive;
        let mut largest = (0u32, 0usize);
        while rest != 0 {
            let comp = self.component(rest.trailing_zeros() as usize, rest);
            rest &= !comp;
            if comp.count_ones() > largest.0.count_ones() {
                largest = (comp, comp.trailing_zeros() as usize);
            }
        }
        if largest.0.count_ones() as usize <= self.q {
            self.best = deleted;
            return Ok(());
        }
        if size + self.lower_bound(alive) >= self.best.count_ones() {
            return Ok(());
        }
        let target = self.grow(largest.1, largest.0, self.q + 1);
        let mut newly_kept = kept;
        for v in target {
            if kept >> v & 1 == 1 {
                continue;
            }
            self.recurse(deleted | 1 << v, newly_kept)?;
            newly_kept |= 1 << v;
        }
        Ok(())
    }
}

/// Ball carving: visit vertices in some order; from each unvisited vertex
/// grow a BFS component of up to `q` unvisited vertices and delete its
/// unvisited boundary. Deleted vertices are then re-absorbed wherever the
/// merged component stays within `q`. Pass 0 visits vertices in index
/// order, later passes in seeded random orders; the best certificate (fewest
/// deletions, then lexicographically least) wins.
pub fn tau_heuristic(g: &BoundedGraph, q: usize, seed: u64, passes: usize) -> PartitionCertificate {
    let passes = passes.max(1);
    let best = (0..passes)
        .into_par_iter()
        .map(|p| {
            let mut order: Vec<usize> = (0..g.n()).collect();
            if p > 0 {
                order.shuffle(&mut rng_from(derive_seed(seed, p as u64)));
            }
            carve(g, q, &order)
        })
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .unwrap_or_default();
    PartitionCertificate::from_deleted(g, q, &best, PartitionMode::Heuristic)
        .expect("carving leaves components of at most q vertices")
}

fn carve(g: &BoundedGraph, q: usize, order: &[usize]) -> Vec<usize> {
    let n = g.n();
    let mut assigned = vec![false; n];
    let mut removed = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in order {
        if assigned[s] {
            continue;
        }
        if q == 0 {
            assigned[s] = true;
            removed[s] = true;
            continue;
        }
        let mut comp = vec![s];
        assigned[s] = true;
        queue.clear();
        queue.push_back(s);
        'grow: while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if comp.len() == q {
                    break 'grow;
                }
                if !assigned[w] {
                    assigned[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        for &v in &comp {
            for &w in g.neighbors(v) {
                if !assigned[w] {
                    assigned[w] = true;
                    removed[w] = true;
                }
            }
        }
    }
    reabsorb(g, q, &mut removed);
    (0..n).filter(|&v| removed[v]).collect()
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// A single pass suffices: components only grow, so a vertex that cannot
/// be absorbed now cannot be absorbed later.
fn reabsorb(g: &BoundedGraph, q: usize, removed: &mut [bool]) {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    for (u, v) in g.edges() {
        if !removed[u] && !removed[v] {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[b] = a;
                size[a] += size[b];
            }
        }
    }
    for s in 0..n {
        if !removed[s] {
            continue;
        }
        let mut roots: Vec<usize> = g
            .neighbors(s)
            .iter()
            .filter(|&&w| !removed[w])
            .map(|&w| find(&mut parent, w))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        if 1 + roots.iter().map(|&r| size[r]).sum::<usize>() <= q {
            removed[s] = false;
            for r in roots {
                parent[r] = s;
                size[s] += size[r];
            }
        }
    }
}

/// True iff the certificate is valid for `g`, was issued for `q`, and
/// `|S|/n ≤ ε`.
pub fn check_hyperfinite_pair(
    g: &BoundedGraph,
    cert: &PartitionCertificate,
    q: usize,
    eps: f64,
) -> bool {
    cert.q == q && cert.verify(g).is_ok() && cert.eps <= eps
}

/// Red (1) on deleted vertices, blue (2) elsewhere.
pub fn hyperfinite_coloring(cert: &PartitionCertificate) -> VertexColoring {
    let mut colors = vec![BLUE; cert.n];
    for &v in &cert.deleted {
        colors[v] = RED;
    }
    VertexColoring::new(2, colors).expect("colors are 1 or 2")
}

/// True iff the ball has a connected all-blue subgraph on `q + 1` vertices.
pub fn has_large_blue_part(ball: &RootedBall, q: usize) -> bool {
    let colors = ball.colors();
    let mut seen = vec![false; colors.len()];
    for s in 0..colors.len() {
        if seen[s] || colors[s] != BLUE {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            for &w in ball.neighbors(v) {
                if !seen[w] && colors[w] == BLUE {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if count > q {
            return true;
        }
    }
    false
}

/// Mass of `P_{G,q}[c]` on balls with a connected all-blue subgraph of
/// `q + 1` vertices. A blue component of that size through the root always
/// shows up within radius `q`, so zero mass means every blue component has
/// at most `q` vertices.
pub fn forbidden_blue_mass(g: &BoundedGraph, c: &VertexColoring, q: usize) -> Result<Ratio<u64>> {
    let dist = ball_distribution(g, q, Some(c))?;
    let mut bad = Vec::new();
    for (code, _) in dist.iter() {
        if has_large_blue_part(&RootedBall::decode(code)?, q) {
            bad.push(code.clone());
        }
    }
    Ok(dist.mass_where(|code| bad.contains(code)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_cycle, gen_path, gen_random_regular};

    fn brute_force_tau(g: &BoundedGraph, q: usize) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|mask| {
                let removed: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
                surviving_components(g, &removed).iter().all(|c| c.len() <= q)
            })
            .map(u32::count_ones)
            .min()
            .unwrap() as usize
    }

    #[test]
    fn small_cycles_match_brute_force() {
        assert_eq!(tau_exact(&gen_cycle(4).unwrap(), 1).unwrap().size(), 2);
        assert_eq!(tau_exact(&gen_cycle(6).unwrap(), 2).unwrap().size(), 2);
        for n in 3..=10 {
            let g = gen_cycle(n).unwrap();
            for q in 0..=4 {
                assert_eq!(tau_exact(&g, q).unwrap().size(), brute_force_tau(&g, q));
            }
        }
    }

    #[test]
    fn random_cubic_matches_brute_force() {
        for seed in 0..4 {
            let g = gen_random_regular(14, 3, seed).unwrap();
            for q in 1..=4 {
                let cert = tau_exact(&g, q).unwrap();
                cert.verify(&g).unwrap();
                assert_eq!(cert.size(), brute_force_tau(&g, q), "seed {seed} q {q}");
                assert!(cert.size() <= tau_heuristic(&g, q, seed, 8).size());
            }
        }
    }

    #[test]
    fn trivial_when_graph_is_small() {
        let g = gen_cycle(5).unwrap();
        let cert = tau_exact(&g, 5).unwrap();
        assert!(cert.deleted.is_empty());
        assert!(check_hyperfinite_pair(&g, &cert, 5, 0.0));
    }

    #[test]
    fn sequential_carving_on_paths() {
        for n in 1..30 {
            let g = gen_path(n).unwrap();
            for q in 1..=5 {
                assert_eq!(tau_heuristic(&g, q, 0, 1).size(), n / (q + 1), "n {n} q {q}");
            }
        }
    }

    #[test]
    fn heuristic_is_valid_on_large_graphs() {
        let g = gen_random_regular(3000, 3, 5).unwrap();
        let cert = tau_heuristic(&g, 10, 2, 4);
        cert.verify(&g).unwrap();
        assert_eq!(cert, tau_heuristic(&g, 10, 2, 4));
    }

    #[test]
    fn checker_is_exact() {
        let g = gen_cycle(12).unwrap();
        let cert = PartitionCertificate::from_deleted(&g, 2, &[0, 3, 6, 9], PartitionMode::Heuristic)
            .unwrap();
        assert!(check_hyperfinite_pair(&g, &cert, 2, 1.0 / 3.0));
        assert!(!check_hyperfinite_pair(&g, &cert, 2, 0.3));
        assert!(!check_hyperfinite_pair(&g, &cert, 3, 1.0 / 3.0));
        // A chord joining two kept pairs makes a component of 4.
        let mut edges = g.edges();
        edges.push((1, 4));
        let h = BoundedGraph::new(12, &edges, 3).unwrap();
        assert!(!check_hyperfinite_pair(&h, &cert, 2, 1.0 / 3.0));
    }

    #[test]
    fn coloring_of_c6_certificate() {
        let g = gen_cycle(6).unwrap();
        let cert = tau_exact(&g, 2).unwrap();
        let c = hyperfinite_coloring(&cert);
        assert_eq!(c.colors().iter().filter(|&&x| x == RED).count(), 2);
        let removed: Vec<bool> = c.colors().iter().map(|&x| x == RED).collect();
        let sizes: Vec<usize> = surviving_components(&g, &removed).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2, 2]);
        assert_eq!(forbidden_blue_mass(&g, &c, 2).unwrap(), Ratio::from_integer(0));
        let all_blue = VertexColoring::constant(6, 2, BLUE).unwrap();
        assert_eq!(forbidden_blue_mass(&g, &all_blue, 2).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn tau_is_monotone_in_q() {
        let g = gen_random_regular(16, 3, 11).unwrap();
        let taus: Vec<usize> = (0..=6).map(|q| tau_exact(&g, q).unwrap().size()).collect();
        assert_eq!(taus[0], 16);
        assert!(taus.windows(2).all(|w| w[1] <= w[0]), "{taus:?}");
    }

    #[test]
    fn oversized_inputs_are_rejected() {
        let g = gen_cycle(25).unwrap();
        assert!(matches!(tau_exact(&g, 2), Err(Error::BudgetExceeded(_))));
    }
}

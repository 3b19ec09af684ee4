//! A single coloring `q` that separates vertices closer than `r + 1` and
//! emulates, through a palette map `α`, the neighborhood statistics of every
//! coloring in a probe family.
//!
//! Representatives form an ε-net over the probes' realized distributions:
//! probes are scanned in order and one becomes a representative when no
//! earlier representative is within ε. The guarantee is therefore relative
//! to the probe family; passing all `k^n` colorings of a small graph gives
//! the unconditional statement.
//!
//! `q` is the common refinement of the representatives and a greedy proper
//! coloring of the r-th power of `G`. Since `q` refines every
//! representative `g_a`, the map `α_a` sending each class of `q` to its
//! `g_a`-color satisfies `α_a ∘ q = g_a` exactly.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{BoundedGraph, VertexColoring};
use crate::quotient::Templates;
use crate::stats::{ratio_to_f64, tv_distance_exact, BallDistribution};

#[derive(Debug, Clone)]
pub struct Representative {
    /// Index of the probe chosen as representative.
    pub probe: usize,
    pub coloring: VertexColoring,
    pub distribution: BallDistribution,
    /// `alpha[j - 1]` is the color of refined class `j`.
    pub alpha: Vec<u32>,
}

/// How a coloring is emulated by `α ∘ q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseEntry {
    pub representative: usize,
    pub alpha: Vec<u32>,
    pub achieved_tv: Ratio<u128>,
    /// `achieved_tv ≤ ε`.
    pub covered: bool,
}

impl ResponseEntry {
    pub fn achieved_tv_f64(&self) -> f64 {
        ratio_to_f64(&self.achieved_tv)
    }
}

#[derive(Debug, Clone)]
pub struct RegularizationResult {
    graph: BoundedGraph,
    r: usize,
    k: u32,
    epsilon: f64,
    q: VertexColoring,
    power_coloring: Vec<u32>,
    representatives: Vec<Representative>,
    /// One entry per probe, in probe order.
    table: Vec<ResponseEntry>,
}

impl RegularizationResult {
    pub fn q(&self) -> &VertexColoring {
        &self.q
    }

    /// Palette size of `q`.
    pub fn t(&self) -> u32 {
        self.q.k()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn power_coloring(&self) -> &[u32] {
        &self.power_coloring
    }

    pub fn representatives(&self) -> &[Representative] {
        &self.representatives
    }

    pub fn table(&self) -> &[ResponseEntry] {
        &self.table
    }

    /// Upper bound `k^|R| · (d+1)^r` on the palette size.
    pub fn palette_bound(&self) -> u64 {
        let d = self.graph.max_degree() as u64;
        let mut bound: u64 = 1;
        for _ in 0..self.representatives.len() {
            bound = bound.saturating_mul(u64::from(self.k));
        }
        for _ in 0..self.r {
            bound = bound.saturating_mul(d + 1);
        }
        bound
    }

    /// `α ∘ q`.
    pub fn compose(&self, alpha: &[u32]) -> VertexColoring {
        let colors = self
            .q
            .colors()
            .iter()
            .map(|&j| alpha[j as usize - 1])
            .collect();
        VertexColoring::new(self.k, colors).expect("alpha maps into the palette")
    }

    /// Nearest representative's palette map for `g` and the distance it
    /// actually achieves.
    pub fn respond(&self, g: &VertexColoring) -> Result<ResponseEntry> {
        if g.k() != self.k {
            return Err(Error::Invalid(format!(
                "coloring has palette {}, expected {}",
                g.k(),
                self.k
            )));
        }
        g.check_len(self.graph.n())?;
        let templates = Templates::new(&self.graph, self.r);
        let d = templates.distribution(self.k, g.colors())?;
        self.respond_to_distribution(&templates, &d)
    }

    fn respond_to_distribution(
        &self,
        templates: &Templates,
        d: &BallDistribution,
    ) -> Result<ResponseEntry> {
        let mut nearest = (None::<Ratio<u128>>, 0usize);
        for (i, rep) in self.representatives.iter().enumerate() {
            let t = tv_distance_exact(d, &rep.distribution)?;
            if nearest.0.as_ref().is_none_or(|x| t < *x) {
                nearest = (Some(t), i);
            }
        }
        let representative = nearest.1;
        let alpha = self.representatives[representative].alpha.clone();
        let emulated = templates.distribution(self.k, self.compose(&alpha).colors())?;
        let achieved_tv = tv_distance_exact(d, &emulated)?;
        let covered = ratio_to_f64(&achieved_tv) <= self.epsilon;
        Ok(ResponseEntry {
            representative,
            alpha,
            achieved_tv,
            covered,
        })
    }
}

/// Greedy proper coloring of the r-th power: vertices in index order take
/// the least color unused within distance `r`.
pub fn power_graph_coloring(g: &BoundedGraph, r: usize) -> Vec<u32> {
    let mut colors = vec![0u32; g.n()];
    for v in 0..g.n() {
        let mut used: Vec<u32> = g
            .ball_vertices(v, r)
            .into_iter()
            .skip(1)
            .map(|w| colors[w])
            .filter(|&c| c > 0)
            .collect();
        used.sort_unstable();
        used.dedup();
        let mut c = 1;
        for u in used {
            if u == c {
                c += 1;
            } else if u > c {
                break;
            }
        }
        colors[v] = c;
    }
    colors
}

/// True iff every pair of distinct same-colored vertices is at distance at
/// least `r + 1`.
pub fn separates_within(g: &BoundedGraph, q: &VertexColoring, r: usize) -> bool {
    (0..g.n()).all(|v| {
        g.ball_vertices(v, r)
            .into_iter()
            .skip(1)
            .all(|w| q.get(w) != q.get(v))
    })
}

pub fn regularize(
    g: &BoundedGraph,
    r: usize,
    k: u32,
    epsilon: f64,
    probes: &[VertexColoring],
) -> Result<RegularizationResult> {
    if !(epsilon > 0.0) {
        return Err(Error::Invalid("epsilon must be positive".into()));
    }
    if probes.is_empty() {
        return Err(Error::EmptySet);
    }
    for p in probes {
        p.check_len(g.n())?;
        if p.k() != k {
            return Err(Error::Invalid(format!(
                "probe palette {} differs from k = {k}",
                p.k()
            )));
        }
    }
    let templates = Templates::new(g, r);
    let distributions: Vec<BallDistribution> = probes
        .par_iter()
        .map(|p| templates.distribution(k, p.colors()))
        .collect::<Result<_>>()?;

    let mut rep_probes: Vec<usize> = Vec::new();
    for (i, d) in distributions.iter().enumerate() {
        let mut covered = false;
        for &j in &rep_probes {
            if ratio_to_f64(&tv_distance_exact(d, &distributions[j])?) <= epsilon {
                covered = true;
                break;
            }
        }
        if !covered {
            rep_probes.push(i);
        }
    }

    let power_coloring = power_graph_coloring(g, r);
    let tuples: Vec<Vec<u32>> = (0..g.n())
        .map(|v| {
            let mut t: Vec<u32> = rep_probes.iter().map(|&j| probes[j].get(v)).collect();
            t.push(power_coloring[v]);
            t
        })
        .collect();
    let classes: BTreeMap<&Vec<u32>, u32> = {
        let mut distinct: Vec<&Vec<u32>> = tuples.iter().collect();
        distinct.sort();
        distinct.dedup();
        distinct
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t, i as u32 + 1))
            .collect()
    };
    let t = classes.len() as u32;
    let q = VertexColoring::new(t, tuples.iter().map(|tu| classes[tu]).collect())?;

    let representatives = rep_probes
        .iter()
        .enumerate()
        .map(|(slot, &probe)| {
            let mut alpha = vec![0u32; t as usize];
            for (tuple, &class) in &classes {
                alpha[class as usize - 1] = tuple[slot];
            }
            Representative {
                probe,
                coloring: probes[probe].clone(),
                distribution: distributions[probe].clone(),
                alpha,
            }
        })
        .collect();

    let mut result = RegularizationResult {
        graph: g.clone(),
        r,
        k,
        epsilon,
        q,
        power_coloring,
        representatives,
        table: Vec::new(),
    };
    result.table = distributions
        .par_iter()
        .map(|d| result.respond_to_distribution(&templates, d))
        .collect::<Result<_>>()?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_cycle, gen_path, gen_random_regular};
    use crate::quotient::coloring_count;

    fn all_colorings(n: usize, k: u32) -> Vec<VertexColoring> {
        (0..coloring_count(n, k))
            .map(|i| VertexColoring::from_index(n, k, i))
            .collect()
    }

    #[test]
    fn constant_probe_gives_zero_tv() {
        let g = gen_random_regular(10, 3, 4).unwrap();
        let probe = VertexColoring::constant(10, 1, 1).unwrap();
        let res = regularize(&g, 1, 1, 0.1, &[probe]).unwrap();
        assert_eq!(res.table()[0].achieved_tv, Ratio::from_integer(0));
        assert!(res.representatives()[0].alpha.iter().all(|&a| a == 1));
    }

    #[test]
    fn c5_at_radius_two_is_fully_separated() {
        let g = gen_cycle(5).unwrap();
        let res = regularize(&g, 2, 2, 0.2, &all_colorings(5, 2)).unwrap();
        let mut q: Vec<u32> = res.q().colors().to_vec();
        q.sort_unstable();
        q.dedup();
        assert_eq!(q.len(), 5);
        assert!(separates_within(&g, res.q(), 2));
    }

    #[test]
    fn exhaustive_probes_are_all_covered() {
        let g = gen_path(6).unwrap();
        let probes = all_colorings(6, 2);
        let res = regularize(&g, 1, 2, 0.1, &probes).unwrap();
        assert!(separates_within(&g, res.q(), 1));
        assert!(res.table().iter().all(|e| e.covered));
        assert!(u64::from(res.t()) <= res.palette_bound());
        for (i, probe) in probes.iter().enumerate().step_by(7) {
            assert_eq!(res.respond(probe).unwrap(), res.table()[i]);
        }
    }

    #[test]
    fn representative_reproduces_itself() {
        let g = gen_cycle(7).unwrap();
        let probes = all_colorings(7, 2);
        let res = regularize(&g, 1, 2, 0.05, &probes).unwrap();
        for rep in res.representatives() {
            assert_eq!(res.compose(&rep.alpha), rep.coloring);
            let e = res.respond(&rep.coloring).unwrap();
            assert_eq!(e.achieved_tv, Ratio::from_integer(0));
        }
    }

    #[test]
    fn uncovered_probe_is_flagged() {
        let g = gen_cycle(8).unwrap();
        let only_constant = vec![VertexColoring::constant(8, 2, 1).unwrap()];
        let res = regularize(&g, 1, 2, 0.1, &only_constant).unwrap();
        let other = VertexColoring::constant(8, 2, 2).unwrap();
        let e = res.respond(&other).unwrap();
        assert!(!e.covered);
        assert_eq!(e.achieved_tv, Ratio::from_integer(1));
    }

    #[test]
    fn power_coloring_is_proper_and_small() {
        let g = gen_random_regular(40, 3, 6).unwrap();
        for r in 1..=3 {
            let c = power_graph_coloring(&g, r);
            let q = VertexColoring::new(*c.iter().max().unwrap(), c.clone()).unwrap();
            assert!(separates_within(&g, &q, r));
            assert!(u64::from(q.k()) <= 4u64.pow(r as u32));
        }
    }
}

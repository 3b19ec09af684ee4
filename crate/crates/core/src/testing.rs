//! Sampling testers and nondeterministic (witness-coloring) testers.
//!
//! A tester sees `t` balls of radius `r` around independent uniform roots
//! and answers YES or NO from their canonical codes alone. A
//! nondeterministic tester additionally receives a `k`-coloring of the
//! graph as a witness; its acceptance on a graph is the best acceptance
//! over the witnesses tried.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balls::{BallCode, BallTemplate, RootedBall};
use crate::error::{Error, Result};
use crate::graph::{BoundedGraph, VertexColoring};
use crate::quotient::default_seeders;
use crate::registry::{Named, Registry};
use crate::rng::derive_seed;
use crate::spectral::{auto_solver_name, default_solvers};
use crate::stats::sample_roots;

/// `t` balls around uniform roots drawn with `seed`.
pub fn sample_balls(
    g: &BoundedGraph,
    r: usize,
    t: usize,
    seed: u64,
    c: Option<&VertexColoring>,
) -> Result<Vec<RootedBall>> {
    if t == 0 {
        return Err(Error::Invalid("at least one sample is required".into()));
    }
    if let Some(c) = c {
        c.check_len(g.n())?;
    }
    let k = c.map_or(1, VertexColoring::k);
    Ok(sample_roots(g.n(), t, seed)
        .into_par_iter()
        .map(|v| BallTemplate::new(g, v, r).ball_with(k, |w| c.map_or(1, |c| c.get(w))))
        .collect())
}

pub trait Tester: Named + Send + Sync {
    fn radius(&self) -> usize;
    fn samples(&self) -> usize;
    /// Must depend only on the multiset of codes, not their order.
    fn decide(&self, balls: &[BallCode]) -> bool;
}

pub struct AlwaysYes {
    pub r: usize,
    pub t: usize,
}

impl Named for AlwaysYes {
    fn name(&self) -> &str {
        "always-yes"
    }
}

impl Tester for AlwaysYes {
    fn radius(&self) -> usize {
        self.r
    }

    fn samples(&self) -> usize {
        self.t
    }

    fn decide(&self, _balls: &[BallCode]) -> bool {
        true
    }
}

/// YES iff no sampled 1-ball contains a triangle.
pub struct TriangleFree {
    pub t: usize,
}

impl Named for TriangleFree {
    fn name(&self) -> &str {
        "triangle-free"
    }
}

fn has_triangle(ball: &RootedBall) -> bool {
    let adj = ball.adjacency();
    (0..adj.len()).any(|u| {
        adj[u].iter().any(|&v| {
            v > u && adj[v].iter().any(|&w| w > v && adj[u].contains(&w))
        })
    })
}

impl Tester for TriangleFree {
    fn radius(&self) -> usize {
        1
    }

    fn samples(&self) -> usize {
        self.t
    }

    fn decide(&self, balls: &[BallCode]) -> bool {
        balls
            .iter()
            .all(|code| !has_triangle(&RootedBall::decode(code).expect("valid ball code")))
    }
}

/// Reads 2-colored balls: YES iff no sampled ball has a bichromatic edge
/// and each color sits at the root of at least a `β/2` fraction of the
/// samples.
pub struct DisconnectionWitness {
    pub r: usize,
    pub t: usize,
    pub beta: f64,
}

impl Named for DisconnectionWitness {
    fn name(&self) -> &str {
        "disconnection-witness"
    }
}

impl Tester for DisconnectionWitness {
    fn radius(&self) -> usize {
        self.r
    }

    fn samples(&self) -> usize {
        self.t
    }

    fn decide(&self, balls: &[BallCode]) -> bool {
        let mut roots = [0usize; 2];
        for code in balls {
            let ball = RootedBall::decode(code).expect("valid ball code");
            let colors = ball.colors();
            let bichromatic = (0..colors.len())
                .any(|u| ball.neighbors(u).iter().any(|&v| colors[u] != colors[v]));
            if bichromatic || ball.k() != 2 {
                return false;
            }
            roots[colors[0] as usize - 1] += 1;
        }
        let floor = self.beta / 2.0 * balls.len() as f64;
        roots.iter().all(|&x| x as f64 >= floor)
    }
}

pub fn default_testers(r: usize, t: usize, beta: f64) -> Registry<dyn Tester> {
    let mut reg: Registry<dyn Tester> = Registry::new("tester");
    reg.register(Box::new(AlwaysYes { r, t }))
        .register(Box::new(TriangleFree { t }))
        .register(Box::new(DisconnectionWitness { r, t, beta }));
    reg
}

/// Fraction of `trials` independent runs answering YES. Trial `i` samples
/// with `derive_seed(seed, i)`.
pub fn run_tester(
    g: &BoundedGraph,
    tester: &dyn Tester,
    witness: Option<&VertexColoring>,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Invalid("at least one trial is required".into()));
    }
    let yes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let balls = sample_balls(
                g,
                tester.radius(),
                tester.samples(),
                derive_seed(seed, i as u64),
                witness,
            )?;
            let codes: Vec<BallCode> = balls.into_iter().map(|b| b.code().clone()).collect();
            Ok(usize::from(tester.decide(&codes)))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(yes as f64 / trials as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdOutcome {
    pub acceptance: f64,
    /// Index of the candidate witness achieving `acceptance`.
    pub witness: usize,
    pub per_witness: Vec<f64>,
}

/// Best acceptance of `tester` over the candidate witnesses, all evaluated
/// with the same trial seeds.
pub fn run_nd_tester(
    g: &BoundedGraph,
    tester: &dyn Tester,
    witnesses: &[VertexColoring],
    trials: usize,
    seed: u64,
) -> Result<NdOutcome> {
    if witnesses.is_empty() {
        return Err(Error::EmptySet);
    }
    let per_witness = witnesses
        .iter()
        .map(|w| run_tester(g, tester, Some(w), trials, seed))
        .collect::<Result<Vec<f64>>>()?;
    let mut witness = 0;
    for (i, &a) in per_witness.iter().enumerate() {
        if a > per_witness[witness] {
            witness = i;
        }
    }
    Ok(NdOutcome {
        acceptance: per_witness[witness],
        witness,
        per_witness,
    })
}

/// 2-colorings worth trying as disconnection witnesses: the structural
/// seeds (constants, component indicators, BFS layers, balanced cuts) and,
/// for connected graphs, the median cut of a Fiedler vector.
pub fn disconnection_candidates(g: &BoundedGraph) -> Result<Vec<VertexColoring>> {
    let mut out: Vec<VertexColoring> = Vec::new();
    for seeder in default_seeders().iter() {
        out.extend(seeder.colorings(g, 2));
    }
    if g.n() >= 2 && g.is_connected() {
        let solvers = default_solvers();
        let pair = solvers
            .get(auto_solver_name(g.n()))?
            .second_eigenpair(g, 1e-8)?;
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by(|&a, &b| pair.vector[a].total_cmp(&pair.vector[b]).then(a.cmp(&b)));
        let mut colors = vec![2u32; g.n()];
        for &v in &order[..g.n() / 2] {
            colors[v] = 1;
        }
        out.push(VertexColoring::new(2, colors)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisconnectionVerdict {
    pub verdict: bool,
    pub beta: f64,
    /// A coloring with no bichromatic edge and both classes of at least
    /// `βn` vertices.
    pub witness: Option<VertexColoring>,
    /// Component sizes in order of least vertex; the refutation when there
    /// is no witness.
    pub component_sizes: Vec<usize>,
}

/// True iff `c` has no bichromatic edge and both classes have at least
/// `βn` vertices.
pub fn is_disconnection_witness(g: &BoundedGraph, c: &VertexColoring, beta: f64) -> bool {
    if c.len() != g.n() || c.k() != 2 {
        return false;
    }
    let ones = c.colors().iter().filter(|&&x| x == 1).count();
    let floor = beta * g.n() as f64;
    g.edges().into_iter().all(|(u, v)| c.get(u) == c.get(v))
        && ones as f64 >= floor
        && (g.n() - ones) as f64 >= floor
}

/// Exact: a witness is a union of components, so the question is whether
/// some subset of component sizes sums into `[βn, n − βn]`. Among feasible
/// sums the one closest to `n/2` (then the smaller) is realized.
pub fn nd_test_disconnection(g: &BoundedGraph, beta: f64) -> Result<DisconnectionVerdict> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::Invalid(format!("beta must lie in (0, 1/2], got {beta}")));
    }
    let n = g.n();
    let (labels, count) = g.components();
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    // reach[i][s]: some subset of the first i components sums to s.
    let mut reach = vec![vec![false; n + 1]; count + 1];
    reach[0][0] = true;
    for i in 0..count {
        for s in 0..=n {
            if reach[i][s] {
                reach[i + 1][s] = true;
                if s + sizes[i] <= n {
                    reach[i + 1][s + sizes[i]] = true;
                }
            }
        }
    }
    let floor = beta * n as f64;
    let target = (0..=n)
        .filter(|&s| reach[count][s] && s as f64 >= floor && (n - s) as f64 >= floor)
        .min_by_key(|&s| ((2 * s).abs_diff(n), s));
    let witness = match target {
        None => None,
        Some(mut s) => {
            let mut chosen = vec![false; count];
            for i in (0..count).rev() {
                if !reach[i][s] {
                    chosen[i] = true;
                    s -= sizes[i];
                }
            }
            let c = VertexColoring::new(
                2,
                labels.iter().map(|&l| if chosen[l] { 1 } else { 2 }).collect(),
            )?;
            if !is_disconnection_witness(g, &c, beta) {
                return Err(Error::Invalid("subset-sum witness failed verification".into()));
            }
            Some(c)
        }
    };
    Ok(DisconnectionVerdict {
        verdict: witness.is_some(),
        beta,
        witness,
        component_sizes: sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{all_graphs, gen_complete, gen_cycle, gen_disjoint_union, gen_random_regular};
    use crate::quotient::coloring_count;

    fn brute_force(g: &BoundedGraph, beta: f64) -> bool {
        (0..coloring_count(g.n(), 2))
            .any(|i| is_disconnection_witness(g, &VertexColoring::from_index(g.n(), 2, i), beta))
    }

    #[test]
    fn vertex_transitive_sampling() {
        let g = gen_cycle(6).unwrap();
        let balls = sample_balls(&g, 1, 5, 3, None).unwrap();
        assert_eq!(balls.len(), 5);
        assert!(balls.iter().all(|b| b.code() == balls[0].code() && b.vertex_count() == 3));
        assert_eq!(
            sample_balls(&g, 1, 5, 3, None).unwrap(),
            balls
        );
    }

    #[test]
    fn simple_testers() {
        let k4 = gen_complete(4).unwrap();
        assert_eq!(run_tester(&k4, &AlwaysYes { r: 1, t: 3 }, None, 10, 0).unwrap(), 1.0);
        assert_eq!(run_tester(&k4, &TriangleFree { t: 1 }, None, 10, 0).unwrap(), 0.0);
        let c5 = gen_cycle(5).unwrap();
        assert_eq!(run_tester(&c5, &TriangleFree { t: 4 }, None, 10, 0).unwrap(), 1.0);
    }

    #[test]
    fn subset_sum_example() {
        let g = gen_disjoint_union(
            &gen_disjoint_union(&gen_cycle(50).unwrap(), &gen_cycle(30).unwrap()),
            &gen_cycle(20).unwrap(),
        );
        let v = nd_test_disconnection(&g, 0.45).unwrap();
        assert!(v.verdict);
        let w = v.witness.unwrap();
        assert_eq!(w.colors().iter().filter(|&&x| x == 1).count(), 50);
        assert!(nd_test_disconnection(&g, 0.5).unwrap().verdict);
        let two = gen_disjoint_union(&gen_cycle(30).unwrap(), &gen_cycle(20).unwrap());
        assert!(!nd_test_disconnection(&two, 0.45).unwrap().verdict);
    }

    #[test]
    fn union_and_connected() {
        let g = gen_random_regular(20, 3, 2).unwrap();
        let u = gen_disjoint_union(&g, &g);
        let yes = nd_test_disconnection(&u, 0.25).unwrap();
        assert!(yes.verdict);
        assert_eq!(yes.component_sizes, vec![20, 20]);
        for beta in [0.001, 0.25, 0.5] {
            assert!(!nd_test_disconnection(&g, beta).unwrap().verdict);
        }
        assert!(nd_test_disconnection(&g, 0.0).is_err());
    }

    #[test]
    fn agrees_with_brute_force_on_small_graphs() {
        for n in 1..=6 {
            for g in all_graphs(n, n.saturating_sub(1)) {
                for beta in [0.1, 0.25, 0.4, 0.5] {
                    assert_eq!(
                        nd_test_disconnection(&g, beta).unwrap().verdict,
                        brute_force(&g, beta)
                    );
                }
            }
        }
    }

    #[test]
    fn nd_tester_separates_expander_from_union() {
        let g = gen_random_regular(300, 3, 5).unwrap();
        let u = gen_disjoint_union(&g, &g);
        let tester = DisconnectionWitness { r: 2, t: 200, beta: 0.25 };
        let on_g = run_nd_tester(&g, &tester, &disconnection_candidates(&g).unwrap(), 20, 1).unwrap();
        let on_u = run_nd_tester(&u, &tester, &disconnection_candidates(&u).unwrap(), 20, 1).unwrap();
        assert_eq!(on_g.acceptance, 0.0);
        assert_eq!(on_u.acceptance, 1.0);
    }
}

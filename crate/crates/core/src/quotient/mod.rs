//! Quotient sets `Q_{G,r,k}`: the set of colored-neighborhood statistics
//! `P_{G,r}[c]` over all `k`-colorings `c`, and the Hausdorff distance they
//! induce between graphs.
//!
//! Exact sets enumerate all `k^n` colorings. Search sets are lower
//! approximations: every member is realized by a stored witness coloring.

mod certify;
mod evaluator;
mod seeders;

pub use certify::{
    certified_separation_bound, component_indicator_distribution, SeparationCertificate,
    BALANCE_WINDOW, MARGINAL_BOUND,
};
pub use evaluator::{ColoringEvaluator, Templates};
pub use seeders::{default_seeders, transport_coloring, BalancedCut, BfsLayers, Components, Constant, Seeder};

use num_rational::Ratio;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balls::RootedBall;
use crate::error::{Error, Result};
use crate::graph::{BoundedGraph, VertexColoring};
use crate::rng::{derive_seed, rng_from, Rng};
use crate::stats::{
    ratio_to_f64, tv_distance_exact, BallDistribution, Completeness, DistributionSet,
};

/// Hard cap on `k^n` for exhaustive enumeration.
pub const EXACT_COLORING_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Largest `k^n` the caller is willing to enumerate exhaustively.
    pub max_colorings_enumerated: u64,
    /// Uniformly random colorings evaluated before annealing.
    pub random_colorings: usize,
    pub restarts: usize,
    pub steps: usize,
    pub initial_temperature: f64,
    /// Temperature at step `s` is `initial_temperature * cooling^s`.
    pub cooling: f64,
    /// Members per side that receive a best-response search when estimating
    /// a distance from search sets.
    pub response_targets: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_colorings_enumerated: EXACT_COLORING_LIMIT,
            random_colorings: 64,
            restarts: 4,
            steps: 400,
            initial_temperature: 0.05,
            cooling: 0.995,
            response_targets: 16,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("max_colorings_enumerated", self.max_colorings_enumerated as usize),
            ("random_colorings", self.random_colorings),
            ("restarts", self.restarts),
            ("steps", self.steps),
            ("response_targets", self.response_targets),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Invalid(format!("budget field {name} must be >= 1")));
        }
        if !(self.initial_temperature > 0.0) || !(self.cooling > 0.0 && self.cooling <= 1.0) {
            return Err(Error::Invalid("temperature schedule out of range".into()));
        }
        Ok(())
    }

    fn temperature(&self, step: usize) -> f64 {
        self.initial_temperature * self.cooling.powi(step as i32)
    }
}

/// `k^n`, saturating.
pub fn coloring_count(n: usize, k: u32) -> u64 {
    let mut total: u64 = 1;
    for _ in 0..n {
        total = total.saturating_mul(u64::from(k));
    }
    total
}

/// Whether exhaustive enumeration is allowed for `(n, k)` under `cap`.
pub fn exact_feasible(n: usize, k: u32, cap: u64) -> bool {
    coloring_count(n, k) <= cap.min(EXACT_COLORING_LIMIT)
}

/// The full set `{P_{G,r}[c]}` over all `k^n` colorings; each member's
/// witness is its lowest-index coloring.
pub fn quotient_set_exact(g: &BoundedGraph, r: usize, k: u32) -> Result<DistributionSet> {
    let total = coloring_count(g.n(), k);
    if total > EXACT_COLORING_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "{k}^{} colorings exceed the exact limit of {EXACT_COLORING_LIMIT}",
            g.n()
        )));
    }
    let templates = Templates::new(g, r);
    const CHUNK: u64 = 1 << 12;
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let partial: Vec<DistributionSet> = chunks
        .par_iter()
        .map(|&chunk| -> Result<DistributionSet> {
            let mut set = DistributionSet::new(r, k, Completeness::Exact);
            for index in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                let c = VertexColoring::from_index(g.n(), k, index);
                let d = templates.distribution(k, c.colors())?;
                if !set.contains(&d) {
                    set.insert(d, Some(c))?;
                }
            }
            Ok(set)
        })
        .collect::<Result<_>>()?;
    let mut out = DistributionSet::new(r, k, Completeness::Exact);
    for set in partial {
        out.absorb(set)?;
    }
    Ok(out)
}

fn random_coloring(rng: &mut Rng, n: usize, k: u32) -> VertexColoring {
    VertexColoring::new(k, (0..n).map(|_| rng.gen_range(1..=k)).collect()).expect("in palette")
}

fn distance_f64(set: &DistributionSet, d: &BallDistribution) -> Result<f64> {
    set.distance_to_exact(d).map(|x| ratio_to_f64(&x))
}

/// Lower approximation of `Q_{G,r,k}`: structured seeds, uniformly random
/// colorings, then annealing restarts that push away from the set found so
/// far. Deterministic in `budget.seed`; enlarging any budget count while
/// keeping the seed only adds members.
pub fn quotient_set_search(
    g: &BoundedGraph,
    r: usize,
    k: u32,
    budget: &SearchBudget,
) -> Result<DistributionSet> {
    quotient_set_search_with(g, r, k, budget, &default_seeders())
}

pub fn quotient_set_search_with(
    g: &BoundedGraph,
    r: usize,
    k: u32,
    budget: &SearchBudget,
    seeders: &crate::registry::Registry<dyn Seeder>,
) -> Result<DistributionSet> {
    budget.validate()?;
    if k == 0 {
        return Err(Error::Invalid("palette must have at least one color".into()));
    }
    let templates = Templates::new(g, r);
    let mut seeded = DistributionSet::new(r, k, Completeness::LowerApproximation);
    for seeder in seeders.iter() {
        for c in seeder.colorings(g, k) {
            seeded.insert(templates.distribution(k, c.colors())?, Some(c))?;
        }
    }
    let mut out = seeded.clone();
    let mut rng = rng_from(derive_seed(budget.seed, 0));
    for _ in 0..budget.random_colorings {
        let c = random_coloring(&mut rng, g.n(), k);
        let d = templates.distribution(k, c.colors())?;
        if !out.contains(&d) {
            out.insert(d, Some(c))?;
        }
    }
    if k >= 2 && g.n() > 0 {
        let restarts: Vec<DistributionSet> = (0..budget.restarts)
            .into_par_iter()
            .map(|i| expand_by_annealing(g, &templates, k, &seeded, budget, derive_seed(budget.seed, 1 + i as u64)))
            .collect::<Result<_>>()?;
        for found in restarts {
            out.absorb(found)?;
        }
    }
    Ok(out)
}

/// One annealing run maximizing the distance from the current coloring's
/// statistics to the set known to this run. Returns the members it added.
fn expand_by_annealing(
    g: &BoundedGraph,
    templates: &Templates,
    k: u32,
    base: &DistributionSet,
    budget: &SearchBudget,
    seed: u64,
) -> Result<DistributionSet> {
    let mut rng = rng_from(seed);
    let mut known = base.clone();
    let mut found = DistributionSet::new(base.r(), k, Completeness::LowerApproximation);
    let start = random_coloring(&mut rng, g.n(), k);
    let mut eval = ColoringEvaluator::new(templates, &start);
    let first = eval.distribution();
    let mut current = distance_f64(&known, &first)?;
    if current > 0.0 {
        known.insert(first.clone(), Some(start.clone()))?;
        found.insert(first, Some(start))?;
        current = 0.0;
    }
    for step in 0..budget.steps {
        let v = rng.gen_range(0..g.n());
        let shift = rng.gen_range(1..k);
        let new_color = (eval.color(v) - 1 + shift) % k + 1;
        let old_color = eval.recolor(v, new_color);
        let candidate = eval.distribution();
        let d = distance_f64(&known, &candidate)?;
        let temperature = budget.temperature(step);
        let accept = d >= current || rng.gen::<f64>() < ((d - current) / temperature).exp();
        if accept {
            current = d;
            if d > 0.0 {
                let witness = eval.coloring();
                known.insert(candidate.clone(), Some(witness.clone()))?;
                found.insert(candidate, Some(witness))?;
                current = 0.0;
            }
        } else {
            eval.recolor(v, old_color);
        }
    }
    Ok(found)
}

/// Fraction of roots carrying each color `1..=k`.
pub fn root_color_fractions(d: &BallDistribution) -> Result<Vec<f64>> {
    let mut out = vec![0.0; d.k() as usize];
    for (code, p) in d.iter() {
        let ball = RootedBall::decode(code)?;
        out[ball.colors()[0] as usize - 1] += *p.numer() as f64 / *p.denom() as f64;
    }
    Ok(out)
}

/// Result of a best-response search.
#[derive(Debug, Clone)]
pub struct Response {
    pub distance: Ratio<u128>,
    pub distribution: BallDistribution,
    pub witness: VertexColoring,
}

/// Searches for a coloring of `g` whose statistics are close to `target`.
/// Restart 0 starts from the BFS-order transport of the target's root-color
/// marginal; later restarts start from a random permutation of it.
pub fn best_response(
    g: &BoundedGraph,
    target: &BallDistribution,
    budget: &SearchBudget,
    seed: u64,
) -> Result<Response> {
    budget.validate()?;
    let (r, k) = (target.r(), target.k());
    let templates = Templates::new(g, r);
    let fractions = root_color_fractions(target)?;
    let transport = transport_coloring(g, k, &fractions);
    let runs: Vec<Response> = (0..budget.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(derive_seed(seed, i as u64));
            let start = if i == 0 {
                transport.clone()
            } else {
                let mut colors = transport.colors().to_vec();
                rand::seq::SliceRandom::shuffle(colors.as_mut_slice(), &mut rng);
                VertexColoring::new(k, colors).expect("in palette")
            };
            anneal_towards(g, &templates, target, start, budget, &mut rng)
        })
        .collect::<Result<_>>()?;
    // First-found wins ties.
    let mut best: Option<Response> = None;
    for run in runs {
        if best.as_ref().is_none_or(|b| run.distance < b.distance) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn anneal_towards(
    g: &BoundedGraph,
    templates: &Templates,
    target: &BallDistribution,
    start: VertexColoring,
    budget: &SearchBudget,
    rng: &mut Rng,
) -> Result<Response> {
    let k = target.k();
    let mut eval = ColoringEvaluator::new(templates, &start);
    let first = eval.distribution();
    let mut current = tv_distance_exact(target, &first)?;
    let mut best = Response {
        distance: current,
        distribution: first,
        witness: start,
    };
    if k < 2 || g.n() == 0 {
        return Ok(best);
    }
    for step in 0..budget.steps {
        if best.distance == Ratio::from_integer(0) {
            break;
        }
        let v = rng.gen_range(0..g.n());
        let shift = rng.gen_range(1..k);
        let new_color = (eval.color(v) - 1 + shift) % k + 1;
        let old_color = eval.recolor(v, new_color);
        let candidate = eval.distribution();
        let d = tv_distance_exact(target, &candidate)?;
        let delta = ratio_to_f64(&d) - ratio_to_f64(&current);
        let accept = d <= current || rng.gen::<f64>() < (-delta / budget.temperature(step)).exp();
        if accept {
            current = d;
            if d < best.distance {
                best = Response {
                    distance: d,
                    distribution: candidate,
                    witness: eval.coloring(),
                };
            }
        } else {
            eval.recolor(v, old_color);
        }
    }
    Ok(best)
}

/// One direction of a Hausdorff distance with the pair attaining it.
#[derive(Debug, Clone)]
pub struct DirectedEstimate {
    pub value: Ratio<u128>,
    /// Witness of the farthest member of the source set.
    pub source_witness: Option<VertexColoring>,
    /// Witness of its nearest member in the other set.
    pub response_witness: Option<VertexColoring>,
}

#[derive(Debug, Clone)]
pub struct HausdorffEstimate {
    pub value: f64,
    pub exact_value: Ratio<u128>,
    /// True when both quotient sets were enumerated exhaustively.
    pub certified: bool,
    /// From the first graph's set to the second's.
    pub forward: DirectedEstimate,
    pub backward: DirectedEstimate,
}

/// Directed distance `max_a min_b tv(a, b)` with the attaining pair; ties
/// resolve to the first member in set order.
pub fn directed_with_witness(a: &DistributionSet, b: &DistributionSet) -> Result<DirectedEstimate> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let nearest: Vec<(Ratio<u128>, usize)> = a
        .members()
        .par_iter()
        .map(|m| {
            let mut best = (None::<Ratio<u128>>, 0);
            for (j, other) in b.members().iter().enumerate() {
                let t = tv_distance_exact(&m.distribution, &other.distribution)?;
                if best.0.as_ref().is_none_or(|x| t < *x) {
                    best = (Some(t), j);
                }
            }
            Ok((best.0.expect("non-empty"), best.1))
        })
        .collect::<Result<_>>()?;
    let mut arg = 0;
    for (i, (d, _)) in nearest.iter().enumerate() {
        if *d > nearest[arg].0 {
            arg = i;
        }
    }
    let (value, j) = nearest[arg];
    Ok(DirectedEstimate {
        value,
        source_witness: a.members()[arg].witness.clone(),
        response_witness: b.members()[j].witness.clone(),
    })
}

fn combine(forward: DirectedEstimate, backward: DirectedEstimate, certified: bool) -> HausdorffEstimate {
    let exact_value = forward.value.max(backward.value);
    HausdorffEstimate {
        value: ratio_to_f64(&exact_value),
        exact_value,
        certified,
        forward,
        backward,
    }
}

/// Exact Hausdorff distance between `Q_{G1,r,k}` and `Q_{G2,r,k}`.
pub fn exact_hausdorff(g1: &BoundedGraph, g2: &BoundedGraph, r: usize, k: u32) -> Result<HausdorffEstimate> {
    let a = quotient_set_exact(g1, r, k)?;
    let b = quotient_set_exact(g2, r, k)?;
    Ok(combine(
        directed_with_witness(&a, &b)?,
        directed_with_witness(&b, &a)?,
        true,
    ))
}

/// Distance between the quotient sets of two graphs: exact and certified
/// when both sides can be enumerated within the budget, otherwise an
/// uncertified estimate from search sets refined by best responses.
pub fn estimate_hausdorff(
    g1: &BoundedGraph,
    g2: &BoundedGraph,
    r: usize,
    k: u32,
    budget: &SearchBudget,
) -> Result<HausdorffEstimate> {
    budget.validate()?;
    let cap = budget.max_colorings_enumerated;
    if exact_feasible(g1.n(), k, cap) && exact_feasible(g2.n(), k, cap) {
        return exact_hausdorff(g1, g2, r, k);
    }
    let mut a = quotient_set_search(g1, r, k, budget)?;
    let mut b_budget = budget.clone();
    b_budget.seed = derive_seed(budget.seed, 0xb);
    let mut b = quotient_set_search(g2, r, k, &b_budget)?;
    let a_responses = respond_to(g2, &a, &b, budget, derive_seed(budget.seed, 0xab))?;
    let b_responses = respond_to(g1, &b, &a, budget, derive_seed(budget.seed, 0xba))?;
    b.absorb(a_responses)?;
    a.absorb(b_responses)?;
    Ok(combine(
        directed_with_witness(&a, &b)?,
        directed_with_witness(&b, &a)?,
        false,
    ))
}

/// Best responses on `g` to the members of `targets` that are currently
/// farthest from `current`.
fn respond_to(
    g: &BoundedGraph,
    targets: &DistributionSet,
    current: &DistributionSet,
    budget: &SearchBudget,
    seed: u64,
) -> Result<DistributionSet> {
    let mut ranked: Vec<(Ratio<u128>, usize)> = targets
        .distributions()
        .enumerate()
        .map(|(i, d)| current.distance_to_exact(d).map(|x| (x, i)))
        .collect::<Result<_>>()?;
    ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    ranked.truncate(budget.response_targets);
    let responses: Vec<Response> = ranked
        .par_iter()
        .map(|&(_, i)| {
            best_response(
                g,
                &targets.members()[i].distribution,
                budget,
                derive_seed(seed, i as u64),
            )
        })
        .collect::<Result<_>>()?;
    let mut out = DistributionSet::new(targets.r(), targets.k(), Completeness::LowerApproximation);
    for resp in responses {
        out.insert(resp.distribution, Some(resp.witness))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle, gen_disjoint_union, gen_random_regular};
    use crate::stats::ball_distribution;

    fn small_budget(seed: u64) -> SearchBudget {
        SearchBudget {
            random_colorings: 8,
            restarts: 2,
            steps: 60,
            seed,
            ..SearchBudget::default()
        }
    }

    #[test]
    fn uncolored_quotient_is_a_singleton() {
        let g = gen_random_regular(10, 3, 1).unwrap();
        let q = quotient_set_exact(&g, 2, 1).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(
            q.members()[0].distribution,
            ball_distribution(&g, 2, None).unwrap()
        );
    }

    #[test]
    fn k2_has_three_statistics() {
        let q = quotient_set_exact(&gen_complete(2).unwrap(), 1, 2).unwrap();
        assert_eq!(q.len(), 3);
    }

    #[test]
    fn exact_guard() {
        let g = gen_cycle(21).unwrap();
        assert!(matches!(
            quotient_set_exact(&g, 1, 2),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn search_is_sound_and_seeded() {
        let g = gen_cycle(8).unwrap();
        let exact = quotient_set_exact(&g, 1, 2).unwrap();
        let found = quotient_set_search(&g, 1, 2, &small_budget(3)).unwrap();
        for m in found.members() {
            assert!(exact.contains(&m.distribution));
            let w = m.witness.as_ref().unwrap();
            assert_eq!(ball_distribution(&g, 1, Some(w)).unwrap(), m.distribution);
        }
        for color in 1..=2 {
            let c = VertexColoring::constant(8, 2, color).unwrap();
            assert!(found.contains(&ball_distribution(&g, 1, Some(&c)).unwrap()));
        }
    }

    #[test]
    fn search_grows_with_budget() {
        let g = gen_random_regular(12, 3, 8).unwrap();
        let small = quotient_set_search(&g, 1, 2, &small_budget(5)).unwrap();
        let mut bigger = small_budget(5);
        bigger.restarts = 3;
        bigger.steps = 120;
        bigger.random_colorings = 20;
        let large = quotient_set_search(&g, 1, 2, &bigger).unwrap();
        assert!(small.distributions().all(|d| large.contains(d)));
        assert!(large.len() >= small.len());
    }

    #[test]
    fn identical_graphs_are_at_distance_zero() {
        let g = gen_cycle(6).unwrap();
        let est = estimate_hausdorff(&g, &g, 1, 2, &SearchBudget::default()).unwrap();
        assert!(est.certified);
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn union_with_itself_at_k1() {
        let g = gen_random_regular(12, 3, 2).unwrap();
        let gg = gen_disjoint_union(&g, &g);
        for r in 1..=2 {
            let est = estimate_hausdorff(&g, &gg, r, 1, &small_budget(1)).unwrap();
            assert_eq!(est.value, 0.0);
        }
    }

    #[test]
    fn best_response_finds_exact_match_for_realizable_target() {
        let c4 = gen_cycle(4).unwrap();
        let u = gen_disjoint_union(&c4, &c4);
        let target_coloring = VertexColoring::new(2, vec![1, 2, 1, 2, 1, 2, 1, 2]).unwrap();
        let target = ball_distribution(&u, 1, Some(&target_coloring)).unwrap();
        let c8 = gen_cycle(8).unwrap();
        let resp = best_response(&c8, &target, &small_budget(2), 11).unwrap();
        assert_eq!(resp.distance, Ratio::from_integer(0));
    }
}

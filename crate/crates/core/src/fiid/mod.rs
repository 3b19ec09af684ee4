//! Factor-of-i.i.d. local rules on finite graphs.
//!
//! Every vertex receives an independent uniform 64-bit weight; a rule of
//! radius `r` maps the weighted r-ball around a vertex to a color, and is
//! applied at all vertices simultaneously.

mod quasirandom;
mod rules;

pub use quasirandom::{quasirandom_deficiency, quasirandom_deficiency_exact, EXACT_OVERLAY_MAX_BALL};
pub use rules::{default_rules, LocalMin2Hop, LocalMinIndependentSet, UniformColor};

use rayon::prelude::*;

use crate::balls::BallTemplate;
use crate::error::Result;
use crate::graph::{BoundedGraph, VertexColoring};
use crate::registry::Named;
use crate::rng::{keyed, unit_f64};

/// Per-vertex i.i.d. weights, a pure function of `(seed, vertex)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightAssignment {
    seed: u64,
}

impl WeightAssignment {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Raw 64-bit weight; comparisons use this resolution.
    pub fn bits(&self, v: usize) -> u64 {
        keyed(self.seed, v as u64)
    }

    /// The weight as a number in `[0, 1)`.
    pub fn weight(&self, v: usize) -> f64 {
        unit_f64(self.bits(v))
    }
}

/// An r-ball decorated with weights. Local vertex 0 is the root; other
/// vertices appear in BFS order, which carries no meaning: rules must only
/// use isomorphism-invariant information.
#[derive(Debug, Clone)]
pub struct WeightedBall {
    pub adjacency: Vec<Vec<usize>>,
    pub distances: Vec<usize>,
    pub weights: Vec<u64>,
}

impl WeightedBall {
    pub fn extract(g: &BoundedGraph, v: usize, r: usize, weight: impl Fn(usize) -> u64) -> Self {
        let t = BallTemplate::new(g, v, r);
        Self {
            adjacency: t.local_adjacency().to_vec(),
            distances: t.local_distances().to_vec(),
            weights: t.vertices().iter().map(|&w| weight(w)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn root_weight(&self) -> u64 {
        self.weights[0]
    }
}

pub trait FiidRule: Named + Send + Sync {
    fn radius(&self) -> usize;
    /// Colors are `1..=palette()`.
    fn palette(&self) -> u32;
    fn color(&self, ball: &WeightedBall) -> u32;
}

/// Applies `rule` at every vertex with weights drawn from `seed`.
pub fn run_rule(g: &BoundedGraph, rule: &dyn FiidRule, seed: u64) -> Result<VertexColoring> {
    let weights = WeightAssignment::new(seed);
    run_rule_with(g, rule, |v| weights.bits(v))
}

/// As [`run_rule`] with explicit weights.
pub fn run_rule_with(
    g: &BoundedGraph,
    rule: &dyn FiidRule,
    weight: impl Fn(usize) -> u64 + Sync,
) -> Result<VertexColoring> {
    let colors: Vec<u32> = (0..g.n())
        .into_par_iter()
        .map(|v| rule.color(&WeightedBall::extract(g, v, rule.radius(), &weight)))
        .collect();
    VertexColoring::new(rule.palette(), colors)
}

/// Fraction of vertices colored `color`.
pub fn color_density(c: &VertexColoring, color: u32) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    c.colors().iter().filter(|&&x| x == color).count() as f64 / c.len() as f64
}

/// True iff no edge joins two vertices colored `color`.
pub fn is_independent(g: &BoundedGraph, c: &VertexColoring, color: u32) -> bool {
    g.edges()
        .into_iter()
        .all(|(u, v)| !(c.get(u) == color && c.get(v) == color))
}

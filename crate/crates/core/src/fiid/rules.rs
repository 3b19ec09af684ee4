use super::{FiidRule, WeightedBall};
use crate::registry::{Named, Registry};
use crate::rng::unit_f64;

/// Selects a vertex (color 1) iff its weight is strictly below every
/// neighbor's; otherwise color 2. Ties are never selected.
pub struct LocalMinIndependentSet;

impl Named for LocalMinIndependentSet {
    fn name(&self) -> &str {
        "local-min-is"
    }
}

impl FiidRule for LocalMinIndependentSet {
    fn radius(&self) -> usize {
        1
    }

    fn palette(&self) -> u32 {
        2
    }

    fn color(&self, ball: &WeightedBall) -> u32 {
        let root = ball.root_weight();
        if ball.adjacency[0].iter().all(|&w| root < ball.weights[w]) {
            1
        } else {
            2
        }
    }
}

/// Selects a vertex iff its weight is the strict minimum of its 2-ball,
/// giving a set with pairwise distances at least 3.
pub struct LocalMin2Hop;

impl Named for LocalMin2Hop {
    fn name(&self) -> &str {
        "local-min-2hop"
    }
}

impl FiidRule for LocalMin2Hop {
    fn radius(&self) -> usize {
        2
    }

    fn palette(&self) -> u32 {
        2
    }

    fn color(&self, ball: &WeightedBall) -> u32 {
        let root = ball.root_weight();
        if ball.weights[1..].iter().all(|&w| root < w) {
            1
        } else {
            2
        }
    }
}

/// Radius-0 rule: the root's weight picks one of `k` colors uniformly.
pub struct UniformColor {
    k: u32,
    name: String,
}

impl UniformColor {
    pub fn new(k: u32) -> Self {
        Self {
            k: k.max(1),
            name: format!("uniform-{}", k.max(1)),
        }
    }
}

impl Named for UniformColor {
    fn name(&self) -> &str {
        &self.name
    }
}

impl FiidRule for UniformColor {
    fn radius(&self) -> usize {
        0
    }

    fn palette(&self) -> u32 {
        self.k
    }

    fn color(&self, ball: &WeightedBall) -> u32 {
        ((unit_f64(ball.root_weight()) * f64::from(self.k)) as u32).min(self.k - 1) + 1
    }
}

pub fn default_rules() -> Registry<dyn FiidRule> {
    let mut reg: Registry<dyn FiidRule> = Registry::new("rule");
    reg.register(Box::new(LocalMinIndependentSet))
        .register(Box::new(LocalMin2Hop))
        .register(Box::new(UniformColor::new(2)))
        .register(Box::new(UniformColor::new(3)));
    reg
}

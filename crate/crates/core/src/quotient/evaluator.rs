use std::collections::BTreeMap;

use crate::balls::{BallCode, BallTemplate};
use crate::error::Result;
use crate::graph::{BoundedGraph, VertexColoring};
use crate::stats::{BallDistribution, Provenance};

/// Ball structures of every root of a graph at a fixed radius.
#[derive(Debug, Clone)]
pub struct Templates {
    r: usize,
    balls: Vec<BallTemplate>,
}

impl Templates {
    pub fn new(g: &BoundedGraph, r: usize) -> Self {
        Self {
            r,
            balls: (0..g.n()).map(|v| BallTemplate::new(g, v, r)).collect(),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.balls.len()
    }

    pub fn code(&self, root: usize, k: u32, colors: &[u32]) -> BallCode {
        self.balls[root]
            .ball_with(k, |w| colors[w])
            .code()
            .clone()
    }

    pub fn distribution(&self, k: u32, colors: &[u32]) -> Result<BallDistribution> {
        let mut counts = BTreeMap::new();
        for v in 0..self.n() {
            *counts.entry(self.code(v, k, colors)).or_insert(0) += 1;
        }
        BallDistribution::from_counts(self.r, k, Provenance::Exact, counts)
    }

    /// Roots whose ball contains `v` (balls are symmetric in distance).
    pub fn roots_seeing(&self, v: usize) -> &[usize] {
        self.balls[v].vertices()
    }
}

/// Tracks `P_{G,r}[c]` under single-vertex recolorings.
#[derive(Debug, Clone)]
pub struct ColoringEvaluator<'t> {
    templates: &'t Templates,
    k: u32,
    colors: Vec<u32>,
    codes: Vec<BallCode>,
    counts: BTreeMap<BallCode, u64>,
}

impl<'t> ColoringEvaluator<'t> {
    pub fn new(templates: &'t Templates, coloring: &VertexColoring) -> Self {
        let colors = coloring.colors().to_vec();
        let k = coloring.k();
        let codes: Vec<BallCode> = (0..templates.n())
            .map(|v| templates.code(v, k, &colors))
            .collect();
        let mut counts = BTreeMap::new();
        for c in &codes {
            *counts.entry(c.clone()).or_insert(0) += 1;
        }
        Self {
            templates,
            k,
            colors,
            codes,
            counts,
        }
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn coloring(&self) -> VertexColoring {
        VertexColoring::new(self.k, self.colors.clone()).expect("colors stay in palette")
    }

    /// Recolors `v`, returning the previous color.
    pub fn recolor(&mut self, v: usize, color: u32) -> u32 {
        let old = std::mem::replace(&mut self.colors[v], color);
        if old == color {
            return old;
        }
        for &root in self.templates.roots_seeing(v) {
            let fresh = self.templates.code(root, self.k, &self.colors);
            let stale = std::mem::replace(&mut self.codes[root], fresh.clone());
            if let Some(c) = self.counts.get_mut(&stale) {
                *c -= 1;
                if *c == 0 {
                    self.counts.remove(&stale);
                }
            }
            *self.counts.entry(fresh).or_insert(0) += 1;
        }
        old
    }

    pub fn distribution(&self) -> BallDistribution {
        BallDistribution::from_counts(
            self.templates.r(),
            self.k,
            Provenance::Exact,
            self.counts.clone(),
        )
        .expect("graph has vertices")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_random_regular;
    use crate::stats::ball_distribution;

    #[test]
    fn incremental_matches_recomputation() {
        let g = gen_random_regular(16, 3, 4).unwrap();
        let t = Templates::new(&g, 2);
        let start = VertexColoring::from_index(16, 3, 12345);
        let mut eval = ColoringEvaluator::new(&t, &start);
        for (step, v) in [3usize, 7, 3, 15, 0, 9].into_iter().enumerate() {
            eval.recolor(v, (step as u32 % 3) + 1);
            let direct = ball_distribution(&g, 2, Some(&eval.coloring())).unwrap();
            assert_eq!(eval.distribution(), direct);
        }
    }
}

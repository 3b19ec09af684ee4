//! Distance of a coloring from independent uniform colors.
//!
//! For a base coloring `h` (palette `l`) and a coloring `c` (palette `k`),
//! the reference measure `μ_{r,h,k}` is the law of the `h`-colored r-ball
//! at a uniform root with independent uniform `k`-colors laid over it. The
//! deficiency of `c` is `d_var(P_{G,r}[c × h], μ_{r,h,k})`; deficiency at
//! most ε makes `c` (r, ε)-quasirandom relative to `h`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::balls::{BallCode, BallTemplate};
use crate::error::{Error, Result};
use crate::graph::{BoundedGraph, VertexColoring};
use crate::rng::{derive_seed, keyed, unit_f64};
use crate::stats::{
    ball_distribution, ratio_to_f64, tv_distance_exact, BallDistribution, Provenance,
};

/// Balls up to this size are expanded exhaustively in exact mode.
pub const EXACT_OVERLAY_MAX_BALL: usize = 6;

fn check_inputs(g: &BoundedGraph, c: &VertexColoring, h: &VertexColoring) -> Result<()> {
    c.check_len(g.n())?;
    h.check_len(g.n())
}

/// Product color of overlay `a ∈ 1..=k` with base color `b`, matching
/// [`VertexColoring::product`].
#[inline]
fn product_color(a: u32, b: u32, k: u32) -> u32 {
    (b - 1) * k + a
}

/// Monte Carlo deficiency. Roots are stratified: every vertex receives
/// `ceil(mc_samples / n)` independent overlays, so only the overlay is
/// sampled.
pub fn quasirandom_deficiency(
    g: &BoundedGraph,
    c: &VertexColoring,
    h: &VertexColoring,
    r: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<f64> {
    if mc_samples == 0 {
        return Err(Error::Invalid("mc_samples must be at least 1".into()));
    }
    check_inputs(g, c, h)?;
    let k = c.k();
    let actual = ball_distribution(g, r, Some(&c.product(h)?))?;
    let per_root = mc_samples.div_ceil(g.n().max(1)) as u64;
    let counts = (0..g.n())
        .into_par_iter()
        .fold(BTreeMap::<BallCode, u64>::new, |mut acc, root| {
            let t = BallTemplate::new(g, root, r);
            for s in 0..per_root {
                let key = derive_seed(seed, root as u64 * per_root + s);
                let ball = t.ball_with_local(k * h.k(), |i| {
                    let overlay =
                        ((unit_f64(keyed(key, i as u64)) * f64::from(k)) as u32).min(k - 1) + 1;
                    product_color(overlay, h.get(t.vertices()[i]), k)
                });
                *acc.entry(ball.code().clone()).or_insert(0) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (code, w) in b {
                *a.entry(code).or_insert(0) += w;
            }
            a
        });
    let reference = BallDistribution::from_counts(
        r,
        k * h.k(),
        Provenance::Sampled {
            samples: per_root as usize * g.n(),
            seed,
        },
        counts,
    )?;
    Ok(ratio_to_f64(&tv_distance_exact(&actual, &reference)?))
}

/// Exact deficiency, expanding all `k^|B|` overlays of every ball. Fails
/// with `BudgetExceeded` if some ball has more than
/// [`EXACT_OVERLAY_MAX_BALL`] vertices.
pub fn quasirandom_deficiency_exact(
    g: &BoundedGraph,
    c: &VertexColoring,
    h: &VertexColoring,
    r: usize,
) -> Result<Ratio<u128>> {
    check_inputs(g, c, h)?;
    let k = c.k();
    let templates: Vec<BallTemplate> = (0..g.n()).map(|v| BallTemplate::new(g, v, r)).collect();
    let largest = templates.iter().map(|t| t.vertices().len()).max().unwrap_or(0);
    if largest > EXACT_OVERLAY_MAX_BALL {
        return Err(Error::BudgetExceeded(format!(
            "exact overlay needs balls of at most {EXACT_OVERLAY_MAX_BALL} vertices, found {largest}"
        )));
    }
    let mut counts: BTreeMap<BallCode, u64> = BTreeMap::new();
    for t in &templates {
        let size = t.vertices().len();
        let overlays = u64::from(k).pow(size as u32);
        let weight = u64::from(k).pow((largest - size) as u32);
        for index in 0..overlays {
            let overlay = VertexColoring::from_index(size, k, index);
            let ball = t.ball_with_local(k * h.k(), |i| {
                product_color(overlay.get(i), h.get(t.vertices()[i]), k)
            });
            *counts.entry(ball.code().clone()).or_insert(0) += weight;
        }
    }
    let reference = BallDistribution::from_counts(r, k * h.k(), Provenance::Exact, counts)?;
    let actual = ball_distribution(g, r, Some(&c.product(h)?))?;
    tv_distance_exact(&actual, &reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle};

    #[test]
    fn k2_constant_coloring_has_deficiency_three_quarters() {
        let g = gen_complete(2).unwrap();
        let c = VertexColoring::constant(2, 2, 1).unwrap();
        let h = VertexColoring::constant(2, 1, 1).unwrap();
        assert_eq!(
            quasirandom_deficiency_exact(&g, &c, &h, 1).unwrap(),
            Ratio::new(3, 4)
        );
    }

    #[test]
    fn one_color_has_no_deficiency() {
        let g = gen_cycle(9).unwrap();
        let c = VertexColoring::constant(9, 1, 1).unwrap();
        let h = VertexColoring::from_index(9, 2, 0b1_0110_1101);
        assert_eq!(quasirandom_deficiency(&g, &c, &h, 1, 500, 3).unwrap(), 0.0);
        assert_eq!(
            quasirandom_deficiency_exact(&g, &c, &h, 1).unwrap(),
            Ratio::from_integer(0)
        );
    }

    #[test]
    fn monte_carlo_approaches_exact() {
        let g = gen_cycle(12).unwrap();
        let c = VertexColoring::from_index(12, 2, 0b1011_0010_1101);
        let h = VertexColoring::constant(12, 1, 1).unwrap();
        let exact = ratio_to_f64(&quasirandom_deficiency_exact(&g, &c, &h, 1).unwrap());
        let mc = quasirandom_deficiency(&g, &c, &h, 1, 200_000, 4).unwrap();
        assert!((exact - mc).abs() < 0.01, "exact {exact} vs mc {mc}");
    }

    #[test]
    fn exact_mode_rejects_large_balls() {
        let g = gen_cycle(12).unwrap();
        let c = VertexColoring::constant(12, 2, 1).unwrap();
        let h = VertexColoring::constant(12, 1, 1).unwrap();
        assert!(matches!(
            quasirandom_deficiency_exact(&g, &c, &h, 3),
            Err(Error::BudgetExceeded(_))
        ));
    }
}

//! Certified lower bound separating `G ∪ G` from a connected regular `G` at
//! radius 1 with two colors.
//!
//! The witness colors the two copies of `G` with colors 1 and 2. Its
//! statistics put mass 1/2 on each root color and zero mass on balls with a
//! bichromatic edge at the root. A response coloring of `G` with color-1
//! fraction `α`:
//!
//! * if `α ∉ [0.4, 0.6]`, the root-color marginals already differ by ≥ 0.1;
//! * otherwise the Laplacian quadratic form of the centered indicator gives
//!   at least `(n/2)·gap·α(1−α)` bichromatic edges, so at least a
//!   `gap·α(1−α)/d` fraction of roots see one, and `α(1−α) ≥ 0.24`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{gen_disjoint_union, BoundedGraph, VertexColoring};
use crate::stats::{ball_distribution, BallDistribution};

pub const BALANCE_WINDOW: (f64, f64) = (0.4, 0.6);
/// Root-color marginal gap forced outside the balance window.
pub const MARGINAL_BOUND: f64 = 0.1;
/// Minimum of `α(1−α)` over the balance window.
const MIN_BALANCE_PRODUCT: f64 = 0.24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub spectral_gap: f64,
    pub degree: usize,
    pub vertices: usize,
    pub balance_window: (f64, f64),
    pub min_balance_product: f64,
    /// `gap · min α(1−α) / d` over the window.
    pub balanced_bound: f64,
    pub bound: f64,
    pub witness: String,
}

/// `P_{G∪G,1}[c]` for the coloring that paints copy one 1 and copy two 2.
pub fn component_indicator_distribution(g: &BoundedGraph) -> Result<BallDistribution> {
    let gg = gen_disjoint_union(g, g);
    let colors = (0..gg.n()).map(|v| if v < g.n() { 1 } else { 2 }).collect();
    let c = VertexColoring::new(2, colors)?;
    ball_distribution(&gg, 1, Some(&c))
}

/// Lower bound on the distance from the component-indicator statistics of
/// `G ∪ G` to `Q_{G,1,2}`, given a spectral gap of `G`'s Laplacian.
pub fn certified_separation_bound(g: &BoundedGraph, spectral_gap: f64) -> Result<SeparationCertificate> {
    let degree = g.regular_degree().ok_or(Error::NotRegular)?;
    if degree == 0 {
        return Err(Error::NotRegular);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let gap = spectral_gap.max(0.0);
    let balanced_bound = gap * MIN_BALANCE_PRODUCT / degree as f64;
    Ok(SeparationCertificate {
        spectral_gap,
        degree,
        vertices: g.n(),
        balance_window: BALANCE_WINDOW,
        min_balance_product: MIN_BALANCE_PRODUCT,
        balanced_bound,
        bound: MARGINAL_BOUND.min(balanced_bound),
        witness: "G ∪ G with the first copy colored 1 and the second colored 2".into(),
    })
}

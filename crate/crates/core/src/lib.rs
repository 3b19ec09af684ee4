//! Local (neighborhood-sampling) and local-global (colored neighborhood)
//! statistics of bounded-degree graphs.
//!
//! Graphs are [`graph::BoundedGraph`]s on dense `0..n` vertex indices. The
//! r-neighborhood of a vertex is canonicalized into a [`balls::BallCode`];
//! distributions of those codes over all roots ([`stats`]) are the local
//! statistics, and the set of such distributions over all k-colorings
//! ([`quotient`]) is the local-global statistic.

pub mod balls;
mod canon;
pub mod encode;
pub mod error;
pub mod fiid;
pub mod graph;
pub mod hyperfinite;
pub mod quotient;
pub mod registry;
pub mod regularize;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod testing;

pub use error::{Error, Result};

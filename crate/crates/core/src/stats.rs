//! Neighborhood statistics and the metrics between them.
//!
//! A [`BallDistribution`] stores integer weights over canonical ball codes
//! together with their total, reduced by the common gcd. Probabilities are
//! therefore exact rationals whether the weights came from all `n` roots or
//! from `t` sampled roots, and two distributions describing the same measure
//! have identical representations (so `P_{G∪G,r} == P_{G,r}` holds
//! structurally).

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::balls::{BallCode, BallTemplate, RootedBall};
use crate::error::{Error, Result};
use crate::graph::{BoundedGraph, VertexColoring};
use crate::rng::rng_from;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Provenance {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BallDistribution {
    r: usize,
    k: u32,
    provenance: Provenance,
    weights: BTreeMap<BallCode, u64>,
    total: u64,
}

impl BallDistribution {
    /// Builds from raw (unreduced) counts; zero entries are dropped.
    pub fn from_counts(
        r: usize,
        k: u32,
        provenance: Provenance,
        counts: BTreeMap<BallCode, u64>,
    ) -> Result<Self> {
        let mut weights: BTreeMap<BallCode, u64> =
            counts.into_iter().filter(|(_, c)| *c > 0).collect();
        let total: u64 = weights.values().sum();
        if total == 0 {
            return Err(Error::EmptySet);
        }
        let g = weights.values().fold(total, |acc, &c| acc.gcd(&c));
        if g > 1 {
            for c in weights.values_mut() {
                *c /= g;
            }
        }
        Ok(Self {
            r,
            k,
            provenance,
            weights,
            total: total / g,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_exact(&self) -> bool {
        self.provenance == Provenance::Exact
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Reduced weights and their total.
    pub fn weights(&self) -> (&BTreeMap<BallCode, u64>, u64) {
        (&self.weights, self.total)
    }

    pub fn probability(&self, code: &BallCode) -> Ratio<u64> {
        Ratio::new(self.weights.get(code).copied().unwrap_or(0), self.total)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BallCode, Ratio<u64>)> {
        self.weights.iter().map(|(c, &w)| (c, Ratio::new(w, self.total)))
    }

    /// Sum of the probabilities as an exact rational (always one).
    pub fn mass(&self) -> Ratio<u64> {
        Ratio::new(self.weights.values().sum(), self.total)
    }

    /// Same measure, recorded as coming from a different source.
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Pushes the measure forward along "forget the colors".
    pub fn erase_colors(&self) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (code, &w) in &self.weights {
            let plain = RootedBall::decode(code)?.erase_colors();
            *counts.entry(plain.code().clone()).or_insert(0) += w;
        }
        Self::from_counts(self.r, 1, self.provenance, counts)
    }

    /// Total mass on balls satisfying `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(&BallCode) -> bool) -> Ratio<u64> {
        let w = self
            .weights
            .iter()
            .filter(|(c, _)| pred(c))
            .map(|(_, &w)| w)
            .sum();
        Ratio::new(w, self.total)
    }

    /// `{"r", "k", "mode", "balls": [{"code", "prob"}]}`, balls sorted by code.
    pub fn to_json(&self) -> Value {
        let balls: Vec<Value> = self
            .weights
            .iter()
            .map(|(c, &w)| json!({"code": c.to_hex(), "prob": w as f64 / self.total as f64}))
            .collect();
        let mode = match self.provenance {
            Provenance::Exact => "exact",
            Provenance::Sampled { .. } => "sampled",
        };
        json!({"r": self.r, "k": self.k, "mode": mode, "balls": balls})
    }

    /// Tab-separated `code\tprob` lines.
    pub fn to_tsv(&self) -> String {
        self.weights
            .iter()
            .map(|(c, &w)| format!("{}\t{}\n", c.to_hex(), w as f64 / self.total as f64))
            .collect()
    }

    /// Sort key identifying the measure (independent of provenance).
    pub(crate) fn measure_key(&self) -> (Vec<(&BallCode, u64)>, u64) {
        (
            self.weights.iter().map(|(c, &w)| (c, w)).collect(),
            self.total,
        )
    }

    pub fn same_measure(&self, other: &Self) -> bool {
        self.r == other.r && self.k == other.k && self.measure_key() == other.measure_key()
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if self.r == other.r && self.k == other.k {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                r1: self.r,
                k1: self.k,
                r2: other.r,
                k2: other.k,
            })
        }
    }
}

/// Merges partial histograms; addition is associative and commutative so
/// any split of the roots gives the same result.
fn merge(mut a: BTreeMap<BallCode, u64>, b: BTreeMap<BallCode, u64>) -> BTreeMap<BallCode, u64> {
    for (code, w) in b {
        *a.entry(code).or_insert(0) += w;
    }
    a
}

fn count_roots(
    g: &BoundedGraph,
    r: usize,
    c: Option<&VertexColoring>,
    roots: &[usize],
) -> BTreeMap<BallCode, u64> {
    roots
        .par_iter()
        .fold(BTreeMap::new, |mut acc, &v| {
            let t = BallTemplate::new(g, v, r);
            let ball = match c {
                Some(c) => t.ball_with(c.k(), |w| c.get(w)),
                None => t.ball_with(1, |_| 1),
            };
            *acc.entry(ball.code().clone()).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, merge)
}

/// `P_{G,r}[c]`: the law of the colored r-ball around a uniform random root.
pub fn ball_distribution(
    g: &BoundedGraph,
    r: usize,
    c: Option<&VertexColoring>,
) -> Result<BallDistribution> {
    if let Some(c) = c {
        c.check_len(g.n())?;
    }
    let roots: Vec<usize> = (0..g.n()).collect();
    let k = c.map_or(1, VertexColoring::k);
    BallDistribution::from_counts(r, k, Provenance::Exact, count_roots(g, r, c, &roots))
}

/// Uniform roots drawn for sampling; a pure function of `(n, t, seed)`.
pub fn sample_roots(n: usize, t: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from(seed);
    (0..t).map(|_| rng.gen_range(0..n)).collect()
}

/// Empirical ball distribution of `t` independent uniform roots.
pub fn sampled_ball_distribution(
    g: &BoundedGraph,
    r: usize,
    c: Option<&VertexColoring>,
    t: usize,
    seed: u64,
) -> Result<BallDistribution> {
    if t == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    if g.n() == 0 {
        return Err(Error::EmptySet);
    }
    if let Some(c) = c {
        c.check_len(g.n())?;
    }
    let roots = sample_roots(g.n(), t, seed);
    let k = c.map_or(1, VertexColoring::k);
    BallDistribution::from_counts(
        r,
        k,
        Provenance::Sampled { samples: t, seed },
        count_roots(g, r, c, &roots),
    )
}

/// Total variation distance as an exact rational: half the L1 distance over
/// the union of supports, which on a finite space equals the supremum of
/// `|μ(A) − ν(A)|` over events `A`.
pub fn tv_distance_exact(mu: &BallDistribution, nu: &BallDistribution) -> Result<Ratio<u128>> {
    mu.check_space(nu)?;
    let (ta, tb) = (u128::from(mu.total), u128::from(nu.total));
    let mut l1: u128 = 0;
    let mut a = mu.weights.iter().peekable();
    let mut b = nu.weights.iter().peekable();
    loop {
        let step = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some((ca, _)), Some((cb, _))) => ca.cmp(cb),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
        };
        let (x, y) = match step {
            std::cmp::Ordering::Less => (*a.next().unwrap().1, 0),
            std::cmp::Ordering::Greater => (0, *b.next().unwrap().1),
            std::cmp::Ordering::Equal => (*a.next().unwrap().1, *b.next().unwrap().1),
        };
        let (x, y) = (u128::from(x) * tb, u128::from(y) * ta);
        l1 += x.abs_diff(y);
    }
    Ok(Ratio::new(l1, 2 * ta * tb))
}

pub fn tv_distance(mu: &BallDistribution, nu: &BallDistribution) -> Result<f64> {
    tv_distance_exact(mu, nu).map(|d| ratio_to_f64(&d))
}

pub(crate) fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    Exact,
    LowerApproximation,
}

/// A realized distribution with the coloring that produced it, if known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetMember {
    pub distribution: BallDistribution,
    pub witness: Option<VertexColoring>,
}

/// Finitely many distinct distributions on a common `(r, k)` space, kept
/// sorted by measure.
#[derive(Debug, Clone)]
pub struct DistributionSet {
    r: usize,
    k: u32,
    completeness: Completeness,
    members: Vec<SetMember>,
}

impl DistributionSet {
    pub fn new(r: usize, k: u32, completeness: Completeness) -> Self {
        Self {
            r,
            k,
            completeness,
            members: Vec::new(),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SetMember] {
        &self.members
    }

    pub fn distributions(&self) -> impl Iterator<Item = &BallDistribution> {
        self.members.iter().map(|m| &m.distribution)
    }

    pub fn contains(&self, d: &BallDistribution) -> bool {
        self.find(d).is_ok()
    }

    fn find(&self, d: &BallDistribution) -> std::result::Result<usize, usize> {
        let key = d.measure_key();
        self.members
            .binary_search_by(|m| m.distribution.measure_key().cmp(&key))
    }

    /// Inserts unless an equal measure is already present (first witness
    /// wins). Returns whether the set grew.
    pub fn insert(
        &mut self,
        distribution: BallDistribution,
        witness: Option<VertexColoring>,
    ) -> Result<bool> {
        if distribution.r != self.r || distribution.k != self.k {
            return Err(Error::SpaceMismatch {
                r1: self.r,
                k1: self.k,
                r2: distribution.r,
                k2: distribution.k,
            });
        }
        match self.find(&distribution) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.members.insert(
                    pos,
                    SetMember {
                        distribution,
                        witness,
                    },
                );
                Ok(true)
            }
        }
    }

    /// Union; on equal measures the receiver's witness is kept.
    pub fn absorb(&mut self, other: DistributionSet) -> Result<()> {
        for m in other.members {
            self.insert(m.distribution, m.witness)?;
        }
        Ok(())
    }

    pub fn set_completeness(&mut self, c: Completeness) {
        self.completeness = c;
    }

    /// `min_{b ∈ self} tv(d, b)` as an exact rational.
    pub fn distance_to_exact(&self, d: &BallDistribution) -> Result<Ratio<u128>> {
        let mut best: Option<Ratio<u128>> = None;
        for m in &self.members {
            let t = tv_distance_exact(d, &m.distribution)?;
            if best.as_ref().is_none_or(|b| t < *b) {
                best = Some(t);
            }
        }
        best.ok_or(Error::EmptySet)
    }

    /// Sets compare as sets of measures; witnesses are ignored.
    pub fn same_measures(&self, other: &Self) -> bool {
        self.r == other.r
            && self.k == other.k
            && self.members.len() == other.members.len()
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(a, b)| a.distribution.same_measure(&b.distribution))
    }
}

/// `max_{a ∈ A} min_{b ∈ B} tv(a, b)`.
pub fn directed_hausdorff_exact(a: &DistributionSet, b: &DistributionSet) -> Result<Ratio<u128>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let per_member: Vec<Ratio<u128>> = a
        .members
        .par_iter()
        .map(|m| b.distance_to_exact(&m.distribution))
        .collect::<Result<_>>()?;
    Ok(per_member.into_iter().max().expect("non-empty"))
}

pub fn hausdorff_distance_exact(a: &DistributionSet, b: &DistributionSet) -> Result<Ratio<u128>> {
    if a.r != b.r || a.k != b.k {
        return Err(Error::SpaceMismatch {
            r1: a.r,
            k1: a.k,
            r2: b.r,
            k2: b.k,
        });
    }
    Ok(directed_hausdorff_exact(a, b)?.max(directed_hausdorff_exact(b, a)?))
}

pub fn hausdorff_distance(a: &DistributionSet, b: &DistributionSet) -> Result<f64> {
    hausdorff_distance_exact(a, b).map(|d| ratio_to_f64(&d))
}

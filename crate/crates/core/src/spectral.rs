//! Laplacian spectrum and vertex expansion of finite graphs.
//!
//! With the uniform measure on vertices, the edge measure puts weight `1/n`
//! on each ordered pair of adjacent vertices, so
//! `(1/n)⟨Lf, f⟩ = (1/n) Σ_{uv ∈ E} (f(u) − f(v))²` and the Rayleigh quotient
//! over `f ⊥ 1` is minimized by `λ₂(L)` whatever the normalization.

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BoundedGraph;
use crate::registry::{Named, Registry};
use crate::rng::{keyed, unit_f64};

/// Graphs up to this size use the dense solver under automatic selection.
pub const DENSE_LIMIT: usize = 512;
/// Largest graph accepted by [`vertex_expansion_exact`].
pub const EXPANSION_MAX_VERTICES: usize = 20;
/// A dense eigenvalue this close to an integer is checked for being that
/// integer exactly.
const SNAP_WINDOW: f64 = 1e-9;

/// `(Lf)(v) = deg(v) f(v) − Σ_{w∼v} f(w)`.
pub fn laplacian_apply(g: &BoundedGraph, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            actual: f.len(),
        });
    }
    Ok(laplacian(g, f))
}

/// Below this many vertices the operator is applied on one thread.
const PARALLEL_APPLY: usize = 1 << 16;

fn laplacian(g: &BoundedGraph, f: &[f64]) -> Vec<f64> {
    let at = |v: usize| {
        let nb = g.neighbors(v);
        nb.len() as f64 * f[v] - nb.iter().map(|&w| f[w]).sum::<f64>()
    };
    if g.n() < PARALLEL_APPLY {
        (0..g.n()).map(at).collect()
    } else {
        (0..g.n()).into_par_iter().map(at).collect()
    }
}

/// `Σ_{uv ∈ E} (f(u) − f(v))²`, which equals `⟨Lf, f⟩`.
pub fn dirichlet_energy(g: &BoundedGraph, f: &[f64]) -> f64 {
    g.edges()
        .into_iter()
        .map(|(u, v)| (f[u] - f[v]).powi(2))
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn project_out_constants(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖Lx − λx‖` for the unit vector `x`.
    pub residual: f64,
}

fn finish(g: &BoundedGraph, mut x: Vec<f64>) -> Eigenpair {
    let s = norm(&x);
    x.iter_mut().for_each(|v| *v /= s);
    let lx = laplacian(g, &x);
    let value = dot(&lx, &x);
    let residual = lx
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - value * b).powi(2))
        .sum::<f64>()
        .sqrt();
    Eigenpair {
        value,
        vector: x,
        residual,
    }
}

/// Finds `λ₂` of the Laplacian of a connected graph with `n ≥ 2`.
pub trait EigenSolver: Named + Send + Sync {
    fn second_eigenpair(&self, g: &BoundedGraph, tol: f64) -> Result<Eigenpair>;
}

/// Full symmetric eigendecomposition.
pub struct DenseSolver;

impl Named for DenseSolver {
    fn name(&self) -> &str {
        "dense"
    }
}

impl EigenSolver for DenseSolver {
    fn second_eigenpair(&self, g: &BoundedGraph, _tol: f64) -> Result<Eigenpair> {
        let n = g.n();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for v in 0..n {
            m[(v, v)] = g.degree(v) as f64;
            for &w in g.neighbors(v) {
                m[(v, w)] -= 1.0;
            }
        }
        let eig = SymmetricEigen::new(m);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let x: Vec<f64> = eig.eigenvectors.column(idx[1]).iter().copied().collect();
        let mut pair = finish(g, x);
        let nearest = pair.value.round();
        if (pair.value - nearest).abs() <= SNAP_WINDOW && is_integer_eigenvalue(g, nearest as i64) {
            pair.value = nearest;
        }
        Ok(pair)
    }
}

const PRIMES: [u64; 2] = [(1 << 61) - 1, 0xffff_ffff_0000_0001];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// True iff `L − mI` is singular modulo each of two 61/64-bit primes. The
/// rank over a prime field never exceeds the rational rank, so a
/// nonsingular reduction rules `m` out; singularity modulo both primes
/// while nonsingular over ℚ would need both primes to divide the
/// determinant.
fn is_integer_eigenvalue(g: &BoundedGraph, m: i64) -> bool {
    let n = g.n();
    PRIMES.iter().all(|&p| {
        let to_field = |x: i64| i128::from(x).rem_euclid(i128::from(p)) as u64;
        let mut a = vec![vec![0u64; n]; n];
        for v in 0..n {
            a[v][v] = to_field(g.degree(v) as i64 - m);
            for &w in g.neighbors(v) {
                a[v][w] = to_field(-1);
            }
        }
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| a[r][col] != 0) else {
                continue;
            };
            a.swap(rank, pivot);
            let inv = pow_mod(a[rank][col], p - 2, p);
            for r in rank + 1..n {
                if a[r][col] == 0 {
                    continue;
                }
                let f = mul_mod(a[r][col], inv, p);
                for c in col..n {
                    let sub = mul_mod(f, a[rank][c], p);
                    a[r][c] = if a[r][c] >= sub {
                        a[r][c] - sub
                    } else {
                        a[r][c] + (p - sub)
                    };
                }
            }
            rank += 1;
        }
        rank < n
    })
}

/// Lanczos on the pseudo-inverse `L⁺`, applied by conjugate gradients on
/// the complement of the constants. `1/λ₂` is the top of the spectrum of
/// `L⁺`, and it is well separated even when `λ₂` itself is tiny.
pub struct LanczosSolver {
    pub krylov_dim: usize,
    pub restarts: usize,
}

impl Default for LanczosSolver {
    fn default() -> Self {
        Self {
            krylov_dim: 40,
            restarts: 30,
        }
    }
}

impl Named for LanczosSolver {
    fn name(&self) -> &str {
        "lanczos"
    }
}

/// Solves `Lx = b` for `b ⊥ 1`, returning the solution orthogonal to `1`.
fn cg_solve(g: &BoundedGraph, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let target = 1e-14 * norm(b);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..50 * n.max(100) {
        if rr.sqrt() <= target {
            project_out_constants(&mut x);
            return Ok(x);
        }
        let ap = laplacian(g, &p);
        let alpha = rr / dot(&p, &ap);
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        r.iter_mut().zip(&ap).for_each(|(ri, ai)| *ri -= alpha * ai);
        project_out_constants(&mut r);
        let next = dot(&r, &r);
        let beta = next / rr;
        rr = next;
        p.iter_mut().zip(&r).for_each(|(pi, ri)| *pi = ri + beta * *pi);
    }
    Err(Error::ConvergenceFailure(
        "conjugate gradients did not reach the requested accuracy".into(),
    ))
}

impl EigenSolver for LanczosSolver {
    fn second_eigenpair(&self, g: &BoundedGraph, tol: f64) -> Result<Eigenpair> {
        let n = g.n();
        let m = self.krylov_dim.clamp(1, n - 1);
        let mut start: Vec<f64> = (0..n).map(|v| unit_f64(keyed(0x5eed, v as u64)) - 0.5).collect();
        let mut best: Option<Eigenpair> = None;
        for _ in 0..=self.restarts {
            project_out_constants(&mut start);
            let s = norm(&start);
            start.iter_mut().for_each(|v| *v /= s);
            let mut basis = vec![start.clone()];
            let mut alpha = Vec::new();
            let mut beta: Vec<f64> = Vec::new();
            for j in 0..m {
                let mut w = cg_solve(g, &basis[j])?;
                alpha.push(dot(&w, &basis[j]));
                for _ in 0..2 {
                    for b in &basis {
                        let c = dot(&w, b);
                        w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
                    }
                }
                project_out_constants(&mut w);
                let nb = norm(&w);
                if j + 1 == m || nb <= 1e-12 * alpha[0].abs() {
                    break;
                }
                beta.push(nb);
                w.iter_mut().for_each(|v| *v /= nb);
                basis.push(w);
            }
            let k = alpha.len();
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let top = (0..k)
                .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
                .expect("nonempty tridiagonal");
            let y = eig.eigenvectors.column(top);
            let mut x = vec![0.0; n];
            for (i, b) in basis.iter().enumerate() {
                x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += y[i] * bi);
            }
            project_out_constants(&mut x);
            let pair = finish(g, x);
            let done = pair.residual <= tol;
            start = pair.vector.clone();
            if best.as_ref().is_none_or(|b| pair.residual < b.residual) {
                best = Some(pair);
            }
            if done {
                break;
            }
        }
        let best = best.expect("at least one Lanczos cycle");
        if best.residual > tol {
            return Err(Error::ConvergenceFailure(format!(
                "Lanczos residual {:.3e} above tolerance {tol:.3e}",
                best.residual
            )));
        }
        Ok(best)
    }
}

pub fn default_solvers() -> Registry<dyn EigenSolver> {
    let mut reg: Registry<dyn EigenSolver> = Registry::new("eigensolver");
    reg.register(Box::new(DenseSolver))
        .register(Box::new(LanczosSolver::default()));
    reg
}

/// `"dense"` up to [`DENSE_LIMIT`] vertices, `"lanczos"` beyond.
pub fn auto_solver_name(n: usize) -> &'static str {
    if n <= DENSE_LIMIT {
        "dense"
    } else {
        "lanczos"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub n: usize,
    /// `λ₂` of `L = D − A`.
    pub gap: f64,
    /// `gap / d` for d-regular graphs.
    pub normalized_gap: Option<f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub solver: String,
    /// Number of components, which is the multiplicity of eigenvalue 0.
    pub zero_multiplicity: usize,
    pub expansion: Option<Expansion>,
    pub sandwich: Option<SandwichReport>,
}

/// `λ₂` with automatic solver choice.
pub fn spectral_gap(g: &BoundedGraph, tol: f64) -> Result<SpectralReport> {
    spectral_gap_with(g, tol, &default_solvers(), auto_solver_name(g.n()))
}

/// `λ₂` using the named solver. Disconnected graphs have `λ₂ = 0` exactly
/// and skip the solver.
pub fn spectral_gap_with(
    g: &BoundedGraph,
    tol: f64,
    solvers: &Registry<dyn EigenSolver>,
    solver: &str,
) -> Result<SpectralReport> {
    if !(tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    if g.n() < 2 {
        return Err(Error::Invalid("the spectral gap needs at least 2 vertices".into()));
    }
    let solver = solvers.get(solver)?;
    let (_, components) = g.components();
    let (gap, residual, name) = if components > 1 {
        (0.0, 0.0, "components".to_string())
    } else {
        let pair = solver.second_eigenpair(g, tol)?;
        (pair.value.max(0.0), pair.residual, solver.name().to_string())
    };
    Ok(SpectralReport {
        n: g.n(),
        gap,
        normalized_gap: g.regular_degree().filter(|&d| d > 0).map(|d| gap / d as f64),
        residual,
        tolerance: tol,
        solver: name,
        zero_multiplicity: components,
        expansion: None,
        sandwich: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    /// `min |N₁(S)|/|S| − 1` over `0 < |S| ≤ n/2`.
    pub c: Ratio<u64>,
    pub witness: Vec<usize>,
}

impl Expansion {
    pub fn c_f64(&self) -> f64 {
        *self.c.numer() as f64 / *self.c.denom() as f64
    }
}

/// Exact vertex expansion by enumerating all subsets. `N₁(S)` contains `S`.
pub fn vertex_expansion_exact(g: &BoundedGraph) -> Result<Expansion> {
    let n = g.n();
    if n > EXPANSION_MAX_VERTICES {
        return Err(Error::BudgetExceeded(format!(
            "exact expansion handles at most {EXPANSION_MAX_VERTICES} vertices, got {n}"
        )));
    }
    if n < 2 {
        return Err(Error::Invalid("expansion needs at least 2 vertices".into()));
    }
    let closed: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u32 << v, |m, &w| m | 1 << w))
        .collect();
    let half = (n / 2) as u32;
    // Minimize |N|/|S| as a pair compared by cross-multiplication; ties go
    // to the least mask.
    let better = |a: (u32, u32, u32), b: (u32, u32, u32)| {
        let (la, lb) = (a.0 as u64 * b.1 as u64, b.0 as u64 * a.1 as u64);
        if la != lb {
            la < lb
        } else {
            a.2 < b.2
        }
    };
    let best = (1u32..1 << n)
        .into_par_iter()
        .filter(|s| s.count_ones() <= half)
        .map(|s| {
            let mut nb = 0u32;
            let mut rest = s;
            while rest != 0 {
                nb |= closed[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            (nb.count_ones(), s.count_ones(), s)
        })
        .reduce(|| (u32::MAX, 1, u32::MAX), |a, b| if better(a, b) { a } else { b });
    let (reach, size, mask) = best;
    Ok(Expansion {
        c: Ratio::new(u64::from(reach), u64::from(size)) - 1,
        witness: (0..n).filter(|&v| mask >> v & 1 == 1).collect(),
    })
}

/// Both sides of `c²/(2d) ≤ gap ≤ 2c`. The lower side uses the raw `λ₂`;
/// the upper side is checked for `λ₂/d`, and the raw comparison is
/// reported alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub d: usize,
    pub c: f64,
    pub gap: f64,
    pub lower_bound: f64,
    pub lower_pass: bool,
    pub normalized_gap: f64,
    pub upper_bound: f64,
    pub upper_pass: bool,
    pub raw_upper_pass: bool,
}

/// Evaluates both sides for a d-regular graph with expansion `c` and gap
/// `gap`. Comparisons allow the solver tolerance `tol` on the gap.
pub fn sandwich(d: usize, c: f64, gap: f64, tol: f64) -> SandwichReport {
    let lower_bound = c * c / (2.0 * d as f64);
    let normalized_gap = gap / d as f64;
    SandwichReport {
        d,
        c,
        gap,
        lower_bound,
        lower_pass: lower_bound <= gap + tol,
        normalized_gap,
        upper_bound: 2.0 * c,
        upper_pass: normalized_gap <= 2.0 * c + tol,
        raw_upper_pass: gap <= 2.0 * c + tol,
    }
}

/// Gap, exact expansion and the sandwich for a regular graph.
pub fn check_expander_sandwich(g: &BoundedGraph, tol: f64) -> Result<SpectralReport> {
    let d = g.regular_degree().filter(|&d| d > 0).ok_or(Error::NotRegular)?;
    let mut report = spectral_gap(g, tol)?;
    let expansion = vertex_expansion_exact(g)?;
    report.sandwich = Some(sandwich(d, expansion.c_f64(), report.gap, tol));
    report.expansion = Some(expansion);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle, gen_disjoint_union, gen_random_regular};
    use std::f64::consts::PI;

    fn cycle_gap(n: usize) -> f64 {
        2.0 - 2.0 * (2.0 * PI / n as f64).cos()
    }

    #[test]
    fn k2_eigenvector() {
        let g = gen_complete(2).unwrap();
        assert_eq!(laplacian_apply(&g, &[1.0, -1.0]).unwrap(), vec![2.0, -2.0]);
        assert_eq!(laplacian_apply(&g, &[3.0, 3.0]).unwrap(), vec![0.0, 0.0]);
        assert!(laplacian_apply(&g, &[1.0]).is_err());
    }

    #[test]
    fn complete_graph_gap_is_exact() {
        assert_eq!(spectral_gap(&gen_complete(4).unwrap(), 1e-10).unwrap().gap, 4.0);
        assert_eq!(spectral_gap(&gen_complete(7).unwrap(), 1e-10).unwrap().gap, 7.0);
    }

    #[test]
    fn cycle_gaps_dense() {
        for n in [4, 5, 8, 100] {
            let r = spectral_gap(&gen_cycle(n).unwrap(), 1e-10).unwrap();
            assert!((r.gap - cycle_gap(n)).abs() < 1e-10, "n {n}: {}", r.gap);
        }
    }

    #[test]
    fn lanczos_matches_dense() {
        let g = gen_random_regular(300, 3, 8).unwrap();
        let reg = default_solvers();
        let dense = spectral_gap_with(&g, 1e-9, &reg, "dense").unwrap();
        let lanczos = spectral_gap_with(&g, 1e-9, &reg, "lanczos").unwrap();
        assert!((dense.gap - lanczos.gap).abs() < 1e-9);
        let c = spectral_gap_with(&gen_cycle(200).unwrap(), 1e-10, &reg, "lanczos").unwrap();
        assert!((c.gap - cycle_gap(200)).abs() < 1e-10);
    }

    #[test]
    fn long_cycle_uses_lanczos() {
        let r = spectral_gap(&gen_cycle(4096).unwrap(), 1e-10).unwrap();
        assert_eq!(r.solver, "lanczos");
        assert!((r.gap - cycle_gap(4096)).abs() < 1e-8);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn disconnected_gap_is_zero() {
        let g = gen_disjoint_union(&gen_cycle(5).unwrap(), &gen_complete(3).unwrap());
        let r = spectral_gap(&g, 1e-10).unwrap();
        assert_eq!(r.gap, 0.0);
        assert_eq!(r.zero_multiplicity, 2);
    }

    #[test]
    fn integer_eigenvalue_check() {
        let g = gen_cycle(6).unwrap();
        assert!(is_integer_eigenvalue(&g, 1));
        assert!(is_integer_eigenvalue(&g, 4));
        assert!(!is_integer_eigenvalue(&g, 2));
    }

    #[test]
    fn expansion_examples() {
        let k4 = vertex_expansion_exact(&gen_complete(4).unwrap()).unwrap();
        assert_eq!(k4.c, Ratio::from_integer(1));
        assert_eq!(k4.witness.len(), 2);
        let c6 = vertex_expansion_exact(&gen_cycle(6).unwrap()).unwrap();
        assert_eq!(c6.c, Ratio::new(2, 3));
        let split = gen_disjoint_union(&gen_cycle(4).unwrap(), &gen_cycle(4).unwrap());
        assert_eq!(vertex_expansion_exact(&split).unwrap().c, Ratio::from_integer(0));
    }

    #[test]
    fn sandwich_examples() {
        let k4 = check_expander_sandwich(&gen_complete(4).unwrap(), 1e-10).unwrap();
        let s = k4.sandwich.unwrap();
        assert!(s.lower_pass && s.upper_pass && !s.raw_upper_pass);
        assert!((s.lower_bound - 1.0 / 6.0).abs() < 1e-15);
        assert!((s.normalized_gap - 4.0 / 3.0).abs() < 1e-15);
        let c6 = check_expander_sandwich(&gen_cycle(6).unwrap(), 1e-10).unwrap();
        let s = c6.sandwich.unwrap();
        assert_eq!(s.gap, 1.0);
        assert!(s.lower_pass && s.upper_pass);
        let path = BoundedGraph::new(3, &[(0, 1), (1, 2)], 2).unwrap();
        assert_eq!(check_expander_sandwich(&path, 1e-10).unwrap_err(), Error::NotRegular);
    }

    #[test]
    fn quadratic_form_and_symmetry() {
        let g = gen_random_regular(50, 3, 1).unwrap();
        let f: Vec<f64> = (0..50).map(|v| unit_f64(keyed(1, v)) - 0.5).collect();
        let h: Vec<f64> = (0..50).map(|v| unit_f64(keyed(2, v)) - 0.5).collect();
        let lf = laplacian(&g, &f);
        let lh = laplacian(&g, &h);
        assert!((dot(&lf, &f) - dirichlet_energy(&g, &f)).abs() < 1e-12);
        assert!(dot(&lf, &f) >= 0.0);
        assert!((dot(&lf, &h) - dot(&f, &lh)).abs() < 1e-12);
    }
}


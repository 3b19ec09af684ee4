use std::path::PathBuf;

use clap::{Args, ValueEnum};
use locglob::graph::write_coloring;
use locglob::hyperfinite::{
    check_hyperfinite_pair, forbidden_blue_mass, hyperfinite_coloring, tau_exact, tau_heuristic,
};
use locglob::spectral::{
    auto_solver_name, default_solvers, sandwich, spectral_gap_with, vertex_expansion_exact,
};
use locglob::testing::{
    default_testers, disconnection_candidates, nd_test_disconnection, run_nd_tester, run_tester,
    DisconnectionWitness,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{load_graph, ratio_string, require, write_side_file, Context, Experiment};
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TauMode {
    Exact,
    Heuristic,
}

/// τ_q certificates and (q, ε)-hyperfiniteness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct HyperfiniteConfig {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub q: usize,
    #[arg(long, value_enum, default_value = "heuristic")]
    pub mode: TauMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub passes: usize,
    /// Report whether the graph is (q, eps)-hyperfinite.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Check the red/blue coloring against radius-q ball statistics.
    #[arg(long)]
    pub verify_coloring: bool,
    #[arg(long)]
    pub coloring_out: Option<PathBuf>,
}

impl Experiment for HyperfiniteConfig {
    const NAME: &'static str = "hyperfinite";

    fn inputs(&self) -> Vec<PathBuf> {
        vec![self.graph.clone()]
    }

    fn run(&self, ctx: &Context) -> CliResult<Value> {
        let g = load_graph(&self.graph)?;
        let cert = match self.mode {
            TauMode::Exact => tau_exact(&g, self.q)?,
            TauMode::Heuristic => tau_heuristic(&g, self.q, self.seed, self.passes),
        };
        let coloring = hyperfinite_coloring(&cert);
        if let Some(path) = &self.coloring_out {
            write_side_file(ctx, path, &write_coloring(&coloring))?;
        }
        let forbidden = if self.verify_coloring {
            Some(ratio_string(&forbidden_blue_mass(&g, &coloring, self.q)?))
        } else {
            None
        };
        Ok(json!({
            "certificate": cert,
            "tau": cert.size(),
            "verdict": self.eps.map(|eps| check_hyperfinite_pair(&g, &cert, self.q, eps)),
            "forbidden_blue_mass": forbidden,
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Auto,
    Dense,
    Lanczos,
}

/// Spectral gap, and optionally exact expansion with the sandwich check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct SpectralConfig {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub solver: SolverChoice,
    /// Exact vertex expansion (at most 20 vertices) and, for regular
    /// graphs, both sides of the expander sandwich.
    #[arg(long)]
    pub expansion: bool,
}

impl Experiment for SpectralConfig {
    const NAME: &'static str = "spectral";

    fn inputs(&self) -> Vec<PathBuf> {
        vec![self.graph.clone()]
    }

    fn run(&self, _ctx: &Context) -> CliResult<Value> {
        let g = load_graph(&self.graph)?;
        let name = match self.solver {
            SolverChoice::Auto => auto_solver_name(g.n()),
            SolverChoice::Dense => "dense",
            SolverChoice::Lanczos => "lanczos",
        };
        let mut report = spectral_gap_with(&g, self.tol, &default_solvers(), name)?;
        if self.expansion {
            let e = vertex_expansion_exact(&g)?;
            if let Some(d) = g.regular_degree().filter(|&d| d > 0) {
                report.sandwich = Some(sandwich(d, e.c_f64(), report.gap, self.tol));
            }
            report.expansion = Some(e);
        }
        Ok(serde_json::to_value(&report)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Disconnection,
    TriangleFree,
    AlwaysYes,
}

/// Property testing by sampling; disconnection also gets the exact
/// witness search and the nondeterministic tester.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct PtestConfig {
    #[arg(long, value_enum)]
    pub property: Property,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    pub beta: f64,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value_t = 200)]
    pub t: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

impl Experiment for PtestConfig {
    const NAME: &'static str = "ptest";

    fn inputs(&self) -> Vec<PathBuf> {
        vec![self.graph.clone()]
    }

    fn run(&self, ctx: &Context) -> CliResult<Value> {
        require(self.t >= 1 && self.trials >= 1, "--t and --trials must be at least 1")?;
        let g = load_graph(&self.graph)?;
        match self.property {
            Property::Disconnection => {
                let exact = nd_test_disconnection(&g, self.beta)?;
                let mut candidates = disconnection_candidates(&g)?;
                if let Some(w) = &exact.witness {
                    if let Some(path) = &self.witness_out {
                        write_side_file(ctx, path, &write_coloring(w))?;
                    }
                    candidates.push(w.clone());
                }
                let tester = DisconnectionWitness {
                    r: self.r,
                    t: self.t,
                    beta: self.beta,
                };
                let nd = run_nd_tester(&g, &tester, &candidates, self.trials, self.seed)?;
                Ok(json!({
                    "property": "disconnection",
                    "verdict": exact.verdict,
                    "component_sizes": exact.component_sizes,
                    "witness": exact.witness.as_ref().map(|w| w.colors().to_vec()),
                    "acceptance": nd.acceptance,
                    "per_witness": nd.per_witness,
                }))
            }
            Property::TriangleFree | Property::AlwaysYes => {
                let testers = default_testers(self.r, self.t, self.beta);
                let name = if self.property == Property::AlwaysYes {
                    "always-yes"
                } else {
                    "triangle-free"
                };
                let acceptance = run_tester(&g, testers.get(name)?, None, self.trials, self.seed)?;
                Ok(json!({"property": name, "acceptance": acceptance}))
            }
        }
    }
}

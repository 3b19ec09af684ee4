use std::path::PathBuf;

use clap::{Args, ValueEnum};
use locglob::graph::{
    gen_complete, gen_cycle, gen_disjoint_union, gen_path, gen_random_regular, write_graph,
    BoundedGraph,
};
use locglob::quotient::{estimate_hausdorff, exact_hausdorff, quotient_set_exact, quotient_set_search, DirectedEstimate};
use locglob::stats::{ball_distribution, sampled_ball_distribution, tv_distance_exact, Completeness};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    load_coloring, load_graph, ratio_string, require, write_side_file, BudgetArgs, Context,
    Experiment, Mode,
};
use crate::error::CliResult;
use crate::report::sha256_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Cycle,
    Path,
    Complete,
    RandomRegular,
}

/// Generate a graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct GenConfig {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    /// Degree for random-regular.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Disjoint copies of the generated graph.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// Where to write the graph; without it the graph text goes into the
    /// report.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

fn summary(g: &BoundedGraph) -> Value {
    let (_, components) = g.components();
    json!({
        "n": g.n(),
        "m": g.edge_count(),
        "max_degree": g.max_degree(),
        "regular_degree": g.regular_degree(),
        "components": components,
    })
}

impl Experiment for GenConfig {
    const NAME: &'static str = "gen";

    fn inputs(&self) -> Vec<PathBuf> {
        Vec::new()
    }

    fn run(&self, ctx: &Context) -> CliResult<Value> {
        require(self.copies >= 1, "--copies must be at least 1")?;
        let one = match self.family {
            Family::Cycle => gen_cycle(self.n)?,
            Family::Path => gen_path(self.n)?,
            Family::Complete => gen_complete(self.n)?,
            Family::RandomRegular => gen_random_regular(self.n, self.d, self.seed)?,
        };
        let mut g = one.clone();
        for _ in 1..self.copies {
            g = gen_disjoint_union(&g, &one);
        }
        let text = write_graph(&g);
        let mut result = summary(&g);
        result["graph_sha256"] = json!(sha256_text(&text));
        match &self.graph_out {
            Some(path) => write_side_file(ctx, path, &text)?,
            None => result["graph"] = json!(text),
        }
        Ok(result)
    }
}

/// Distribution of r-balls, exact or sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct StatsConfig {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub r: usize,
    /// Vertex coloring file; uncolored when absent.
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    /// Sample this many roots instead of visiting all of them.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the distribution as TSV.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

impl Experiment for StatsConfig {
    const NAME: &'static str = "stats";

    fn inputs(&self) -> Vec<PathBuf> {
        let mut v = vec![self.graph.clone()];
        v.extend(self.coloring.clone());
        v
    }

    fn run(&self, ctx: &Context) -> CliResult<Value> {
        let g = load_graph(&self.graph)?;
        let c = match &self.coloring {
            Some(p) => Some(load_coloring(p, g.n())?),
            None => None,
        };
        let dist = match self.samples {
            Some(t) => sampled_ball_distribution(&g, self.r, c.as_ref(), t, self.seed)?,
            None => ball_distribution(&g, self.r, c.as_ref())?,
        };
        if let Some(path) = &self.tsv {
            write_side_file(ctx, path, &dist.to_tsv())?;
        }
        Ok(json!({"graph": summary(&g), "distribution": dist.to_json()}))
    }
}

/// Local and local-global distance between two graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct DistConfig {
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long)]
    pub g1: PathBuf,
    #[arg(long)]
    pub g2: PathBuf,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
}

fn directed_json(d: &DirectedEstimate) -> Value {
    json!({
        "value": ratio_string(&d.value),
        "source_witness": d.source_witness.as_ref().map(|c| c.colors().to_vec()),
        "response_witness": d.response_witness.as_ref().map(|c| c.colors().to_vec()),
    })
}

impl Experiment for DistConfig {
    const NAME: &'static str = "dist";

    fn inputs(&self) -> Vec<PathBuf> {
        vec![self.g1.clone(), self.g2.clone()]
    }

    fn run(&self, _ctx: &Context) -> CliResult<Value> {
        let g1 = load_graph(&self.g1)?;
        let g2 = load_graph(&self.g2)?;
        let local = tv_distance_exact(
            &ball_distribution(&g1, self.r, None)?,
            &ball_distribution(&g2, self.r, None)?,
        )?;
        let h = match self.mode {
            Mode::Exact => exact_hausdorff(&g1, &g2, self.r, self.k)?,
            Mode::Search => {
                let mut budget = self.budget.to_budget(self.seed);
                budget.max_colorings_enumerated = 0;
                estimate_hausdorff(&g1, &g2, self.r, self.k, &budget)?
            }
        };
        Ok(json!({
            "local_tv": ratio_string(&local),
            "hausdorff": h.value,
            "hausdorff_exact": ratio_string(&h.exact_value),
            "certified": h.certified,
            "forward": directed_json(&h.forward),
            "backward": directed_json(&h.backward),
        }))
    }
}

/// The quotient set of a graph, exact or as a search lower approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct QuotientConfig {
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
}

impl Experiment for QuotientConfig {
    const NAME: &'static str = "quotient";

    fn inputs(&self) -> Vec<PathBuf> {
        vec![self.graph.clone()]
    }

    fn run(&self, _ctx: &Context) -> CliResult<Value> {
        let g = load_graph(&self.graph)?;
        let set = match self.mode {
            Mode::Exact => quotient_set_exact(&g, self.r, self.k)?,
            Mode::Search => quotient_set_search(&g, self.r, self.k, &self.budget.to_budget(self.seed))?,
        };
        let members: Vec<Value> = set
            .members()
            .iter()
            .map(|m| {
                json!({
                    "distribution": m.distribution.to_json(),
                    "witness": m.witness.as_ref().map(|c| c.colors().to_vec()),
                })
            })
            .collect();
        Ok(json!({
            "completeness": match set.completeness() {
                Completeness::Exact => "exact",
                Completeness::LowerApproximation => "lower-approximation",
            },
            "size": set.len(),
            "members": members,
        }))
    }
}

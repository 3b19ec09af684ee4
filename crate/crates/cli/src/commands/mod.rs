//! Subcommands as named strategies: each configuration type knows how to
//! run itself, and the registry maps command names to runners so reports
//! can be replayed from their embedded configuration.

mod colorings;
mod graphs;
mod structure;

use std::fmt::Display;
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use locglob::graph::{parse_coloring, parse_graph, BoundedGraph, VertexColoring};
use locglob::quotient::SearchBudget;
use locglob::registry::{Named, Registry};
use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub use colorings::{EncodeConfig, FiidConfig, RegularizeConfig};
pub use graphs::{DistConfig, Family, GenConfig, QuotientConfig, StatsConfig};
pub use structure::{HyperfiniteConfig, Property, PtestConfig, SpectralConfig, SolverChoice, TauMode};

pub struct Context {
    /// False during replay: graph, coloring and TSV side files are not
    /// rewritten.
    pub write_outputs: bool,
}

pub trait Command: Named + Send + Sync {
    /// Input files whose digests go into the report.
    fn inputs(&self, config: &Value) -> CliResult<Vec<PathBuf>>;
    fn execute(&self, config: &Value, ctx: &Context) -> CliResult<Value>;
}

/// A subcommand configuration that can run itself.
pub trait Experiment: Serialize + DeserializeOwned {
    const NAME: &'static str;
    fn inputs(&self) -> Vec<PathBuf>;
    fn run(&self, ctx: &Context) -> CliResult<Value>;
}

struct Runner<E>(PhantomData<fn() -> E>);

impl<E: Experiment> Named for Runner<E> {
    fn name(&self) -> &str {
        E::NAME
    }
}

impl<E: Experiment> Command for Runner<E> {
    fn inputs(&self, config: &Value) -> CliResult<Vec<PathBuf>> {
        Ok(serde_json::from_value::<E>(config.clone())?.inputs())
    }

    fn execute(&self, config: &Value, ctx: &Context) -> CliResult<Value> {
        serde_json::from_value::<E>(config.clone())?.run(ctx)
    }
}

fn runner<E: Experiment + 'static>() -> Box<dyn Command> {
    Box::new(Runner::<E>(PhantomData))
}

pub fn default_commands() -> Registry<dyn Command> {
    let mut reg: Registry<dyn Command> = Registry::new("command");
    reg.register(runner::<GenConfig>())
        .register(runner::<StatsConfig>())
        .register(runner::<DistConfig>())
        .register(runner::<QuotientConfig>())
        .register(runner::<RegularizeConfig>())
        .register(runner::<EncodeConfig>())
        .register(runner::<FiidConfig>())
        .register(runner::<HyperfiniteConfig>())
        .register(runner::<SpectralConfig>())
        .register(runner::<PtestConfig>());
    reg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Search,
}

/// Annealing and enumeration limits for quotient-set searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct BudgetArgs {
    /// Largest k^n enumerated exhaustively.
    #[arg(long, default_value_t = SearchBudget::default().max_colorings_enumerated)]
    pub max_colorings: u64,
    #[arg(long, default_value_t = SearchBudget::default().random_colorings)]
    pub random_colorings: usize,
    #[arg(long, default_value_t = SearchBudget::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = SearchBudget::default().steps)]
    pub steps: usize,
    #[arg(long, default_value_t = SearchBudget::default().initial_temperature)]
    pub temperature: f64,
    #[arg(long, default_value_t = SearchBudget::default().cooling)]
    pub cooling: f64,
    #[arg(long, default_value_t = SearchBudget::default().response_targets)]
    pub response_targets: usize,
}

impl BudgetArgs {
    pub fn to_budget(&self, seed: u64) -> SearchBudget {
        SearchBudget {
            max_colorings_enumerated: self.max_colorings,
            random_colorings: self.random_colorings,
            restarts: self.restarts,
            steps: self.steps,
            initial_temperature: self.temperature,
            cooling: self.cooling,
            response_targets: self.response_targets,
            seed,
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_graph(path: &Path) -> CliResult<BoundedGraph> {
    parse_graph(&read_text(path)?, None).map_err(|e| CliError::io(path, e))
}

pub fn load_coloring(path: &Path, n: usize) -> CliResult<VertexColoring> {
    let c = parse_coloring(&read_text(path)?).map_err(|e| CliError::io(path, e))?;
    c.check_len(n).map_err(|e| CliError::io(path, e))?;
    Ok(c)
}

fn write_side_file(ctx: &Context, path: &Path, text: &str) -> CliResult<()> {
    if ctx.write_outputs {
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

/// `"p/q"`.
pub fn ratio_string<T: Clone + num_integer::Integer + Display>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn require(ok: bool, msg: impl Into<String>) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(msg.into()))
    }
}

//! Batch front-end for locglob: every subcommand writes a JSON report that
//! embeds the tool version, the full configuration with seeds, and digests
//! of its input files, so `replay` can re-run it and compare.

pub mod commands;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use commands::{
    Context, DistConfig, EncodeConfig, Experiment, FiidConfig, GenConfig, HyperfiniteConfig,
    PtestConfig, QuotientConfig, RegularizeConfig, SpectralConfig, StatsConfig,
};
use error::{CliError, CliResult, EXIT_OK, EXIT_VALIDATION};
use report::{replay, run_command, Report};

#[derive(Debug, Parser)]
#[command(name = "locglob", version, about = "Local and local-global statistics of bounded-degree graphs")]
pub struct Cli {
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Generate a graph.
    Gen(GenConfig),
    /// Distribution of rooted r-balls.
    Stats(StatsConfig),
    /// Local and local-global distance between two graphs.
    Dist(DistConfig),
    /// Quotient set of k-colorings.
    Quotient(QuotientConfig),
    /// Regularizing coloring for a family of probes.
    Regularize(RegularizeConfig),
    /// Encode an edge coloring as vertex color sets.
    Encode(EncodeConfig),
    /// Run a factor-of-i.i.d. rule.
    Fiid(FiidConfig),
    /// τ_q certificates.
    Hyperfinite(HyperfiniteConfig),
    /// Spectral gap and expansion.
    Spectral(SpectralConfig),
    /// Sampling and witness-based property tests.
    Ptest(PtestConfig),
    /// Re-run a report and compare its results.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Report produced by this tool.
    pub report: PathBuf,
}

fn config_of<E: Experiment>(c: &E) -> CliResult<(&'static str, Value)> {
    Ok((E::NAME, serde_json::to_value(c)?))
}

impl Sub {
    /// Command name and configuration for everything except `replay`.
    pub fn experiment(&self) -> CliResult<Option<(&'static str, Value)>> {
        Ok(Some(match self {
            Sub::Gen(c) => config_of(c)?,
            Sub::Stats(c) => config_of(c)?,
            Sub::Dist(c) => config_of(c)?,
            Sub::Quotient(c) => config_of(c)?,
            Sub::Regularize(c) => config_of(c)?,
            Sub::Encode(c) => config_of(c)?,
            Sub::Fiid(c) => config_of(c)?,
            Sub::Hyperfinite(c) => config_of(c)?,
            Sub::Spectral(c) => config_of(c)?,
            Sub::Ptest(c) => config_of(c)?,
            Sub::Replay(_) => return Ok(None),
        }))
    }
}

pub fn read_report(path: &Path) -> CliResult<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

fn emit(out: Option<&Path>, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match cli.command.experiment()? {
        Some((name, config)) => {
            let report = run_command(name, config, &Context { write_outputs: true })?;
            emit(cli.out.as_deref(), &serde_json::to_value(&report)?)
        }
        None => {
            let Sub::Replay(args) = &cli.command else {
                unreachable!("only replay has no experiment")
            };
            let original = read_report(&args.report)?;
            replay(&original)?;
            emit(
                cli.out.as_deref(),
                &json!({"status": "identical", "command": original.command}),
            )
        }
    }
}

/// Runs the tool on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::Mismatch(diff)) => {
            let _ = emit(cli.out.as_deref(), &json!({"status": "mismatch", "diff": diff}));
            CliError::Mismatch(Value::Null).exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

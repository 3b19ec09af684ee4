use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use locglob::encode::{decode_edge_coloring, encode_edge_coloring, palette_limit, EdgeColoring};
use locglob::fiid::{color_density, default_rules, is_independent, quasirandom_deficiency, run_rule};
use locglob::graph::{write_coloring, BoundedGraph, VertexColoring};
use locglob::quotient::{coloring_count, EXACT_COLORING_LIMIT};
use locglob::regularize::{regularize, separates_within};
use locglob::rng::{derive_seed, keyed};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{load_graph, ratio_string, read_text, require, write_side_file, Context, Experiment};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProbeSet {
    /// Every k-coloring of the graph.
    All,
    /// `--probe-count` uniform colorings.
    Random,
}

fn random_coloring(n: usize, k: u32, seed: u64) -> VertexColoring {
    let colors = (0..n)
        .map(|v| (keyed(seed, v as u64) % u64::from(k)) as u32 + 1)
        .collect();
    VertexColoring::new(k, colors).expect("colors within palette")
}

/// One coloring emulating a family of probe colorings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct RegularizeConfig {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "all")]
    pub probes: ProbeSet,
    #[arg(long, default_value_t = 256)]
    pub probe_count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Experiment for RegularizeConfig {
    const NAME: &'static str = "regularize";

    fn inputs(&self) -> Vec<PathBuf> {
        vec![self.graph.clone()]
    }

    fn run(&self, _ctx: &Context) -> CliResult<Value> {
        require(self.k >= 1, "--k must be at least 1")?;
        let g = load_graph(&self.graph)?;
        let probes: Vec<VertexColoring> = match self.probes {
            ProbeSet::All => {
                let count = coloring_count(g.n(), self.k);
                if count > EXACT_COLORING_LIMIT {
                    return Err(locglob::Error::BudgetExceeded(format!(
                        "{count} probe colorings exceed the limit {EXACT_COLORING_LIMIT}"
                    ))
                    .into());
                }
                (0..count)
                    .map(|i| VertexColoring::from_index(g.n(), self.k, i))
                    .collect()
            }
            ProbeSet::Random => (0..self.probe_count)
                .map(|i| random_coloring(g.n(), self.k, derive_seed(self.seed, i as u64)))
                .collect(),
        };
        let res = regularize(&g, self.r, self.k, self.eps, &probes)?;
        let worst = res
            .table()
            .iter()
            .map(|e| e.achieved_tv)
            .max()
            .expect("at least one probe");
        Ok(json!({
            "t": res.t(),
            "palette_bound": res.palette_bound(),
            "separated": separates_within(&g, res.q(), self.r),
            "q": res.q().colors(),
            "representatives": res.representatives().iter()
                .map(|rep| json!({"probe": rep.probe, "alpha": rep.alpha}))
                .collect::<Vec<_>>(),
            "probes": probes.len(),
            "covered": res.table().iter().filter(|e| e.covered).count(),
            "max_achieved_tv": ratio_string(&worst),
        }))
    }
}

/// Edge coloring file: `m k` header, then `u v color` per edge.
pub fn parse_edge_coloring(g: &BoundedGraph, text: &str) -> locglob::Result<EdgeColoring> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let parse_err = |line: usize, msg: &str| locglob::Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
    let head: Vec<u64> = header
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| parse_err(hl, "expected `m k`")))
        .collect::<locglob::Result<_>>()?;
    let [m, k] = head[..] else {
        return Err(parse_err(hl, "expected `m k`"));
    };
    let mut entries = Vec::new();
    for (ln, line) in lines {
        let f: Vec<u64> = line
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| parse_err(ln, "expected `u v color`")))
            .collect::<locglob::Result<_>>()?;
        let [u, v, c] = f[..] else {
            return Err(parse_err(ln, "expected `u v color`"));
        };
        entries.push(((u as usize, v as usize), c as u32));
    }
    if entries.len() as u64 != m {
        return Err(parse_err(hl, "edge count does not match header"));
    }
    EdgeColoring::new(g, k as u32, &entries)
}

/// Edge coloring to vertex-set coloring and back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct EncodeConfig {
    #[arg(long)]
    pub graph: PathBuf,
    /// Edge coloring file; a uniform random one is drawn when absent.
    #[arg(long)]
    pub edge_coloring: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Experiment for EncodeConfig {
    const NAME: &'static str = "encode";

    fn inputs(&self) -> Vec<PathBuf> {
        let mut v = vec![self.graph.clone()];
        v.extend(self.edge_coloring.clone());
        v
    }

    fn run(&self, _ctx: &Context) -> CliResult<Value> {
        let g = load_graph(&self.graph)?;
        let c = match &self.edge_coloring {
            Some(path) => parse_edge_coloring(&g, &read_text(path)?).map_err(|e| CliError::io(path, e))?,
            None => {
                require(self.k >= 1, "--k must be at least 1")?;
                let entries: Vec<_> = g
                    .edges()
                    .into_iter()
                    .enumerate()
                    .map(|(i, e)| (e, (keyed(self.seed, i as u64) % u64::from(self.k)) as u32 + 1))
                    .collect();
                EdgeColoring::new(&g, self.k, &entries)?
            }
        };
        let (c1, c2) = encode_edge_coloring(&g, &c)?;
        let decoded = decode_edge_coloring(&g, &c2, c.k())?;
        let unique = g
            .edges()
            .into_iter()
            .all(|(u, v)| c2.set(u).intersection(c2.set(v)).count() == 1);
        Ok(json!({
            "k": c.k(),
            "palette": c1.k(),
            "palette_limit": palette_limit(g.max_degree(), c.k()),
            "c1": c1.iter().map(|((u, v), x)| [u as u64, v as u64, u64::from(x)]).collect::<Vec<_>>(),
            "c2": c2.sets(),
            "unique_intersections": unique,
            "round_trip": decoded == c,
        }))
    }
}

/// Run a factor-of-i.i.d. rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct FiidConfig {
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Also measure quasirandom deficiency at this radius.
    #[arg(long)]
    pub quasirandom_r: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub mc_samples: usize,
    /// Write the first trial's coloring here.
    #[arg(long)]
    pub coloring_out: Option<PathBuf>,
}

impl Experiment for FiidConfig {
    const NAME: &'static str = "fiid";

    fn inputs(&self) -> Vec<PathBuf> {
        vec![self.graph.clone()]
    }

    fn run(&self, ctx: &Context) -> CliResult<Value> {
        require(self.trials >= 1, "--trials must be at least 1")?;
        let rules = default_rules();
        let rule = rules.get(&self.rule)?;
        let g = load_graph(&self.graph)?;
        let base = VertexColoring::constant(g.n(), 1, 1)?;
        let mut trials = Vec::new();
        let mut total = 0.0;
        for i in 0..self.trials {
            let seed = derive_seed(self.seed, i as u64);
            let c = run_rule(&g, rule, seed)?;
            if i == 0 {
                if let Some(path) = &self.coloring_out {
                    write_side_file(ctx, Path::new(path), &write_coloring(&c))?;
                }
            }
            let density = color_density(&c, 1);
            total += density;
            let deficiency = match self.quasirandom_r {
                Some(r) => Some(quasirandom_deficiency(
                    &g,
                    &c,
                    &base,
                    r,
                    self.mc_samples,
                    derive_seed(seed, 1),
                )?),
                None => None,
            };
            trials.push(json!({
                "seed": seed,
                "density": density,
                "color_one_independent": is_independent(&g, &c, 1),
                "deficiency": deficiency,
            }));
        }
        Ok(json!({
            "rule": rule.name(),
            "radius": rule.radius(),
            "palette": rule.palette(),
            "trials": trials,
            "mean_density": total / self.trials as f64,
        }))
    }
}

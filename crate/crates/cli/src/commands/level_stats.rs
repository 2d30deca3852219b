use std::io::Write;
use std::path::PathBuf;

use percolimit::rng::{Purpose, StreamSplitter};
use percolimit::samplers::ModelParams;
use percolimit::stats::{level_limit_mean, sample_level_limit, SampleSet, DEFAULT_RELATIVE_DELTA};
use percolimit::trees::PlaneTree;
use percolimit::Manifest;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simulate::read_envelope;
use super::{create_dir, read_text, with_pool, write_manifest, write_text, write_with, Context};
use crate::config::resolve;
use crate::CliError;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// `.pt` tree whose level sizes `C[i]` and volumes `C[0, i]` are written.
    #[arg(long, conflicts_with = "envelope")]
    #[serde(skip)]
    input: Option<PathBuf>,
    /// Envelope CSV; draws the level limit at level `a` conditionally on it.
    #[arg(long, required_unless_present = "input")]
    envelope: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    max_level: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sigma: Option<u32>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    relative_delta: Option<f64>,
    /// Output file for `--input` (default: stdout), output directory for
    /// `--envelope`.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitConfig {
    seed: u64,
    sigma: u32,
    a: f64,
    replicas: usize,
    relative_delta: f64,
    envelope: PathBuf,
}

#[derive(Serialize)]
struct Summary {
    a: f64,
    gamma: f64,
    delta: f64,
    discarded_bound: f64,
    closed_form_mean: f64,
    sample_mean: f64,
    n: usize,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    if let Some(input) = &args.input {
        let tree = PlaneTree::parse_pt(&read_text(input)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
        let sizes = tree.generation_sizes();
        let max = args.max_level.unwrap_or(sizes.len().saturating_sub(1));
        let mut csv = String::from("level,count,volume\n");
        let mut volume = 0u64;
        for i in 0..=max {
            let c = sizes.get(i).copied().unwrap_or(0);
            volume += c;
            csv += &format!("{i},{c},{volume}\n");
        }
        return match &args.out {
            Some(p) => write_text(p, &csv),
            None => std::io::stdout().write_all(csv.as_bytes()).map_err(CliError::from),
        };
    }
    let out = args
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("out: an output directory is required with --envelope".into()))?;
    let defaults = serde_json::json!({
        "sigma": 2,
        "a": 1.0,
        "replicas": 1000,
        "relative_delta": DEFAULT_RELATIVE_DELTA,
    });
    let cfg: LimitConfig = resolve(&defaults, &ctx.file, &args)?;
    let params = ModelParams::new(cfg.sigma).map_err(|e| CliError::Usage(format!("sigma: {e}")))?;
    if cfg.replicas == 0 {
        return Err(CliError::Usage("replicas: must be positive".into()));
    }
    let gamma = params.gamma();
    let env = read_envelope(&cfg.envelope)?;
    let delta = cfg.relative_delta * cfg.a * gamma.sqrt();
    let split = StreamSplitter::new(cfg.seed);
    let draws = with_pool(ctx.workers, || {
        (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| sample_level_limit(&env, cfg.a, gamma, delta, &mut split.stream(r, Purpose::LevelLimit)))
            .collect::<percolimit::Result<Vec<_>>>()
    })??;
    let discarded_bound = draws[0].discarded_bound;
    let mut set = SampleSet::new("level_limit", draws.into_iter().map(|d| d.total).collect())?;
    set.manifest = Some("manifest.json".into());
    let summary = Summary {
        a: cfg.a,
        gamma,
        delta,
        discarded_bound,
        closed_form_mean: level_limit_mean(&env, cfg.a, gamma, delta)?,
        sample_mean: set.mean(),
        n: set.len(),
    };
    create_dir(&out)?;
    std::fs::copy(&cfg.envelope, out.join("envelope.csv"))
        .map_err(|e| CliError::Io(format!("{}: {e}", cfg.envelope.display())))?;
    write_with(&out.join("level_limit.csv"), |w| set.write_csv(w))?;
    write_text(
        &out.join("summary.json"),
        &(serde_json::to_string_pretty(&summary).expect("serializes") + "\n"),
    )?;
    let mut params = serde_json::to_value(&cfg).expect("serializes");
    params["envelope"] = "envelope.csv".into();
    write_manifest(
        &out,
        &Manifest::new(cfg.seed, cfg.sigma, "level-limit", params, cfg.replicas as u64),
    )
}

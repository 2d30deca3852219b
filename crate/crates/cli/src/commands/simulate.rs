use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use percolimit::codec::{lukaciewicz, LatticePath};
use percolimit::continuum::{solve_sde, solve_two_sided, Envelope, SdeConfig, Variant};
use percolimit::rng::{Purpose, StreamSplitter};
use percolimit::samplers::{
    sample_gw, sample_ipc_direct, sample_w_asymptotic, BackboneModel, ModelParams, SinTreeSampler, SinTreeSeeds, ZLaw,
    DEFAULT_GW_CAP,
};
use percolimit::trees::{PlaneTree, SinTree};
use percolimit::Manifest;
use serde::{Deserialize, Serialize};

use super::{create_dir, write_manifest, write_text, write_with, Context};
use crate::config::resolve;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Bin(σ, w) Galton-Watson tree.
    Gw,
    /// `(Z, θ)` sin-tree with `Z ~ z_law` and Bin(σ, w) subtrees.
    Ztheta,
    /// One-sided incipient infinite cluster.
    IicCond,
    /// Two-sided incipient infinite cluster.
    Iic,
    /// Invasion cluster along the `W` path read off a fresh envelope at scale k.
    IpcStructural,
    /// Invasion percolation run edge by edge.
    IpcDirect,
    /// Poisson lower envelope.
    Envelope,
    /// Solution of the envelope-driven equation.
    Sde,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Gw => "gw",
            Model::Ztheta => "ztheta",
            Model::IicCond => "iic-cond",
            Model::Iic => "iic",
            Model::IpcStructural => "ipc-structural",
            Model::IpcDirect => "ipc-direct",
            Model::Envelope => "envelope",
            Model::Sde => "sde",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Full,
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingArg {
    SharedEnvelope,
    Independent,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::Half => Variant::Half,
        }
    }
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sigma: Option<u32>,
    /// Backbone height of sin-tree models.
    #[arg(long)]
    height: Option<usize>,
    /// Offspring parameter of `gw` and `ztheta`.
    #[arg(long)]
    w: Option<f64>,
    /// Law of Z for `ztheta`, as JSON, e.g. '{"family":"binomial","trials":1,"p":0.5}'.
    #[arg(long, value_parser = parse_z_law)]
    z_law: Option<ZLaw>,
    /// Scale k of `ipc-structural`.
    #[arg(long)]
    k: Option<f64>,
    /// Two-sided variant of `ipc-structural`; for `sde`, solve `E(L/2)` for
    /// both sides.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    two_sided: bool,
    /// Number of invaded edges of `ipc-direct`.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long = "tmin")]
    #[serde(rename = "t_min")]
    t_min: Option<f64>,
    #[arg(long = "tmax")]
    #[serde(rename = "t_max")]
    t_max: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Randomness shared by the two sides of a two-sided `sde` run.
    #[arg(long, value_enum)]
    coupling: Option<CouplingArg>,
    /// Run `sde` until `-Y̲` reaches this level instead of a fixed horizon.
    #[arg(long)]
    stop_level: Option<f64>,
    /// Vertex cap of each Galton-Watson tree.
    #[arg(long)]
    cap: Option<usize>,
    /// Drive `sde` with this envelope CSV instead of a fresh one.
    #[arg(long)]
    envelope: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

fn parse_z_law(s: &str) -> Result<ZLaw, String> {
    serde_json::from_str(s).map_err(|e| format!("invalid Z law: {e}"))
}

/// Resolved options, recorded verbatim in the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: Model,
    pub seed: u64,
    pub sigma: u32,
    pub height: usize,
    pub w: f64,
    pub z_law: ZLaw,
    pub k: f64,
    pub two_sided: bool,
    pub steps: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub dt: f64,
    pub horizon: f64,
    pub epsilon: f64,
    pub variant: VariantArg,
    pub coupling: CouplingArg,
    pub stop_level: Option<f64>,
    pub cap: usize,
    pub envelope: Option<PathBuf>,
}

impl Config {
    fn defaults(model: Model) -> Config {
        Config {
            model,
            seed: 0,
            sigma: 2,
            height: 100,
            w: 0.45,
            z_law: ZLaw::Binomial { trials: 1, p: 0.5 },
            k: 100.0,
            two_sided: false,
            steps: 1000,
            t_min: 1e-6,
            t_max: 50.0,
            dt: 1e-4,
            horizon: 1.0,
            epsilon: 1e-3,
            variant: VariantArg::Full,
            coupling: CouplingArg::SharedEnvelope,
            stop_level: None,
            cap: DEFAULT_GW_CAP,
            envelope: None,
        }
    }
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let model = match (args.model, ctx.file.get("model")) {
        (Some(m), _) => m,
        (None, Some(v)) => serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("model: {e}")))?,
        (None, None) => return Err(CliError::Usage("model: missing (pass --model)".into())),
    };
    let mut cfg: Config = resolve(&Config::defaults(model), &ctx.file, &args)?;
    if cfg.model == Model::Sde && cfg.two_sided {
        cfg.variant = VariantArg::Half;
    }
    let params = ModelParams::new(cfg.sigma).map_err(|e| CliError::Usage(format!("sigma: {e}")))?;
    create_dir(&args.out)?;
    let out = args.out.as_path();
    let split = StreamSplitter::new(cfg.seed);
    match cfg.model {
        Model::Gw => {
            let tree = sample_gw(cfg.sigma, cfg.w, cfg.cap, &mut split.stream(0, Purpose::Tree))
                .into_result(cfg.cap)
                .map_err(|_| overflow(cfg.cap))?;
            write_tree(out, "tree", &tree)?;
        }
        Model::Ztheta | Model::IicCond | Model::Iic => {
            let model = match cfg.model {
                Model::Ztheta => BackboneModel::ZTheta {
                    z_law: cfg.z_law.clone(),
                    w: cfg.w,
                },
                m => BackboneModel::Iic {
                    two_sided: m == Model::Iic,
                },
            };
            let sampler = SinTreeSampler::with_cap(params, model, cfg.cap)?;
            write_sin_tree(out, &sampler, &cfg, &split)?;
        }
        Model::IpcStructural => {
            let env = Envelope::sample(
                cfg.t_min,
                cfg.height as f64 / cfg.k + 1.0,
                &mut split.stream(0, Purpose::Envelope),
            )?;
            let w_path = sample_w_asymptotic(cfg.sigma, cfg.k, &env, cfg.height)?;
            write_with(&out.join("envelope.csv"), |w| env.write_csv(w))?;
            write_text(
                &out.join("w_path.json"),
                &(serde_json::to_string_pretty(&w_path).expect("serializes") + "\n"),
            )?;
            let model = BackboneModel::Structural {
                w_path,
                two_sided: cfg.two_sided,
            };
            let sampler = SinTreeSampler::with_cap(params, model, cfg.cap)?;
            write_sin_tree(out, &sampler, &cfg, &split)?;
        }
        Model::IpcDirect => {
            let run = sample_ipc_direct(cfg.sigma, cfg.steps, &mut split.stream(0, Purpose::Invasion))?;
            write_tree(out, "tree", &run.to_plane_tree())?;
            let weights = LatticePath::new(run.accepted.clone())?;
            write_with(&out.join("weights.csv"), |w| weights.write_csv(w))?;
        }
        Model::Envelope => {
            let env = Envelope::sample(cfg.t_min, cfg.t_max, &mut split.stream(0, Purpose::Envelope))?;
            write_with(&out.join("envelope.csv"), |w| env.write_csv(w))?;
        }
        Model::Sde => {
            let env = match &cfg.envelope {
                Some(p) => read_envelope(p)?,
                None => Envelope::sample(cfg.t_min, cfg.t_max, &mut split.stream(0, Purpose::Envelope))?,
            };
            let sde = SdeConfig {
                dt: cfg.dt,
                horizon: cfg.horizon,
                epsilon: cfg.epsilon,
                variant: cfg.variant.into(),
                stop_level: cfg.stop_level,
                ..SdeConfig::default()
            };
            write_with(&out.join("envelope.csv"), |w| env.write_csv(w))?;
            if cfg.two_sided {
                let right_env = match cfg.coupling {
                    CouplingArg::SharedEnvelope => None,
                    CouplingArg::Independent => Some(Envelope::sample(
                        cfg.t_min.min(env.t_min()),
                        cfg.t_max.max(env.t_max()),
                        &mut split.stream(0, Purpose::Envelope2),
                    )?),
                };
                let (left, right) = solve_two_sided(
                    &env,
                    right_env.as_ref().unwrap_or(&env),
                    &sde,
                    &mut split.stream(0, Purpose::Noise),
                    &mut split.stream(0, Purpose::Noise2),
                )?;
                if let Some(r) = &right_env {
                    write_with(&out.join("envelope_right.csv"), |w| r.write_csv(w))?;
                }
                write_with(&out.join("path_left.csv"), |w| left.write_csv(w))?;
                write_with(&out.join("path_right.csv"), |w| right.write_csv(w))?;
            } else {
                let path = solve_sde(&env, &sde, &mut split.stream(0, Purpose::Noise))?;
                write_with(&out.join("path.csv"), |w| path.write_csv(w))?;
            }
        }
    }
    let mut params = serde_json::to_value(&cfg).expect("config serializes");
    if cfg.envelope.is_some() {
        params["envelope"] = "envelope.csv".into();
    }
    write_manifest(out, &Manifest::new(cfg.seed, cfg.sigma, cfg.model.name(), params, 1))
}

fn overflow(cap: usize) -> CliError {
    CliError::Usage(format!(
        "cap: a Galton-Watson tree exceeded {cap} vertices; raise --cap or change the seed"
    ))
}

pub fn read_envelope(path: &Path) -> Result<Envelope, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Envelope::read_csv(BufReader::new(f)).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_tree(out: &Path, stem: &str, tree: &PlaneTree) -> Result<(), CliError> {
    write_text(&out.join(format!("{stem}.pt")), &tree.to_pt_string())?;
    write_with(&out.join(format!("{stem}_lukaciewicz.csv")), |w| {
        lukaciewicz(tree).write_csv(w)
    })
}

/// `tree.pt` is the materialized sin-tree with `BB_height` as a leaf; for
/// two-sided models `left.pt` and `right.pt` are the truncations of the two
/// sides.
fn write_sin_tree(out: &Path, sampler: &SinTreeSampler, cfg: &Config, split: &StreamSplitter) -> Result<(), CliError> {
    let seeds = SinTreeSeeds::from_splitter(split, 0);
    let tree: SinTree = sampler.materialize(cfg.height, &seeds).map_err(|e| match e {
        percolimit::Error::Overflow { cap } => overflow(cap),
        e => e.into(),
    })?;
    write_tree(out, "tree", &tree.to_plane_tree())?;
    if sampler.model().is_two_sided() {
        let (left, right) = tree.split_sides();
        write_tree(out, "left", &left.truncate(cfg.height)?)?;
        write_tree(out, "right", &right.truncate(cfg.height)?)?;
    }
    Ok(())
}

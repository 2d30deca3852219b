use std::path::PathBuf;

use percolimit::stats::experiment::{run_experiment, ExperimentKind, ExperimentSpec};
use serde::Serialize;

use super::{create_dir, write_manifest, write_text, write_with, Context};
use crate::config::resolve;
use crate::CliError;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// One of iic-height, iic-bessel, ipc-lukaciewicz, levels-cross, volume, levels.
    #[arg(long)]
    #[serde(skip)]
    experiment: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sigma: Option<u32>,
    #[arg(long)]
    k: Option<f64>,
    /// Replicas of both samples.
    #[arg(long)]
    #[serde(skip)]
    replicas: Option<usize>,
    #[arg(long)]
    n_a: Option<usize>,
    #[arg(long)]
    n_b: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long = "tmin")]
    t_min: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    relative_delta: Option<f64>,
    #[arg(long)]
    max_height: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    max_abs_correlation: Option<f64>,
    /// Validate and print the plan without sampling.
    #[arg(long)]
    #[serde(skip)]
    dry_run: bool,
    #[arg(long, required_unless_present = "dry_run")]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let mut file = ctx.file.clone();
    let kind_name = match (&args.experiment, file.remove("experiment"), file.get("kind")) {
        (Some(k), _, _) => k.clone(),
        (None, Some(v), _) => v
            .as_str()
            .ok_or_else(|| CliError::Usage("experiment: expected a string".into()))?
            .to_owned(),
        (None, None, Some(v)) => v
            .as_str()
            .ok_or_else(|| CliError::Usage("experiment: expected a string".into()))?
            .to_owned(),
        (None, None, None) => return Err(CliError::Usage("experiment: missing (pass --experiment)".into())),
    };
    let kind: ExperimentKind = kind_name
        .parse()
        .map_err(|e: percolimit::Error| CliError::Usage(format!("experiment: {e}")))?;
    file.insert("kind".into(), kind.name().into());
    if let Some(n) = args.replicas {
        file.insert("n_a".into(), n.into());
        file.insert("n_b".into(), n.into());
    }
    let spec: ExperimentSpec = resolve(&ExperimentSpec::new(kind, 0), &file, &args)?;
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if args.dry_run {
        println!("{}", spec.plan());
        return Ok(());
    }
    let out = args.out.expect("required unless dry run");
    let report = run_experiment(&spec, ctx.workers)?;
    create_dir(&out)?;
    write_manifest(&out, &report.manifest)?;
    let (a, b) = report.samples.as_ref().expect("fresh report carries samples");
    write_with(&out.join("sample_a.csv"), |w| a.write_csv(w))?;
    write_with(&out.join("sample_b.csv"), |w| b.write_csv(w))?;
    write_text(&out.join("report.json"), &(report.to_json() + "\n"))?;
    let summary = format!(
        "{}: KS = {:.4} (threshold {}), p = {:.4}{}",
        report.experiment,
        report.ks_stat,
        report.threshold,
        report.p_value,
        report
            .checks
            .iter()
            .map(|c| format!(", {} = {:.4} (bound {:.4})", c.name, c.value, c.bound))
            .collect::<String>()
    );
    if report.pass {
        println!("PASS {summary}");
        Ok(())
    } else {
        println!("FAIL {summary}");
        Err(CliError::Failed(format!("{} did not pass", report.experiment)))
    }
}

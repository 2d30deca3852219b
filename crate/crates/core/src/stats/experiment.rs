//! Two-sample convergence experiments: a discrete sampler at scale `k`
//! against the corresponding limit functional, compared with a KS test.
//!
//! Replica `r` draws all of its randomness from the streams of replica `r`
//! of the master seed, so results do not depend on the worker count.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ks::ks_two_sample;
use super::level_limit::{level_limit_mean, sample_level_limit};
use super::local_time::segment_occupation;
use super::sample_set::{correlation, SampleSet};
use crate::codec::heights_from_steps;
use crate::continuum::{solve_sde, visit_sde, Envelope, Functional, LimitPath, SdeConfig, Variant};
use crate::error::{Error, Result};
use crate::manifest::Manifest;
use crate::rng::{Purpose, StreamSplitter};
use crate::samplers::{
    sample_level_profile, sample_w_asymptotic, BackboneModel, ModelParams, SinTreeSampler, SinTreeSeeds,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Conditioned IIC height `H(k²t)/k` against `γ^{-1/2}(2Y_t - 3Y̲_t)`, `L ≡ 0`.
    IicHeight,
    /// Unconditioned IIC left-side height against `2γ^{-1/2}(Y_t - 2Y̲_t)`,
    /// with the correlation of the two sides.
    IicBessel,
    /// Structural IPC Lukaciewicz value `V(k²t)/k` against `γ^{1/2}(Y_t - Y̲_t)`.
    IpcLukaciewicz,
    /// Occupation estimate of `(γ/4) l^a_∞(H)` against the Poisson sum, on a
    /// shared envelope.
    LevelsCross,
    /// `C[0, ak]/k²` against `∫ 1_{[0,a]}(H_s) ds`.
    Volume,
    /// `C[ak]/k` against the Poisson sum.
    Levels,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::IicHeight,
        ExperimentKind::IicBessel,
        ExperimentKind::IpcLukaciewicz,
        ExperimentKind::LevelsCross,
        ExperimentKind::Volume,
        ExperimentKind::Levels,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::IicHeight => "iic-height",
            ExperimentKind::IicBessel => "iic-bessel",
            ExperimentKind::IpcLukaciewicz => "ipc-lukaciewicz",
            ExperimentKind::LevelsCross => "levels-cross",
            ExperimentKind::Volume => "volume",
            ExperimentKind::Levels => "levels",
        }
    }

    /// Labels of the two compared samples.
    pub fn labels(self) -> (&'static str, &'static str) {
        match self {
            ExperimentKind::IicHeight => ("iic_cond_height", "height_R"),
            ExperimentKind::IicBessel => ("iic_left_height", "height_side"),
            ExperimentKind::IpcLukaciewicz => ("ipc_lukaciewicz", "lukaciewicz_R"),
            ExperimentKind::LevelsCross => ("occupation_local_time", "level_limit"),
            ExperimentKind::Volume => ("ipc_volume", "occupation_volume"),
            ExperimentKind::Levels => ("ipc_level", "level_limit"),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            Error::invalid(format!(
                "unknown experiment `{s}` (expected one of {})",
                names.join(", ")
            ))
        })
    }
}

/// Full description of an experiment. Together with the seed it determines
/// every sample bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub sigma: u32,
    /// Scale `k` of the discrete side.
    pub k: f64,
    /// Replicas of the discrete (or first) sample.
    pub n_a: usize,
    /// Replicas of the limit (or second) sample.
    pub n_b: usize,
    /// Observation time of the path marginals.
    pub t: f64,
    pub dt: f64,
    pub epsilon: f64,
    /// Envelopes are sampled on `[t_min, ·]`.
    pub t_min: f64,
    /// Level `a` of the volume and level functionals.
    pub a: f64,
    pub eta: f64,
    /// Truncation of the Poisson sum, relative to `a√γ`.
    pub relative_delta: f64,
    /// Backbone height covered by the `W` path of the structural sampler.
    pub max_height: usize,
    /// KS statistic threshold.
    pub threshold: f64,
    /// Bound on `|ρ|` between the two sides (iic-bessel only).
    pub max_abs_correlation: f64,
}

impl ExperimentSpec {
    /// Defaults of each experiment kind.
    pub fn new(kind: ExperimentKind, seed: u64) -> ExperimentSpec {
        let base = ExperimentSpec {
            kind,
            seed,
            sigma: 2,
            k: 300.0,
            n_a: 10_000,
            n_b: 10_000,
            t: 1.0,
            dt: 1e-4,
            epsilon: 1e-3,
            t_min: 1e-6,
            a: 1.0,
            eta: 0.02,
            relative_delta: super::level_limit::DEFAULT_RELATIVE_DELTA,
            max_height: 40_000,
            threshold: 0.05,
            max_abs_correlation: 0.03,
        };
        match kind {
            ExperimentKind::IicHeight | ExperimentKind::IicBessel => base,
            ExperimentKind::IpcLukaciewicz => ExperimentSpec {
                k: 200.0,
                threshold: 0.07,
                ..base
            },
            ExperimentKind::LevelsCross => ExperimentSpec { dt: 1e-5, ..base },
            ExperimentKind::Volume | ExperimentKind::Levels => ExperimentSpec {
                k: 200.0,
                threshold: 0.07,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        ModelParams::new(self.sigma)?;
        let positive = [
            ("k", self.k),
            ("t", self.t),
            ("dt", self.dt),
            ("epsilon", self.epsilon),
            ("t_min", self.t_min),
            ("a", self.a),
            ("eta", self.eta),
            ("relative_delta", self.relative_delta),
            ("threshold", self.threshold),
            ("max_abs_correlation", self.max_abs_correlation),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n_a == 0 || self.n_b == 0 {
            return Err(Error::invalid("n_a and n_b must be positive"));
        }
        if self.kind == ExperimentKind::IicBessel && self.n_a < 2 {
            return Err(Error::invalid("n_a must be at least 2 for the correlation check"));
        }
        if self.dt > self.t {
            return Err(Error::invalid(format!("dt = {} exceeds t = {}", self.dt, self.t)));
        }
        if self.kind == ExperimentKind::IpcLukaciewicz && self.max_height == 0 {
            return Err(Error::invalid("max_height must be positive"));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        crate::samplers::gamma(self.sigma)
    }

    /// Number of discrete steps `⌊k² t⌋` read off the coding paths.
    pub fn n_steps(&self) -> usize {
        (self.k * self.k * self.t).floor() as usize
    }

    /// Level `⌊ak⌋` of the level and volume counts.
    pub fn level(&self) -> usize {
        (self.a * self.k).floor() as usize
    }

    pub fn delta(&self) -> f64 {
        self.relative_delta * self.a * self.gamma().sqrt()
    }

    pub fn manifest(&self) -> Manifest {
        let params = serde_json::to_value(self).expect("spec serializes");
        Manifest::new(
            self.seed,
            self.sigma,
            self.kind.name(),
            params,
            (self.n_a.max(self.n_b)) as u64,
        )
    }

    /// Human-readable description of what [`run_experiment`] would do.
    pub fn plan(&self) -> String {
        let (la, lb) = self.kind.labels();
        let mut s = format!(
            "experiment {} (seed {}, sigma {}, gamma {:.6})\n",
            self.kind,
            self.seed,
            self.sigma,
            self.gamma()
        );
        let side_a = match self.kind {
            ExperimentKind::IicHeight | ExperimentKind::IicBessel => {
                format!("k = {}, {} depth-first steps", self.k, self.n_steps())
            }
            ExperimentKind::IpcLukaciewicz => format!(
                "k = {}, {} depth-first steps, W path up to height {}",
                self.k,
                self.n_steps(),
                self.max_height
            ),
            ExperimentKind::LevelsCross => format!(
                "solver dt = {}, epsilon = {}, a = {}, eta = {}",
                self.dt, self.epsilon, self.a, self.eta
            ),
            ExperimentKind::Volume | ExperimentKind::Levels => {
                format!("k = {}, level {}", self.k, self.level())
            }
        };
        let side_b = match self.kind {
            ExperimentKind::LevelsCross | ExperimentKind::Levels => {
                format!("Poisson sum, a = {}, delta = {:e}", self.a, self.delta())
            }
            _ => format!("solver dt = {}, epsilon = {}, t = {}", self.dt, self.epsilon, self.t),
        };
        s += &format!("  A: {la} x {} ({side_a})\n", self.n_a);
        s += &format!("  B: {lb} x {} ({side_b})\n", self.n_b);
        s += &format!("  pass if KS statistic < {}", self.threshold);
        if self.kind == ExperimentKind::IicBessel {
            s += &format!(" and |rho| < {}", self.max_abs_correlation);
        }
        if self.kind == ExperimentKind::LevelsCross {
            s += " and both sample means within 3 SE of the closed-form mean";
        }
        s
    }
}

/// An auxiliary pass/fail check reported next to the KS test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub manifest: Manifest,
    #[serde(rename = "n_A")]
    pub n_a: usize,
    #[serde(rename = "n_B")]
    pub n_b: usize,
    pub ks_stat: f64,
    pub p_value: f64,
    pub threshold: f64,
    pub pass: bool,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub samples: Option<(SampleSet, SampleSet)>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn par_map<T: Send>(n: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Runs `spec` on `workers` threads (all available cores by default).
pub fn run_experiment(spec: &ExperimentSpec, workers: Option<usize>) -> Result<Report> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::invalid("workers must be positive"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let start = Instant::now();
    let (a, b, checks) = pool.install(|| sample_sides(spec))?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let (la, lb) = spec.kind.labels();
    let mut a = SampleSet::new(la, a)?;
    let mut b = SampleSet::new(lb, b)?;
    a.manifest = Some("manifest.json".into());
    b.manifest = Some("manifest.json".into());
    let (ks_stat, p_value) = ks_two_sample(&a.values, &b.values)?;
    let pass = ks_stat < spec.threshold && checks.iter().all(|c| c.pass);
    Ok(Report {
        experiment: spec.kind.name().into(),
        manifest: spec.manifest(),
        n_a: a.len(),
        n_b: b.len(),
        ks_stat,
        p_value,
        threshold: spec.threshold,
        pass,
        wall_time_s,
        checks,
        samples: Some((a, b)),
    })
}

type Sides = (Vec<f64>, Vec<f64>, Vec<Check>);

fn sample_sides(spec: &ExperimentSpec) -> Result<Sides> {
    let split = StreamSplitter::new(spec.seed);
    let params = ModelParams::new(spec.sigma)?;
    let gamma = params.gamma();
    match spec.kind {
        ExperimentKind::IicHeight => {
            let sampler = SinTreeSampler::new(params, BackboneModel::Iic { two_sided: false })?;
            let a = par_map(spec.n_a, |r| {
                let seeds = SinTreeSeeds::from_splitter(&split, r);
                Ok(side_height(&sampler, &seeds, spec.n_steps(), false)? as f64 / spec.k)
            })?;
            let b = par_map(spec.n_b, |r| brownian_marginal(spec, &split, r, Functional::HeightR))?;
            Ok((a, b, Vec::new()))
        }
        ExperimentKind::IicBessel => {
            let sampler = SinTreeSampler::new(params, BackboneModel::Iic { two_sided: true })?;
            let pairs = par_map(spec.n_a, |r| {
                let seeds = SinTreeSeeds::from_splitter(&split, r);
                let left = side_height(&sampler, &seeds, spec.n_steps(), false)? as f64 / spec.k;
                let right = side_height(&sampler, &seeds, spec.n_steps(), true)? as f64 / spec.k;
                Ok((left, right))
            })?;
            let (a, right): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let rho = correlation(&a, &right)?;
            let check = Check {
                name: "abs_correlation".into(),
                value: rho.abs(),
                bound: spec.max_abs_correlation,
                pass: rho.abs() < spec.max_abs_correlation,
            };
            let b = par_map(spec.n_b, |r| brownian_marginal(spec, &split, r, Functional::HeightSide))?;
            Ok((a, b, vec![check]))
        }
        ExperimentKind::IpcLukaciewicz => {
            let n = spec.n_steps();
            let t_max = spec.max_height as f64 / spec.k + 1.0;
            let a = par_map(spec.n_a, |r| {
                let env = Envelope::sample(spec.t_min, t_max, &mut split.stream(r, Purpose::Envelope))?;
                let w_path = sample_w_asymptotic(spec.sigma, spec.k, &env, spec.max_height)?;
                let model = BackboneModel::Structural {
                    w_path,
                    two_sided: false,
                };
                let sampler = SinTreeSampler::new(params, model)?;
                let prefix = sampler.left_prefix(n, &SinTreeSeeds::from_splitter(&split, r))?;
                let v: i64 = prefix.iter().map(|&c| i64::from(c) - 1).sum();
                Ok(v as f64 / spec.k)
            })?;
            let b = par_map(spec.n_b, |r| {
                let env = Envelope::sample(spec.t_min, 50.0, &mut split.stream(r, Purpose::Envelope2))?;
                let path = solve_marginal(spec, &env, &split, r)?;
                let (y, m) = path.last();
                Ok(Functional::LukaciewiczR.apply(y, m, gamma))
            })?;
            Ok((a, b, Vec::new()))
        }
        ExperimentKind::LevelsCross => levels_cross(spec, &split, gamma),
        ExperimentKind::Volume | ExperimentKind::Levels => {
            let level = spec.level();
            let t_max = (level + 1) as f64 / spec.k + 1.0;
            let a = par_map(spec.n_a, |r| {
                let env = Envelope::sample(spec.t_min, t_max, &mut split.stream(r, Purpose::Envelope))?;
                let w_path = sample_w_asymptotic(spec.sigma, spec.k, &env, level + 1)?;
                let profile = sample_level_profile(&w_path, level, &mut split.stream(r, Purpose::Tree))?;
                Ok(if spec.kind == ExperimentKind::Volume {
                    profile.iter().sum::<u64>() as f64 / (spec.k * spec.k)
                } else {
                    profile[level] as f64 / spec.k
                })
            })?;
            let top = spec.a * gamma.sqrt();
            let b = par_map(spec.n_b, |r| {
                let env = Envelope::sample(spec.t_min, 2.0 * top + 1.0, &mut split.stream(r, Purpose::Envelope2))?;
                if spec.kind == ExperimentKind::Levels {
                    let mut rng = split.stream(r, Purpose::LevelLimit);
                    return Ok(sample_level_limit(&env, spec.a, gamma, spec.delta(), &mut rng)?.total);
                }
                stopped_occupation(spec, &env, top, (0.0, spec.a), split.stream(r, Purpose::Noise2))
            })?;
            Ok((a, b, Vec::new()))
        }
    }
}

/// Height of depth-first vertex `n` of one side of the sin-tree.
fn side_height(sampler: &SinTreeSampler, seeds: &SinTreeSeeds, n: usize, right: bool) -> Result<u32> {
    let counts = if right {
        sampler.right_prefix(n, seeds)?
    } else {
        sampler.left_prefix(n, seeds)?
    };
    let mut v = Vec::with_capacity(n + 1);
    let mut x = 0i64;
    v.push(0);
    for &c in &counts {
        x += i64::from(c) - 1;
        v.push(x);
    }
    Ok(heights_from_steps(&v)[n])
}

fn solve_marginal(spec: &ExperimentSpec, env: &Envelope, split: &StreamSplitter, r: u64) -> Result<LimitPath> {
    let cfg = SdeConfig {
        dt: spec.dt,
        horizon: spec.t,
        epsilon: spec.epsilon,
        ..SdeConfig::default()
    };
    solve_sde(env, &cfg, &mut split.stream(r, Purpose::Noise))
}

/// `functional(Y_t, Y̲_t)` for `Y` a standard Brownian motion.
fn brownian_marginal(spec: &ExperimentSpec, split: &StreamSplitter, r: u64, functional: Functional) -> Result<f64> {
    let path = solve_marginal(spec, &Envelope::zero(f64::INFINITY)?, split, r)?;
    let (y, m) = path.last();
    Ok(functional.apply(y, m, spec.gamma()))
}

/// Step budget of the stopped solves. The stopping time has a tail of order
/// `A²/t`, so rare replicas run for a long time.
const STOPPED_MAX_STEPS: usize = 100_000_000_000;

/// Time `H = γ^{-1/2}(2Y - 3Y̲)` spends in `[lo, hi]` for `Y` solving `E(L)`
/// until `-Y̲` reaches `level`, accumulated along the way.
fn stopped_occupation(
    spec: &ExperimentSpec,
    env: &Envelope,
    level: f64,
    (lo, hi): (f64, f64),
    mut rng: crate::rng::SimRng,
) -> Result<f64> {
    let cfg = SdeConfig {
        dt: spec.dt,
        epsilon: spec.epsilon,
        variant: Variant::Full,
        stop_level: Some(level),
        max_steps: STOPPED_MAX_STEPS,
        ..SdeConfig::default()
    };
    let gamma = spec.gamma();
    let mut prev: Option<f64> = None;
    let mut occupation = 0.0;
    visit_sde(env, &cfg, &mut rng, |y, m| {
        let h = Functional::HeightR.apply(y, m, gamma);
        if let Some(p) = prev {
            occupation += segment_occupation(p, h, lo, hi, spec.dt);
        }
        prev = Some(h);
    })?;
    Ok(occupation)
}

fn mean_check(name: &str, diffs: &[f64]) -> Check {
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let bound = 3.0 * (var / n).sqrt();
    Check {
        name: name.into(),
        value: mean.abs(),
        bound,
        pass: mean.abs() <= bound,
    }
}

fn levels_cross(spec: &ExperimentSpec, split: &StreamSplitter, gamma: f64) -> Result<Sides> {
    let sg = gamma.sqrt();
    let stop = sg * (spec.a + spec.eta);
    let n = spec.n_a.max(spec.n_b);
    let rows = par_map(n, |r| {
        let env = Envelope::sample(spec.t_min, 2.0 * stop + 1.0, &mut split.stream(r, Purpose::Envelope))?;
        let window = (spec.a, spec.a + spec.eta);
        // (γ/4) l^a with l^a = (4/γ) occupation / η
        let occ = stopped_occupation(spec, &env, stop, window, split.stream(r, Purpose::Noise))? / spec.eta;
        let mut rng = split.stream(r, Purpose::LevelLimit);
        let draw = sample_level_limit(&env, spec.a, gamma, spec.delta(), &mut rng)?.total;
        let mean = level_limit_mean(&env, spec.a, gamma, spec.delta())?;
        let window_mean = window_mean(spec, &env, gamma)?;
        Ok((occ, draw, mean, window_mean))
    })?;
    let a: Vec<f64> = rows[..spec.n_a].iter().map(|r| r.0).collect();
    let b: Vec<f64> = rows[..spec.n_b].iter().map(|r| r.1).collect();
    let da: Vec<f64> = rows[..spec.n_a].iter().map(|r| r.0 - r.3).collect();
    let db: Vec<f64> = rows[..spec.n_b].iter().map(|r| r.1 - r.2).collect();
    let checks = vec![
        mean_check("occupation_mean_minus_window_closed_form", &da),
        mean_check("level_limit_mean_minus_closed_form", &db),
    ];
    Ok((a, b, checks))
}

/// `(1/η) ∫_a^{a+η} E[(γ/4) l^x | L] dx`, the conditional mean of the
/// occupation estimator, by composite Simpson.
fn window_mean(spec: &ExperimentSpec, env: &Envelope, gamma: f64) -> Result<f64> {
    const INTERVALS: usize = 16;
    let h = spec.eta / INTERVALS as f64;
    let mut sum = 0.0;
    for i in 0..=INTERVALS {
        let x = spec.a + i as f64 * h;
        let w = match i {
            0 | INTERVALS => 1.0,
            i if i % 2 == 1 => 4.0,
            _ => 2.0,
        };
        sum += w * level_limit_mean(env, x, gamma, spec.relative_delta * x * gamma.sqrt())?;
    }
    Ok(sum * h / 3.0 / spec.eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentSpec {
        ExperimentSpec {
            k: 20.0,
            n_a: 300,
            n_b: 300,
            dt: 1e-3,
            max_height: 2000,
            ..ExperimentSpec::new(kind, 5)
        }
    }

    #[test]
    fn names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let mut s = ExperimentSpec::new(ExperimentKind::IicHeight, 1);
        s.eta = -1.0;
        assert!(s.validate().unwrap_err().to_string().contains("eta"));
        let mut s = ExperimentSpec::new(ExperimentKind::IicHeight, 1);
        s.sigma = 1;
        assert!(s.validate().is_err());
        let mut s = ExperimentSpec::new(ExperimentKind::Volume, 1);
        s.n_b = 0;
        assert!(run_experiment(&s, Some(1)).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s = ExperimentSpec::new(ExperimentKind::LevelsCross, 9);
        let back: ExperimentSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"kind":"volume","bogus":1}"#).is_err());
        assert!(s.plan().contains("levels-cross"));
    }

    #[test]
    fn report_is_independent_of_worker_count() {
        for kind in ExperimentKind::ALL {
            let s = small(kind);
            let r1 = run_experiment(&s, Some(1)).unwrap();
            let r2 = run_experiment(&s, Some(3)).unwrap();
            assert_eq!(r1.samples, r2.samples, "{kind}");
            assert_eq!(r1.ks_stat, r2.ks_stat);
            assert!((0.0..=1.0).contains(&r1.ks_stat));
        }
    }

    #[test]
    fn report_json_has_required_fields() {
        let r = run_experiment(&small(ExperimentKind::IicBessel), Some(1)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in [
            "experiment",
            "manifest",
            "n_A",
            "n_B",
            "ks_stat",
            "p_value",
            "threshold",
            "pass",
            "wall_time_s",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["checks"][0]["name"], "abs_correlation");
        assert_eq!(v["manifest"]["params"]["kind"], "iic-bessel");
    }

    #[test]
    fn small_scale_experiments_agree() {
        // coarse scales; only gross disagreement is ruled out here
        for kind in [
            ExperimentKind::IicHeight,
            ExperimentKind::Levels,
            ExperimentKind::LevelsCross,
        ] {
            let r = run_experiment(
                &ExperimentSpec {
                    k: 60.0,
                    n_a: 1000,
                    n_b: 1000,
                    ..small(kind)
                },
                None,
            )
            .unwrap();
            assert!(r.ks_stat < 0.15, "{kind}: {}", r.ks_stat);
        }
    }
}

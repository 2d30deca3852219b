//! Solver for `Y_t = √D B_t - f ∫_0^t L(-Y̲_s) ds`, with `f = 1` for `E(L)`
//! and `f = 1/2` for `E(L/2)`.
//!
//! Each grid step first adds the Gaussian increment and updates the running
//! infimum, then applies the drift exactly: the drift only depends on `-Y̲`,
//! so `Y` falls linearly until it meets `Y̲`, after which both move together
//! and solve `u' = f L̂(u)` with `u = -Y̲`, which is integrated exactly across
//! the jumps of the step function `L̂`.
//!
//! `L` blows up at 0, so the drift uses `L̂(u) = L(max(u, u_ε))` where `u_ε`
//! is the first time `L` drops below `1/ε`.

use std::io::{BufRead, Write};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::envelope::Envelope;
use crate::error::{Error, Result};
use crate::rng::{Purpose, SimRng, StreamSplitter};

/// Which equation to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `E(L)`.
    Full,
    /// `E(L/2)`: the envelope is halved.
    Half,
}

impl Variant {
    pub fn drift_factor(self) -> f64 {
        match self {
            Variant::Full => 1.0,
            Variant::Half => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeConfig {
    pub dt: f64,
    /// Time horizon `T`. Ignored when `stop_level` is set.
    pub horizon: f64,
    /// Variance rate `D` of the driving noise.
    pub diffusion: f64,
    pub epsilon: f64,
    pub variant: Variant,
    /// Stop as soon as `-Y̲ ≥ stop_level`.
    pub stop_level: Option<f64>,
    /// Safety limit on the number of steps in stopping mode.
    pub max_steps: usize,
}

impl Default for SdeConfig {
    fn default() -> Self {
        SdeConfig {
            dt: 1e-4,
            horizon: 20.0,
            diffusion: 1.0,
            epsilon: 1e-3,
            variant: Variant::Full,
            stop_level: None,
            max_steps: 100_000_000,
        }
    }
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("dt", self.dt),
            ("horizon", self.horizon),
            ("diffusion", self.diffusion),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(l) = self.stop_level {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::invalid(format!("stop_level must be positive, got {l}")));
            }
        }
        Ok(())
    }

    fn n_steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// A solution on the grid `0, dt, 2dt, ...` with its running infimum.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitPath {
    dt: f64,
    y: Vec<f64>,
    ymin: Vec<f64>,
    variant: Variant,
    diffusion: f64,
}

impl LimitPath {
    pub fn from_parts(dt: f64, y: Vec<f64>, variant: Variant, diffusion: f64) -> Result<LimitPath> {
        if y.first() != Some(&0.0) {
            return Err(Error::invalid("a limit path starts at 0"));
        }
        if !(dt > 0.0) {
            return Err(Error::invalid("dt must be positive"));
        }
        let mut m = 0.0f64;
        let ymin = y
            .iter()
            .map(|&v| {
                m = m.min(v);
                m
            })
            .collect();
        Ok(LimitPath {
            dt,
            y,
            ymin,
            variant,
            diffusion,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn ymin(&self) -> &[f64] {
        &self.ymin
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    pub fn horizon(&self) -> f64 {
        (self.y.len() - 1) as f64 * self.dt
    }

    /// `(Y_t, Y̲_t)` at the grid point nearest to `t`.
    pub fn at(&self, t: f64) -> Result<(f64, f64)> {
        let i = (t / self.dt).round();
        if !(i >= 0.0) || i as usize >= self.y.len() {
            return Err(Error::invalid(format!("t = {t} outside [0, {}]", self.horizon())));
        }
        let i = i as usize;
        Ok((self.y[i], self.ymin[i]))
    }

    /// `(Y, Y̲)` at the end of the path.
    pub fn last(&self) -> (f64, f64) {
        (*self.y.last().expect("nonempty"), *self.ymin.last().expect("nonempty"))
    }

    /// `inf { t : Y_t ≤ -level }`, linearly interpolated between grid points;
    /// `f64::INFINITY` when the level is not reached.
    pub fn first_hitting(&self, level: f64) -> f64 {
        first_hitting(&self.y, self.dt, level)
    }

    /// CSV with columns `t,Y,Ymin`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,Y,Ymin")?;
        for i in 0..self.y.len() {
            writeln!(out, "{},{},{}", i as f64 * self.dt, self.y[i], self.ymin[i])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a CSV written by [`LimitPath::write_csv`]. Variant and diffusion
    /// are not part of the format and must be supplied.
    pub fn read_csv<R: BufRead>(input: R, variant: Variant, diffusion: f64) -> Result<LimitPath> {
        let mut lines = input.lines();
        match lines.next().transpose()? {
            Some(h) if h.trim_end() == "t,Y,Ymin" => {}
            _ => return Err(Error::parse(1, 1, "expected header `t,Y,Ymin`")),
        }
        let mut ts = Vec::new();
        let mut y = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(Error::parse(i + 2, 1, "expected three columns"));
            }
            let t: f64 = f[0].parse().map_err(|_| Error::parse(i + 2, 1, "invalid time"))?;
            let v: f64 = f[1]
                .parse()
                .map_err(|_| Error::parse(i + 2, f[0].len() + 2, "invalid Y"))?;
            ts.push(t);
            y.push(v);
        }
        let dt = if ts.len() > 1 { ts[1] - ts[0] } else { 1.0 };
        LimitPath::from_parts(dt, y, variant, diffusion).map_err(|e| Error::parse(2, 1, e.to_string()))
    }
}

/// First time a sampled path reaches `-level`, interpolating linearly.
pub fn first_hitting(y: &[f64], dt: f64, level: f64) -> f64 {
    let target = -level;
    match y.iter().position(|&v| v <= target) {
        None => f64::INFINITY,
        Some(0) => 0.0,
        Some(i) => {
            let (a, b) = (y[i - 1], y[i]);
            (i as f64 - 1.0 + (a - target) / (a - b)) * dt
        }
    }
}

/// The clamped drift `f L̂(u)` with a cursor, valid for non-decreasing `u`.
struct Drift<'a> {
    env: &'a Envelope,
    u_eps: f64,
    factor: f64,
    idx: usize,
}

impl<'a> Drift<'a> {
    fn new(env: &'a Envelope, epsilon: f64, factor: f64) -> Result<Self> {
        let u_eps = if env.t_min() == 0.0 {
            0.0
        } else {
            env.first_time_below(1.0 / epsilon).ok_or(Error::EnvelopeExhausted {
                needed: f64::INFINITY,
                t_max: env.t_max(),
            })?
        };
        Ok(Drift {
            env,
            u_eps,
            factor,
            idx: 0,
        })
    }

    /// `(f L̂(u), next u at which L̂ may change)`.
    fn at(&mut self, u: f64) -> Result<(f64, f64)> {
        let x = u.max(self.u_eps);
        if x > self.env.t_max() {
            return Err(Error::EnvelopeExhausted {
                needed: x,
                t_max: self.env.t_max(),
            });
        }
        let jumps = self.env.jumps();
        while self.idx < jumps.len() && jumps[self.idx].0 <= x {
            self.idx += 1;
        }
        let c = if self.idx == 0 {
            self.env.initial_value()
        } else {
            jumps[self.idx - 1].1
        };
        let next = jumps.get(self.idx).map_or(f64::INFINITY, |j| j.0);
        Ok((self.factor * c, next))
    }

    /// Applies the drift for time `tau` to `(y, u = -ymin)`.
    fn advance(&mut self, y: &mut f64, u: &mut f64, mut tau: f64) -> Result<()> {
        let (rate, _) = self.at(*u)?;
        let gap = *y + *u;
        if rate == 0.0 {
            return Ok(());
        }
        if gap >= rate * tau {
            *y -= rate * tau;
            return Ok(());
        }
        tau -= gap / rate;
        loop {
            let (rate, next) = self.at(*u)?;
            if rate == 0.0 {
                break;
            }
            let to_next = (next - *u) / rate;
            if tau <= to_next {
                *u += rate * tau;
                break;
            }
            *u = next;
            tau -= to_next;
        }
        *y = -*u;
        Ok(())
    }
}

/// Solves the equation driven by `env` with fresh Gaussian noise from `rng`.
pub fn solve_sde(env: &Envelope, cfg: &SdeConfig, rng: &mut SimRng) -> Result<LimitPath> {
    solve_sde_with_noise(env, cfg, || StandardNormal.sample(&mut *rng))
}

/// Solves the equation with the standard normal increments supplied by
/// `noise`, one per grid step.
pub fn solve_sde_with_noise(env: &Envelope, cfg: &SdeConfig, noise: impl FnMut() -> f64) -> Result<LimitPath> {
    let cap = match cfg.stop_level {
        Some(_) => 1 << 16,
        None => cfg.n_steps().min(1 << 24) + 1,
    };
    let mut ys = Vec::with_capacity(cap);
    let mut mins = Vec::with_capacity(cap);
    drive_sde(env, cfg, noise, |y, m| {
        ys.push(y);
        mins.push(m);
    })?;
    Ok(LimitPath {
        dt: cfg.dt,
        y: ys,
        ymin: mins,
        variant: cfg.variant,
        diffusion: cfg.diffusion,
    })
}

/// Runs the solver without storing the path: `visit(Y, Y̲)` is called at
/// every grid point, starting with `(0, 0)`. Returns the number of steps.
pub fn visit_sde(env: &Envelope, cfg: &SdeConfig, rng: &mut SimRng, visit: impl FnMut(f64, f64)) -> Result<usize> {
    drive_sde(env, cfg, || StandardNormal.sample(&mut *rng), visit)
}

/// How the two sides of the two-sided limit share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// One envelope drives both sides; the noises are independent.
    SharedEnvelope,
    /// Each side has its own envelope and noise.
    Independent,
}

/// Both sides of the two-sided limit, each a solution of `E(L/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSided {
    pub coupling: Coupling,
    pub left_envelope: Envelope,
    /// `None` when the envelope is shared.
    pub right_envelope: Option<Envelope>,
    pub left: LimitPath,
    pub right: LimitPath,
}

/// Solves `E(L/2)` for the left and right sides with the given envelopes and
/// noises. `cfg.variant` is ignored.
pub fn solve_two_sided(
    left_env: &Envelope,
    right_env: &Envelope,
    cfg: &SdeConfig,
    left_rng: &mut SimRng,
    right_rng: &mut SimRng,
) -> Result<(LimitPath, LimitPath)> {
    let cfg = SdeConfig {
        variant: Variant::Half,
        ..*cfg
    };
    Ok((
        solve_sde(left_env, &cfg, left_rng)?,
        solve_sde(right_env, &cfg, right_rng)?,
    ))
}

/// Replica `replica` of the two-sided limit. Envelopes live on
/// `[t_min, t_max]` and come from the `Envelope` (left) and `Envelope2`
/// (right) streams; the noises from `Noise` and `Noise2`.
pub fn sample_two_sided(
    split: &StreamSplitter,
    replica: u64,
    coupling: Coupling,
    t_min: f64,
    t_max: f64,
    cfg: &SdeConfig,
) -> Result<TwoSided> {
    let left_envelope = Envelope::sample(t_min, t_max, &mut split.stream(replica, Purpose::Envelope))?;
    let right_envelope = match coupling {
        Coupling::SharedEnvelope => None,
        Coupling::Independent => Some(Envelope::sample(
            t_min,
            t_max,
            &mut split.stream(replica, Purpose::Envelope2),
        )?),
    };
    let (left, right) = solve_two_sided(
        &left_envelope,
        right_envelope.as_ref().unwrap_or(&left_envelope),
        cfg,
        &mut split.stream(replica, Purpose::Noise),
        &mut split.stream(replica, Purpose::Noise2),
    )?;
    Ok(TwoSided {
        coupling,
        left_envelope,
        right_envelope,
        left,
        right,
    })
}

fn drive_sde(
    env: &Envelope,
    cfg: &SdeConfig,
    mut noise: impl FnMut() -> f64,
    mut visit: impl FnMut(f64, f64),
) -> Result<usize> {
    cfg.validate()?;
    if let Some(level) = cfg.stop_level {
        if level > env.t_max() {
            return Err(Error::EnvelopeExhausted {
                needed: level,
                t_max: env.t_max(),
            });
        }
    }
    let mut drift = Drift::new(env, cfg.epsilon, cfg.variant.drift_factor())?;
    let scale = (cfg.diffusion * cfg.dt).sqrt();
    let limit = match cfg.stop_level {
        Some(_) => cfg.max_steps,
        None => cfg.n_steps(),
    };
    let (mut y, mut u) = (0.0f64, 0.0f64);
    visit(y, -u);
    let mut steps = 0;
    loop {
        if let Some(level) = cfg.stop_level {
            if u >= level {
                break;
            }
            if steps >= limit {
                return Err(Error::invalid(format!(
                    "level {level} not reached within {limit} steps"
                )));
            }
        } else if steps >= limit {
            break;
        }
        y += scale * noise();
        u = u.max(-y);
        drift.advance(&mut y, &mut u, cfg.dt)?;
        visit(y, -u);
        steps += 1;
    }
    Ok(steps)
}

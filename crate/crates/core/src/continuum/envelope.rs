//! Lower envelope of a unit-rate Poisson process on the quarter plane,
//! `L(t) = inf { y : (x, y) ∈ P, x ≤ t }`.
//!
//! The path is sampled by its Markov jump chain: `L(t_min) ~ Exp(t_min)`;
//! from value `ℓ` the next jump comes after an `Exp(ℓ)` holding time and lands
//! uniformly on `(0, ℓ)`.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Default lower end of the materialized window.
pub const DEFAULT_T_MIN: f64 = 1e-6;

/// A non-increasing, right-continuous step path on `[t_min, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    t_min: f64,
    t_max: f64,
    initial: f64,
    /// `(t_j, value from t_j on)`, strictly increasing times.
    jumps: Vec<(f64, f64)>,
}

impl Envelope {
    /// Samples the envelope on `[t_min, t_max]`.
    pub fn sample(t_min: f64, t_max: f64, rng: &mut SimRng) -> Result<Envelope> {
        if !(t_min > 0.0 && t_min.is_finite()) {
            return Err(Error::invalid(format!("t_min must be positive, got {t_min}")));
        }
        if !(t_max > t_min) {
            return Err(Error::invalid(format!("t_max = {t_max} must exceed t_min = {t_min}")));
        }
        let initial = Exp::new(t_min).expect("positive rate").sample(rng);
        let mut env = Envelope {
            t_min,
            t_max: t_min,
            initial,
            jumps: Vec::new(),
        };
        env.extend(t_max, rng)?;
        Ok(env)
    }

    /// Continues the jump chain up to `t_max`. By the memoryless property the
    /// result has the law of a fresh sample on the longer window.
    pub fn extend(&mut self, t_max: f64, rng: &mut SimRng) -> Result<()> {
        if t_max <= self.t_max {
            return Ok(());
        }
        let mut t = self.t_max;
        let mut level = self.last_value();
        if level <= 0.0 {
            self.t_max = t_max;
            return Ok(());
        }
        loop {
            t += Exp::new(level).expect("positive rate").sample(rng);
            if t > t_max {
                break;
            }
            let u: f64 = rng.random();
            level *= 1.0 - u;
            self.jumps.push((t, level));
        }
        self.t_max = t_max;
        Ok(())
    }

    /// `L ≡ c` on `[0, t_max]`.
    pub fn constant(c: f64, t_max: f64) -> Result<Envelope> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!(
                "constant envelope value must be finite and >= 0, got {c}"
            )));
        }
        if !(t_max > 0.0) {
            return Err(Error::invalid("t_max must be positive"));
        }
        Ok(Envelope {
            t_min: 0.0,
            t_max,
            initial: c,
            jumps: Vec::new(),
        })
    }

    /// `L ≡ 0`, the critical case.
    pub fn zero(t_max: f64) -> Result<Envelope> {
        Envelope::constant(0.0, t_max)
    }

    /// Builds an envelope from explicit data, validating monotonicity.
    pub fn from_parts(t_min: f64, t_max: f64, initial: f64, jumps: Vec<(f64, f64)>) -> Result<Envelope> {
        if !(t_min >= 0.0 && t_max >= t_min) {
            return Err(Error::invalid(format!("bad window [{t_min}, {t_max}]")));
        }
        if !(initial >= 0.0 && initial.is_finite()) {
            return Err(Error::invalid(format!(
                "initial value must be finite and >= 0, got {initial}"
            )));
        }
        let (mut t_prev, mut v_prev) = (t_min, initial);
        for (i, &(t, v)) in jumps.iter().enumerate() {
            if !(t > t_prev && t <= t_max) {
                return Err(Error::invalid(format!(
                    "jump {i} at t = {t} is out of order or outside the window"
                )));
            }
            if !(v < v_prev && v >= 0.0) {
                return Err(Error::invalid(format!(
                    "jump {i} to {v} does not decrease from {v_prev}"
                )));
            }
            t_prev = t;
            v_prev = v;
        }
        Ok(Envelope {
            t_min,
            t_max,
            initial,
            jumps,
        })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn initial_value(&self) -> f64 {
        self.initial
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn last_value(&self) -> f64 {
        self.jumps.last().map_or(self.initial, |j| j.1)
    }

    /// `L(t)`, right-continuous.
    pub fn value(&self, t: f64) -> Result<f64> {
        if t < self.t_min {
            return Err(Error::Unmaterialized { t, t_min: self.t_min });
        }
        if t > self.t_max {
            return Err(Error::EnvelopeExhausted {
                needed: t,
                t_max: self.t_max,
            });
        }
        Ok(self.value_unchecked(t))
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        let i = self.jumps.partition_point(|j| j.0 <= t);
        if i == 0 {
            self.initial
        } else {
            self.jumps[i - 1].1
        }
    }

    /// First time `t ≥ t_min` with `L(t) < level`, if inside the window.
    pub fn first_time_below(&self, level: f64) -> Option<f64> {
        if self.initial < level {
            return Some(self.t_min);
        }
        self.jumps.iter().find(|j| j.1 < level).map(|j| j.0)
    }

    /// Constant pieces `(start, end, value)` covering `[from, to]`.
    pub fn segments(&self, from: f64, to: f64) -> Result<Vec<(f64, f64, f64)>> {
        self.value(from)?;
        self.value(to)?;
        let mut out = Vec::new();
        let mut start = from;
        let mut v = self.value_unchecked(from);
        for &(t, next) in &self.jumps {
            if t <= from {
                continue;
            }
            if t >= to {
                break;
            }
            out.push((start, t, v));
            start = t;
            v = next;
        }
        if to > start {
            out.push((start, to, v));
        }
        Ok(out)
    }

    /// The envelope `t -> c L(c t)` on `[t_min / c, t_max / c]`, which has the
    /// same law as `L` when `L` is the Poisson envelope.
    pub fn scaled(&self, c: f64) -> Result<Envelope> {
        if !(c > 0.0) {
            return Err(Error::invalid("scale must be positive"));
        }
        Ok(Envelope {
            t_min: self.t_min / c,
            t_max: self.t_max / c,
            initial: c * self.initial,
            jumps: self.jumps.iter().map(|&(t, v)| (t / c, c * v)).collect(),
        })
    }

    /// Writes the envelope CSV: a `t_min,initial_value,t_max` header row and
    /// its values, then a `t_jump,value` section with one row per jump.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t_min,initial_value,t_max")?;
        writeln!(out, "{},{},{}", self.t_min, self.initial, self.t_max)?;
        writeln!(out, "t_jump,value")?;
        for (t, v) in &self.jumps {
            writeln!(out, "{t},{v}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Envelope> {
        let lines: Vec<String> = input.lines().collect::<std::io::Result<_>>()?;
        let header = |i: usize, want: &str| -> Result<()> {
            match lines.get(i) {
                Some(l) if l.trim_end() == want => Ok(()),
                _ => Err(Error::parse(i + 1, 1, format!("expected header `{want}`"))),
            }
        };
        let num = |line: usize, col: usize, s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::parse(line, col, format!("invalid number `{s}`")))
        };
        header(0, "t_min,initial_value,t_max")?;
        let row = lines.get(1).ok_or_else(|| Error::parse(2, 1, "missing envelope row"))?;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::parse(2, 1, "expected three columns"));
        }
        let t_min = num(2, 1, fields[0])?;
        let initial = num(2, fields[0].len() + 2, fields[1])?;
        let t_max = num(2, fields[0].len() + fields[1].len() + 3, fields[2])?;
        header(2, "t_jump,value")?;
        let mut jumps = Vec::new();
        for (i, l) in lines.iter().enumerate().skip(3) {
            if l.is_empty() {
                continue;
            }
            let (a, b) = l
                .split_once(',')
                .ok_or_else(|| Error::parse(i + 1, 1, "expected two columns"))?;
            jumps.push((num(i + 1, 1, a)?, num(i + 1, a.len() + 2, b)?));
        }
        Envelope::from_parts(t_min, t_max, initial, jumps).map_err(|e| Error::parse(4, 1, e.to_string()))
    }
}

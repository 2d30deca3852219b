//! Limit of `C[ak]/k` given the envelope, as a Poisson sum of exponentials.
//!
//! With `A = a√γ` and `x = A - s`, points `s ∈ [0, A]` arrive with intensity
//! `2 L(s) / (e^{x L(s)} - 1) ds` and each carries an independent exponential
//! with rate `L(s) / (1 - e^{-x L(s)})`; the limit is `(√γ/2)` times their sum.
//!
//! The intensity behaves like `2/x` as `s → A`, so points with `x < δ` are
//! dropped. The expected dropped mass is `√γ ∫_0^δ e^{-x L} dx ≤ √γ δ ≤ 2δ`.

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};

use crate::continuum::Envelope;
use crate::error::{Error, Result};
use crate::rng::SimRng;

/// One draw of the limit.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelLimitDraw {
    /// `A = a√γ`.
    pub top: f64,
    pub sqrt_gamma: f64,
    /// Point locations `s_j`.
    pub points: Vec<f64>,
    /// Exponential rate attached to each point.
    pub rates: Vec<f64>,
    /// Exponential value of each point.
    pub contributions: Vec<f64>,
    /// `(√γ/2) Σ contributions`.
    pub total: f64,
    pub delta: f64,
    /// Bound on the expected mass removed by the truncation, `√γ δ`.
    pub discarded_bound: f64,
}

impl LevelLimitDraw {
    /// The total restricted to points with `A - s ≥ delta`; for `delta` above
    /// the draw's own truncation this is a draw with that truncation.
    pub fn total_above(&self, delta: f64) -> f64 {
        let sum: f64 = self
            .points
            .iter()
            .zip(&self.contributions)
            .filter(|(&s, _)| self.top - s >= delta)
            .map(|(_, &c)| c)
            .sum();
        0.5 * self.sqrt_gamma * sum
    }
}

/// Default truncation, relative to `A`.
pub const DEFAULT_RELATIVE_DELTA: f64 = 1e-4;

fn check(a: f64, gamma: f64, delta: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("a must be positive, got {a}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

/// Constant pieces of `L` on the retained window, as `(x_hi, x_lo, c)` with
/// `x = A - s`.
fn pieces(env: &Envelope, top: f64, delta: f64) -> Result<Vec<(f64, f64, f64)>> {
    if top > env.t_max() {
        return Err(Error::EnvelopeExhausted {
            needed: top,
            t_max: env.t_max(),
        });
    }
    let end = top - delta;
    if end <= env.t_min() {
        return Ok(Vec::new());
    }
    Ok(env
        .segments(env.t_min(), end)?
        .into_iter()
        .map(|(s1, s2, c)| (top - s1, top - s2, c))
        .collect())
}

/// `ln((1 - e^{-c x_hi}) / (1 - e^{-c x_lo}))`, or `ln(x_hi/x_lo)` at `c = 0`.
fn half_mass(c: f64, x_hi: f64, x_lo: f64) -> f64 {
    if c == 0.0 {
        (x_hi / x_lo).ln()
    } else {
        (-(-c * x_hi).exp_m1()).ln() - (-(-c * x_lo).exp_m1()).ln()
    }
}

/// Draws the limit conditionally on `env`.
pub fn sample_level_limit(env: &Envelope, a: f64, gamma: f64, delta: f64, rng: &mut SimRng) -> Result<LevelLimitDraw> {
    check(a, gamma, delta)?;
    let sqrt_gamma = gamma.sqrt();
    let top = a * sqrt_gamma;
    let mut draw = LevelLimitDraw {
        top,
        sqrt_gamma,
        points: Vec::new(),
        rates: Vec::new(),
        contributions: Vec::new(),
        total: 0.0,
        delta,
        discarded_bound: sqrt_gamma * delta,
    };
    for (x_hi, x_lo, c) in pieces(env, top, delta)? {
        let half = half_mass(c, x_hi, x_lo);
        if !(half > 0.0) {
            continue;
        }
        let n = Poisson::new(2.0 * half).expect("positive mean").sample(rng) as usize;
        for _ in 0..n {
            let g = rng.random::<f64>() * half;
            let x = if c == 0.0 {
                x_lo * g.exp()
            } else {
                let q = -(-c * x_lo).exp_m1();
                -(-q * g.exp()).ln_1p() / c
            };
            let x = x.clamp(x_lo, x_hi);
            let rate = if c == 0.0 { 1.0 / x } else { c / -(-c * x).exp_m1() };
            let e = Exp::new(rate).expect("positive rate").sample(rng);
            draw.points.push(top - x);
            draw.rates.push(rate);
            draw.contributions.push(e);
        }
    }
    draw.total = 0.5 * sqrt_gamma * draw.contributions.iter().sum::<f64>();
    Ok(draw)
}

/// `E[total | L] = √γ ∫ e^{-(A-s) L(s)} ds` over the retained window.
pub fn level_limit_mean(env: &Envelope, a: f64, gamma: f64, delta: f64) -> Result<f64> {
    check(a, gamma, delta)?;
    let sqrt_gamma = gamma.sqrt();
    let top = a * sqrt_gamma;
    let integral: f64 = pieces(env, top, delta)?
        .into_iter()
        .map(|(x_hi, x_lo, c)| {
            if c == 0.0 {
                x_hi - x_lo
            } else {
                ((-c * x_lo).exp() - (-c * x_hi).exp()) / c
            }
        })
        .sum();
    Ok(sqrt_gamma * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn mean_and_se(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (var / n).sqrt())
    }

    #[test]
    fn constant_envelope_mean_matches_closed_form() {
        let (a, gamma, c) = (1.0, 0.5, 2.0);
        let env = Envelope::constant(c, 10.0).unwrap();
        let delta = 1e-4;
        let mut rng = SimRng::seed_from_u64(1);
        let totals: Vec<f64> = (0..100_000)
            .map(|_| sample_level_limit(&env, a, gamma, delta, &mut rng).unwrap().total)
            .collect();
        let (m, se) = mean_and_se(&totals);
        let top = a * gamma.sqrt();
        let exact = gamma.sqrt() * ((-c * delta).exp() - (-c * top).exp()) / c;
        assert!((level_limit_mean(&env, a, gamma, delta).unwrap() - exact).abs() < 1e-12);
        assert!((m - exact).abs() < 3.0 * se, "{m} vs {exact} ± {se}");
    }

    #[test]
    fn critical_mean_is_gamma_a() {
        let env = Envelope::zero(10.0).unwrap();
        let m = level_limit_mean(&env, 2.0, 0.5, 1e-9).unwrap();
        assert!((m - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sampled_envelope_mean() {
        let mut rng = SimRng::seed_from_u64(2);
        let env = Envelope::sample(1e-6, 10.0, &mut rng).unwrap();
        let (a, gamma): (f64, f64) = (1.0, 2.0 / 3.0);
        let delta = 1e-4 * a * gamma.sqrt();
        let totals: Vec<f64> = (0..100_000)
            .map(|_| sample_level_limit(&env, a, gamma, delta, &mut rng).unwrap().total)
            .collect();
        let (m, se) = mean_and_se(&totals);
        let exact = level_limit_mean(&env, a, gamma, delta).unwrap();
        assert!((m - exact).abs() < 3.0 * se, "{m} vs {exact} ± {se}");
    }

    #[test]
    fn points_and_rates_are_consistent() {
        let mut rng = SimRng::seed_from_u64(3);
        let env = Envelope::sample(1e-6, 10.0, &mut rng).unwrap();
        let d = sample_level_limit(&env, 1.5, 0.5, 1e-3, &mut rng).unwrap();
        assert!(d.rates.iter().all(|&r| r > 0.0));
        assert!(d.points.iter().all(|&s| s >= 0.0 && d.top - s >= 1e-3 - 1e-12));
        let sum: f64 = d.contributions.iter().sum();
        assert!((d.total - d.sqrt_gamma / 2.0 * sum).abs() < 1e-12);
        assert!((d.total_above(1e-3) - d.total).abs() < 1e-12);
        assert!(d.discarded_bound <= 2.0 * d.delta);
    }

    #[test]
    fn small_a_gives_small_total() {
        let mut rng = SimRng::seed_from_u64(4);
        let env = Envelope::sample(1e-6, 10.0, &mut rng).unwrap();
        let big = (0..2000)
            .filter(|_| sample_level_limit(&env, 1e-4, 0.5, 1e-8, &mut rng).unwrap().total > 1e-3)
            .count();
        assert!(big < 20);
        assert!(sample_level_limit(&env, 1.0, 0.5, 0.0, &mut rng).is_err());
        assert!(sample_level_limit(&env, 100.0, 0.5, 1e-3, &mut rng).is_err());
    }
}

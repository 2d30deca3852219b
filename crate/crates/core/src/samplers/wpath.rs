use serde::{Deserialize, Serialize};

use super::params::{dual_parameter, invert_dual};
use crate::continuum::Envelope;
use crate::error::{Error, Result};

/// Smallest dual parameter used near the root, where `L/k` can exceed 1.
pub const W_HAT_FLOOR: f64 = 1e-12;

/// The invasion parameter along the backbone, piecewise constant on
/// segments `[x_i, x_{i+1})` of backbone heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WPath {
    sigma: u32,
    starts: Vec<usize>,
    w: Vec<f64>,
    w_hat: Vec<f64>,
    max_height: usize,
}

impl WPath {
    /// From the dual values `Ŵ` (non-decreasing, in `(0, p_c]`). Equal
    /// neighbouring values are merged into one segment.
    pub fn from_w_hat(sigma: u32, starts: Vec<usize>, w_hat: Vec<f64>, max_height: usize) -> Result<WPath> {
        check_starts(&starts, w_hat.len(), max_height)?;
        let p_c = 1.0 / sigma as f64;
        for (i, pair) in w_hat.windows(2).enumerate() {
            if pair[1] < pair[0] {
                return Err(Error::invalid(format!("Ŵ decreases at segment {}", i + 1)));
            }
        }
        if let Some(&bad) = w_hat.iter().find(|&&v| !(v > 0.0 && v <= p_c)) {
            return Err(Error::invalid(format!("Ŵ = {bad} outside (0, {p_c}]")));
        }
        let w = w_hat
            .iter()
            .map(|&v| invert_dual(sigma, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(WPath::merged(sigma, starts, w, w_hat, max_height))
    }

    /// From the supercritical values `W` (non-increasing, in `[p_c, 1]`).
    pub fn from_w(sigma: u32, starts: Vec<usize>, w: Vec<f64>, max_height: usize) -> Result<WPath> {
        check_starts(&starts, w.len(), max_height)?;
        let p_c = 1.0 / sigma as f64;
        for (i, pair) in w.windows(2).enumerate() {
            if pair[1] > pair[0] {
                return Err(Error::invalid(format!("W increases at segment {}", i + 1)));
            }
        }
        if let Some(&bad) = w.iter().find(|&&v| !(v >= p_c && v <= 1.0)) {
            return Err(Error::invalid(format!("W = {bad} outside [{p_c}, 1]")));
        }
        let w_hat = w.iter().map(|&v| dual_parameter(sigma, v).max(W_HAT_FLOOR)).collect();
        Ok(WPath::merged(sigma, starts, w, w_hat, max_height))
    }

    /// `W ≡ p_c`, which yields the incipient infinite cluster.
    pub fn critical(sigma: u32, max_height: usize) -> WPath {
        let p_c = 1.0 / sigma as f64;
        WPath {
            sigma,
            starts: vec![0],
            w: vec![p_c],
            w_hat: vec![p_c],
            max_height,
        }
    }

    fn merged(sigma: u32, starts: Vec<usize>, w: Vec<f64>, w_hat: Vec<f64>, max_height: usize) -> WPath {
        let mut out = WPath {
            sigma,
            starts: Vec::new(),
            w: Vec::new(),
            w_hat: Vec::new(),
            max_height,
        };
        for i in 0..starts.len() {
            if out.w_hat.last() == Some(&w_hat[i]) {
                continue;
            }
            out.starts.push(starts[i]);
            out.w.push(w[i]);
            out.w_hat.push(w_hat[i]);
        }
        out
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    /// Highest backbone level covered.
    pub fn max_height(&self) -> usize {
        self.max_height
    }

    pub fn n_segments(&self) -> usize {
        self.starts.len()
    }

    /// Segments as `(x_i, x_{i+1}, W, Ŵ)`; the last one ends at `max_height + 1`.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.starts.len()).map(move |i| {
            let end = self.starts.get(i + 1).copied().unwrap_or(self.max_height + 1);
            (self.starts[i], end, self.w[i], self.w_hat[i])
        })
    }

    pub fn segment_index(&self, n: usize) -> Result<usize> {
        if n > self.max_height {
            return Err(Error::InsufficientMaterialization {
                requested: n,
                available: self.max_height,
            });
        }
        Ok(self.starts.partition_point(|&s| s <= n) - 1)
    }

    /// `Ŵ_n`.
    pub fn w_hat_at(&self, n: usize) -> Result<f64> {
        Ok(self.w_hat[self.segment_index(n)?])
    }

    /// `W_n`.
    pub fn w_at(&self, n: usize) -> Result<f64> {
        Ok(self.w[self.segment_index(n)?])
    }
}

fn check_starts(starts: &[usize], n_values: usize, max_height: usize) -> Result<()> {
    if starts.is_empty() || starts.len() != n_values {
        return Err(Error::invalid("need one value per segment and at least one segment"));
    }
    if starts[0] != 0 {
        return Err(Error::invalid("the first segment must start at height 0"));
    }
    if starts.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::invalid("segment heights must be strictly increasing"));
    }
    if *starts.last().expect("nonempty") > max_height {
        return Err(Error::invalid("a segment starts above max_height"));
    }
    Ok(())
}

/// The invasion parameter read off an envelope at scale `k`:
/// `Ŵ_n = (1 - L(n/k)/k)/σ`, clamped to `[W_HAT_FLOOR, p_c]`. Height 0 uses
/// `L(0) = ∞` unless the envelope is defined at 0.
pub fn sample_w_asymptotic(sigma: u32, k: f64, envelope: &Envelope, max_height: usize) -> Result<WPath> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!("scale k must be positive, got {k}")));
    }
    let top = max_height as f64 / k;
    if top > envelope.t_max() {
        return Err(Error::EnvelopeExhausted {
            needed: top,
            t_max: envelope.t_max(),
        });
    }
    let p_c = 1.0 / sigma as f64;
    let w_hat_of = |n: usize| -> Result<f64> {
        let l = if n == 0 && envelope.t_min() > 0.0 {
            f64::INFINITY
        } else {
            envelope.value(n as f64 / k)?
        };
        Ok(((1.0 - l / k) / sigma as f64).clamp(W_HAT_FLOOR, p_c))
    };
    let mut heights = vec![0usize];
    if max_height >= 1 {
        heights.push(1);
    }
    for &(t, _) in envelope.jumps() {
        let n = (k * t).ceil() as usize;
        // n/k can round below t, so the following height is also a candidate
        for m in [n, n + 1] {
            if m >= 1 && m <= max_height {
                heights.push(m);
            }
        }
    }
    heights.sort_unstable();
    heights.dedup();
    let values = heights.iter().map(|&n| w_hat_of(n)).collect::<Result<Vec<_>>>()?;
    let mut starts = Vec::new();
    let mut w_hat: Vec<f64> = Vec::new();
    for (n, v) in heights.into_iter().zip(values) {
        if w_hat.last() != Some(&v) {
            starts.push(n);
            w_hat.push(v);
        }
    }
    WPath::from_w_hat(sigma, starts, w_hat, max_height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use rand::SeedableRng;

    #[test]
    fn zero_envelope_gives_critical_path() {
        let w = sample_w_asymptotic(2, 50.0, &Envelope::zero(100.0).unwrap(), 1000).unwrap();
        assert_eq!(w.n_segments(), 1);
        assert_eq!(w.w_hat_at(0).unwrap(), 0.5);
        assert_eq!(w.w_at(1000).unwrap(), 0.5);
        assert!(w.w_hat_at(1001).is_err());
    }

    #[test]
    fn constant_envelope() {
        let (k, c) = (40.0, 3.0);
        let w = sample_w_asymptotic(3, k, &Envelope::constant(c, 10.0).unwrap(), 300).unwrap();
        for n in [0, 1, 17, 300] {
            assert!((w.w_hat_at(n).unwrap() - (1.0 - c / k) / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inversion_identity_on_grid() {
        let mut rng = SimRng::seed_from_u64(4);
        let k = 100.0;
        for _ in 0..50 {
            let env = Envelope::sample(1e-4, 30.0, &mut rng).unwrap();
            let w = sample_w_asymptotic(2, k, &env, 3000).unwrap();
            for n in 1..=3000 {
                let l = env.value(n as f64 / k).unwrap();
                let w_hat = w.w_hat_at(n).unwrap();
                if w_hat > W_HAT_FLOOR {
                    let back = k * (1.0 - 2.0 * w_hat);
                    assert!((back - l).abs() <= 1e-9 * l.max(1.0), "n={n}: {back} vs {l}");
                } else {
                    assert!(l >= k * (1.0 - 2.0 * W_HAT_FLOOR));
                }
            }
            // W non-increasing and supercritical, Ŵ ≤ p_c
            let segs: Vec<_> = w.segments().collect();
            assert!(segs.windows(2).all(|p| p[1].2 <= p[0].2 && p[0].0 < p[1].0));
            assert!(segs.iter().all(|s| s.2 >= 0.5 && s.3 <= 0.5));
        }
    }

    #[test]
    fn uncovered_range_is_an_error() {
        let mut rng = SimRng::seed_from_u64(5);
        let env = Envelope::sample(0.1, 5.0, &mut rng).unwrap();
        assert!(matches!(
            sample_w_asymptotic(2, 10.0, &env, 100),
            Err(Error::EnvelopeExhausted { .. })
        ));
        assert!(matches!(
            sample_w_asymptotic(2, 100.0, &env, 100),
            Err(Error::Unmaterialized { .. })
        ));
    }

    #[test]
    fn validation() {
        assert!(WPath::from_w(2, vec![0, 5], vec![0.6, 0.7], 10).is_err());
        assert!(WPath::from_w(2, vec![0, 5], vec![0.7, 0.6], 10).is_ok());
        assert!(WPath::from_w_hat(2, vec![1], vec![0.4], 10).is_err());
        assert!(WPath::from_w_hat(2, vec![0, 3, 3], vec![0.1, 0.2, 0.3], 10).is_err());
        let merged = WPath::from_w_hat(2, vec![0, 3, 6], vec![0.1, 0.1, 0.3], 10).unwrap();
        assert_eq!(merged.n_segments(), 2);
        assert_eq!(merged.segment_index(5).unwrap(), 0);
        assert_eq!(merged.segment_index(6).unwrap(), 1);
    }
}

use crate::codec::LatticePath;
use crate::error::{Error, Result};

/// Quadratic-variation rate of the height limit `γ^{-1/2}(2Y - 3Y̲)` when `Y`
/// has unit diffusion: the martingale part is `2 γ^{-1/2} B`, so the rate is
/// `4/γ`. With this normalization `(γ/4) l^a` is the plain occupation density.
pub fn height_qv_rate(gamma: f64) -> f64 {
    4.0 / gamma
}

/// Time the piecewise-linear path spends in `[lo, hi]`, computed exactly
/// segment by segment.
pub fn occupation_time(h: &LatticePath, lo: f64, hi: f64) -> f64 {
    let dt = h.dt();
    h.values()
        .windows(2)
        .map(|w| segment_occupation(w[0], w[1], lo, hi, dt))
        .sum()
}

/// Time the linear interpolation from `h0` to `h1` over `dt` spends in
/// `[lo, hi]`.
pub fn segment_occupation(h0: f64, h1: f64, lo: f64, hi: f64, dt: f64) -> f64 {
    let (a, b) = (h0.min(h1), h0.max(h1));
    if a == b {
        if (lo..=hi).contains(&a) {
            dt
        } else {
            0.0
        }
    } else {
        let overlap = (b.min(hi) - a.max(lo)).max(0.0);
        dt * overlap / (b - a)
    }
}

/// `qv_rate · (1/η) · ∫ 1_{[a, a+η]}(H_s) ds`, the occupation estimate of the
/// local time at level `a`.
pub fn occupation_local_time(h: &LatticePath, a: f64, eta: f64, qv_rate: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::invalid(format!("eta must be positive, got {eta}")));
    }
    Ok(qv_rate * occupation_time(h, a, a + eta) / eta)
}

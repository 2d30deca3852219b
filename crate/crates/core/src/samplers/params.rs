use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arity of the underlying tree and the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    sigma: u32,
}

impl ModelParams {
    pub fn new(sigma: u32) -> Result<Self> {
        if sigma < 2 {
            return Err(Error::invalid(format!("sigma must be at least 2, got {sigma}")));
        }
        Ok(ModelParams { sigma })
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    /// `γ = (σ - 1)/σ`, the offspring variance of critical Bin(σ, 1/σ).
    pub fn gamma(&self) -> f64 {
        gamma(self.sigma)
    }

    /// `p_c = 1/σ`.
    pub fn p_c(&self) -> f64 {
        1.0 / self.sigma as f64
    }
}

pub fn gamma(sigma: u32) -> f64 {
    (sigma as f64 - 1.0) / sigma as f64
}

/// Extinction probability of Bin(σ, p) branching: the smallest root of
/// `q = (1 - p + p q)^σ` in `[0, 1]`, to absolute tolerance 1e-12.
pub fn zeta(sigma: u32, p: f64) -> f64 {
    let s = sigma as f64;
    if p * s <= 1.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let f = |q: f64| (1.0 - p + p * q).powi(sigma as i32) - q;
    // f is convex with f(0) > 0; its minimizer separates the two roots
    let m = (((1.0 / (s * p)).powf(1.0 / (s - 1.0)) - (1.0 - p)) / p).clamp(0.0, 1.0);
    let (mut lo, mut hi) = (0.0f64, m);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `p ζ(p)`, the dual subcritical parameter of a supercritical `p`.
pub fn dual_parameter(sigma: u32, p: f64) -> f64 {
    p * zeta(sigma, p)
}

/// Inverse of [`dual_parameter`] on `[p_c, 1]`: the `W ≥ p_c` with
/// `W ζ(W) = ŵ`, for `ŵ ∈ [0, p_c]`.
pub fn invert_dual(sigma: u32, w_hat: f64) -> Result<f64> {
    let p_c = 1.0 / sigma as f64;
    if !(0.0..=p_c).contains(&w_hat) {
        return Err(Error::invalid(format!("dual parameter {w_hat} outside [0, {p_c}]")));
    }
    if w_hat >= p_c {
        return Ok(p_c);
    }
    let (mut lo, mut hi) = (p_c, 1.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if dual_parameter(sigma, mid) > w_hat {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

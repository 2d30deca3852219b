//! Tail rates of excursion measures of Brownian motion with drift `-c`.

use crate::error::{Error, Result};

fn check(c: f64, a: f64) -> Result<()> {
    if !(c > 0.0 && a > 0.0 && c.is_finite() && a.is_finite()) {
        return Err(Error::invalid(format!(
            "c and a must be positive, got c = {c}, a = {a}"
        )));
    }
    Ok(())
}

/// `n^{(-c)}(sup e > a) = 2c / (e^{2ca} - 1)` for the reflected process.
pub fn excursion_sup_rate(c: f64, a: f64) -> Result<f64> {
    check(c, a)?;
    Ok(2.0 * c / (2.0 * c * a).exp_m1())
}

/// `N^{(-c)}(inf e < -a) = c / (1 - e^{-2ca})` for the free process.
pub fn excursion_inf_rate(c: f64, a: f64) -> Result<f64> {
    check(c, a)?;
    Ok(c / -(-2.0 * c * a).exp_m1())
}

use crate::codec::{LatticePath, StoppedPath};
use crate::error::{Error, Result};

/// Infimum of a piecewise-linear path over `[a, b]`.
fn inf_over(path: &LatticePath, a: f64, b: f64) -> f64 {
    let dt = path.dt();
    let lo = (a / dt).ceil().max(0.0) as usize;
    let hi = ((b / dt).floor() as usize).min(path.len() - 1);
    let mut m = path.eval(a).min(path.eval(b));
    if lo <= hi {
        m = path.values()[lo..=hi].iter().copied().fold(m, f64::min);
    }
    m
}

/// Distance between the points `s` and `t` of the sin-tree coded by the left
/// and right contour paths `c_g` and `c_d`.
///
/// With `C(u) = c_g(-u)` for `u ≤ 0` and `C(u) = c_d(u)` for `u ≥ 0`,
/// `d(s, t) = C(s) + C(t) - 2 inf_{I(s, t)} C`, where `I(s, t)` is `[s, t]` when
/// `s` and `t` are on the same side and the complement `ℝ \ [s, t]` otherwise.
/// Both paths are treated as stopped at their lifetime, i.e. as the contours
/// of a truncation of the tree, so both should end at the same value (the top
/// backbone point); `s` and `t` must lie within the lifetimes.
pub fn continuum_metric(c_g: &LatticePath, c_d: &LatticePath, s: f64, t: f64) -> Result<f64> {
    if c_g.values()[0] != 0.0 || c_d.values()[0] != 0.0 {
        return Err(Error::invalid("contour paths must start at 0"));
    }
    for x in [s, t] {
        if x < -c_g.lifetime() || x > c_d.lifetime() {
            return Err(Error::InsufficientMaterialization {
                requested: x.abs().ceil() as usize,
                available: if x < 0.0 { c_g.lifetime() } else { c_d.lifetime() } as usize,
            });
        }
    }
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    let c = |u: f64| if u <= 0.0 { c_g.eval(-u) } else { c_d.eval(u) };
    let inf = if s >= 0.0 {
        inf_over(c_d, s, t)
    } else if t <= 0.0 {
        inf_over(c_g, -t, -s)
    } else {
        inf_over(c_g, -s, c_g.lifetime()).min(inf_over(c_d, t, c_d.lifetime()))
    };
    Ok((c(s) + c(t) - 2.0 * inf).max(0.0))
}

use rand_distr::{Binomial, Distribution};

use super::gw::small_binomial;
use super::wpath::WPath;
use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Level sizes `C[0], ..., C[max_level]` of the invasion cluster along
/// `w_path`, without building the tree.
///
/// Trees hanging off a segment `[x_i, x_{i+1})` branch with that segment's
/// `Ŵ` at every height, so generations are tracked per segment:
/// `P_i(n+1) = Bin(σ P_i(n), Ŵ_{x_i}) + (new roots at BB_n if n is in segment i)`.
pub fn sample_level_profile(w_path: &WPath, max_level: usize, rng: &mut SimRng) -> Result<Vec<u64>> {
    if max_level > w_path.max_height() + 1 {
        return Err(Error::InsufficientMaterialization {
            requested: max_level,
            available: w_path.max_height() + 1,
        });
    }
    let sigma = w_path.sigma();
    let mut levels = Vec::with_capacity(max_level + 1);
    levels.push(1u64);
    // (segment index, Ŵ, population at the current height)
    let mut active: Vec<(usize, f64, u64)> = Vec::new();
    for n in 0..max_level {
        for entry in active.iter_mut() {
            let trials = sigma as u64 * entry.2;
            entry.2 = if trials == 0 {
                0
            } else {
                Binomial::new(trials, entry.1).expect("valid binomial").sample(rng)
            };
        }
        active.retain(|e| e.2 > 0);
        let seg = w_path.segment_index(n)?;
        let w = w_path.w_hat_at(n)?;
        let roots = small_binomial(sigma - 1, w, rng) as u64;
        if roots > 0 {
            match active.iter_mut().find(|e| e.0 == seg) {
                Some(e) => e.2 += roots,
                None => active.push((seg, w, roots)),
            }
        }
        levels.push(1 + active.iter().map(|e| e.2).sum::<u64>());
    }
    Ok(levels)
}

use crate::error::{Error, Result};
use crate::trees::{PlaneTree, SinTree};

fn level_index(x: f64) -> Result<usize> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("level must be finite and >= 0, got {x}")));
    }
    Ok(x.floor() as usize)
}

/// Level sizes `C[0], ..., C[max_level]` of a sin-tree, which must be
/// materialized at least up to `max_level`.
pub fn level_profile(tree: &SinTree, max_level: usize) -> Result<Vec<u64>> {
    if max_level > tree.height() {
        return Err(Error::InsufficientMaterialization {
            requested: max_level,
            available: tree.height(),
        });
    }
    let mut counts = vec![1u64; max_level + 1];
    for (i, level) in tree.levels().iter().enumerate().take(max_level) {
        for t in level.left.iter().chain(&level.right) {
            for (d, g) in t.generation_sizes().into_iter().enumerate() {
                let h = i + 1 + d;
                if h > max_level {
                    break;
                }
                counts[h] += g;
            }
        }
    }
    Ok(counts)
}

/// `C[x]`: number of vertices at height `⌊x⌋`.
pub fn level_count(tree: &SinTree, x: f64) -> Result<u64> {
    let n = level_index(x)?;
    Ok(level_profile(tree, n)?[n])
}

/// `C[0, x] = Σ_{i ≤ ⌊x⌋} C[i]`.
pub fn volume(tree: &SinTree, x: f64) -> Result<u64> {
    Ok(level_profile(tree, level_index(x)?)?.iter().sum())
}

/// `C[x]` for a finite tree (0 above its height).
pub fn tree_level_count(tree: &PlaneTree, x: f64) -> Result<u64> {
    let n = level_index(x)?;
    Ok(tree.generation_sizes().get(n).copied().unwrap_or(0))
}

/// `C[0, x]` for a finite tree.
pub fn tree_volume(tree: &PlaneTree, x: f64) -> Result<u64> {
    let n = level_index(x)?;
    Ok(tree.generation_sizes().iter().take(n + 1).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use crate::samplers::{sample_iic, ModelParams};
    use rand::SeedableRng;

    #[test]
    fn examples() {
        let cherry = PlaneTree::from_child_counts(vec![2, 0, 0]).unwrap();
        assert_eq!(tree_level_count(&cherry, 1.0).unwrap(), 2);
        assert_eq!(tree_volume(&cherry, 1.5).unwrap(), 3);
        assert_eq!(tree_level_count(&cherry, 4.0).unwrap(), 0);
        let bare = SinTree::bare(10);
        assert!((0..=10).all(|n| level_count(&bare, n as f64).unwrap() == 1));
        assert!(level_count(&bare, 11.0).is_err());
        assert!(level_count(&bare, -1.0).is_err());
    }

    #[test]
    fn agrees_with_full_recount() {
        let mut rng = SimRng::seed_from_u64(1);
        for _ in 0..50 {
            let t = sample_iic(ModelParams::new(2).unwrap(), false, 30, &mut rng).unwrap();
            // every vertex of depth ≤ 30 of the materialized tree is known
            let depths = t.to_plane_tree().depths();
            let profile = level_profile(&t, 30).unwrap();
            for (n, &c) in profile.iter().enumerate() {
                assert_eq!(c, depths.iter().filter(|&&d| d as usize == n).count() as u64);
            }
            let v = volume(&t, 17.9).unwrap();
            assert_eq!(v, (0..=17).map(|i| level_count(&t, i as f64).unwrap()).sum::<u64>());
        }
    }
}

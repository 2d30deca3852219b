use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::trees::PlaneTree;

/// Default vertex cap for a single Galton-Watson tree.
pub const DEFAULT_GW_CAP: usize = 10_000_000;

/// Bin(n, p) for small `n`, as `n` Bernoulli trials.
#[inline]
pub fn small_binomial(n: u32, p: f64, rng: &mut SimRng) -> u32 {
    let mut k = 0;
    for _ in 0..n {
        if rng.random::<f64>() < p {
            k += 1;
        }
    }
    k
}

/// Result of a capped Galton-Watson draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GwOutcome {
    Complete(PlaneTree),
    /// The tree reached the cap; `generated` vertices were produced.
    Overflow {
        generated: usize,
    },
}

impl GwOutcome {
    pub fn into_result(self, cap: usize) -> Result<PlaneTree> {
        match self {
            GwOutcome::Complete(t) => Ok(t),
            GwOutcome::Overflow { .. } => Err(Error::Overflow { cap }),
        }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, GwOutcome::Overflow { .. })
    }
}

/// Galton-Watson tree with Bin(σ, w) offspring, generated in depth-first
/// order. Stops with [`GwOutcome::Overflow`] once `cap` vertices exist.
pub fn sample_gw(sigma: u32, w: f64, cap: usize, rng: &mut SimRng) -> GwOutcome {
    let mut counts = Vec::new();
    match extend_gw(&mut counts, sigma, w, usize::MAX, cap, rng) {
        GwStatus::Done => GwOutcome::Complete(PlaneTree::from_counts_unchecked(counts)),
        GwStatus::Overflow => GwOutcome::Overflow {
            generated: counts.len(),
        },
        GwStatus::Limit => unreachable!("no output limit"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum GwStatus {
    Done,
    /// `out` reached `limit` entries before the tree was complete.
    Limit,
    Overflow,
}

/// Appends the depth-first child counts of one GW tree to `out`, stopping
/// early once `out.len() == limit`. Because vertices are drawn in depth-first
/// order, a stopped draw is a prefix of the draw that would have completed.
pub(crate) fn extend_gw(
    out: &mut Vec<u32>,
    sigma: u32,
    w: f64,
    limit: usize,
    cap: usize,
    rng: &mut SimRng,
) -> GwStatus {
    let mut pending: u64 = 1;
    let mut size = 0usize;
    while pending > 0 {
        if out.len() >= limit {
            return GwStatus::Limit;
        }
        if size >= cap {
            return GwStatus::Overflow;
        }
        let k = small_binomial(sigma, w, rng);
        out.push(k);
        size += 1;
        pending = pending + k as u64 - 1;
    }
    GwStatus::Done
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn w_zero_gives_singleton() {
        let mut rng = SimRng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(
                sample_gw(3, 0.0, 10, &mut rng),
                GwOutcome::Complete(PlaneTree::singleton())
            );
        }
    }

    #[test]
    fn root_degree_and_total_size_means() {
        let (sigma, w) = (3u32, 0.25);
        let n = 100_000;
        let mut rng = SimRng::seed_from_u64(2);
        let (mut root, mut root2, mut size, mut size2) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let t = sample_gw(sigma, w, 1_000_000, &mut rng).into_result(1_000_000).unwrap();
            let k = t.child_counts()[0] as f64;
            let s = t.n_vertices() as f64;
            root += k;
            root2 += k * k;
            size += s;
            size2 += s * s;
        }
        let nf = n as f64;
        let (mr, ms) = (root / nf, size / nf);
        let se_r = ((root2 / nf - mr * mr) / nf).sqrt();
        let se_s = ((size2 / nf - ms * ms) / nf).sqrt();
        assert!((mr - sigma as f64 * w).abs() < 3.0 * se_r, "root mean {mr}");
        let expect = 1.0 / (1.0 - sigma as f64 * w);
        assert!((ms - expect).abs() < 3.0 * se_s, "size mean {ms} vs {expect}");
    }

    #[test]
    fn supercritical_overflows_at_cap() {
        let mut rng = SimRng::seed_from_u64(3);
        let mut overflowed = 0;
        for _ in 0..50 {
            match sample_gw(2, 0.9, 1000, &mut rng) {
                GwOutcome::Overflow { generated } => {
                    assert_eq!(generated, 1000);
                    overflowed += 1;
                }
                GwOutcome::Complete(t) => assert!(t.n_vertices() < 1000),
            }
        }
        assert!(overflowed > 30);
        assert!(matches!(
            GwOutcome::Overflow { generated: 5 }.into_result(5),
            Err(Error::Overflow { cap: 5 })
        ));
    }

    #[test]
    fn limited_draw_is_prefix_of_full_draw() {
        for seed in 0..200 {
            let full = sample_gw(2, 0.5, 10_000, &mut SimRng::seed_from_u64(seed));
            let mut prefix = Vec::new();
            let status = extend_gw(&mut prefix, 2, 0.5, 7, 10_000, &mut SimRng::seed_from_u64(seed));
            if let GwOutcome::Complete(t) = full {
                let c = t.child_counts();
                assert_eq!(&c[..c.len().min(7)], &prefix[..]);
                assert_eq!(status == GwStatus::Done, c.len() <= 7);
            }
        }
    }

    #[test]
    fn same_seed_same_tree() {
        let a = sample_gw(3, 0.3, 1000, &mut SimRng::seed_from_u64(4));
        let b = sample_gw(3, 0.3, 1000, &mut SimRng::seed_from_u64(4));
        assert_eq!(a, b);
    }
}

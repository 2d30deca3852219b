//! Sin-trees built from a backbone with finite trees attached.
//!
//! Randomness is split three ways: backbone degrees, trees on the left of
//! the backbone and trees on the right. The right side is generated as the
//! left part of the mirror image, so each side can be streamed on its own in
//! depth-first order and still agree exactly with the full materialization.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gw::{extend_gw, small_binomial, GwStatus, DEFAULT_GW_CAP};
use super::params::ModelParams;
use super::wpath::WPath;
use crate::error::{Error, Result};
use crate::rng::{fork, Purpose, SimRng, StreamSplitter};
use crate::trees::{BackboneLevel, PlaneTree, SinTree};

/// Law of the number `Z` of off-backbone children of a backbone vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ZLaw {
    Constant {
        value: u32,
    },
    Binomial {
        trials: u32,
        p: f64,
    },
    /// `Bin(Y - 1, p)` with `Y` uniform on `{1, ..., sigma}`: the left count
    /// of a backbone vertex whose backbone child sits in a uniform slot.
    Split {
        sigma: u32,
        p: f64,
    },
}

impl ZLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ZLaw::Constant { .. } => Ok(()),
            ZLaw::Binomial { p, .. } | ZLaw::Split { p, .. } if !(0.0..=1.0).contains(&p) => {
                Err(Error::invalid(format!("probability {p} outside [0, 1]")))
            }
            ZLaw::Split { sigma, .. } if sigma < 1 => Err(Error::invalid("split law needs sigma >= 1")),
            _ => Ok(()),
        }
    }

    pub fn max_value(&self) -> u32 {
        match *self {
            ZLaw::Constant { value } => value,
            ZLaw::Binomial { trials, .. } => trials,
            ZLaw::Split { sigma, .. } => sigma - 1,
        }
    }

    /// `P(Z = j)`.
    pub fn pmf(&self, j: u32) -> f64 {
        match *self {
            ZLaw::Constant { value } => f64::from(u8::from(j == value)),
            ZLaw::Binomial { trials, p } => binomial_pmf(trials, p, j),
            ZLaw::Split { sigma, p } => (1..=sigma).map(|y| binomial_pmf(y - 1, p, j)).sum::<f64>() / sigma as f64,
        }
    }

    /// `E Z^q`.
    pub fn moment(&self, q: f64) -> f64 {
        (0..=self.max_value()).map(|j| self.pmf(j) * f64::from(j).powf(q)).sum()
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ZLaw::Constant { value } => value as f64,
            ZLaw::Binomial { trials, p } => trials as f64 * p,
            ZLaw::Split { sigma, p } => (sigma as f64 - 1.0) / 2.0 * p,
        }
    }

    /// `P(Z > 0)`, the largest admissible lower mass `η`.
    pub fn positive_mass(&self) -> f64 {
        1.0 - self.pmf(0)
    }

    pub fn sample(&self, rng: &mut SimRng) -> u32 {
        match *self {
            ZLaw::Constant { value } => value,
            ZLaw::Binomial { trials, p } => small_binomial(trials, p, rng),
            ZLaw::Split { sigma, p } => {
                let y = rng.random_range(1..=sigma);
                small_binomial(y - 1, p, rng)
            }
        }
    }
}

fn binomial_pmf(n: u32, p: f64, j: u32) -> f64 {
    if j > n {
        return 0.0;
    }
    let mut c = 1.0;
    for i in 0..j {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32)
}

/// How the backbone degrees and attached trees are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BackboneModel {
    /// `Z_i ~ z_law` i.i.d. children to the left of the backbone, each with an
    /// independent Bin(σ, w) Galton-Watson tree.
    ZTheta { z_law: ZLaw, w: f64 },
    /// Incipient infinite cluster. One-sided: `Z ~ Bin(σ-1, 1/σ)` to the
    /// left. Two-sided: the backbone child sits in a uniform slot `Y` and the
    /// `Y-1` slots to its left and `σ-Y` to its right are each open with
    /// probability `1/σ`.
    Iic { two_sided: bool },
    /// Invasion cluster along a prescribed `W` path: at height `n` the open
    /// slots and the attached trees use the dual parameter `Ŵ_n`.
    Structural { w_path: WPath, two_sided: bool },
}

impl BackboneModel {
    pub fn is_two_sided(&self) -> bool {
        match self {
            BackboneModel::ZTheta { .. } => false,
            BackboneModel::Iic { two_sided } | BackboneModel::Structural { two_sided, .. } => *two_sided,
        }
    }
}

/// Per-level degree law resolved at a given height.
enum LevelLaw<'a> {
    OneSided(&'a ZLaw),
    OneSidedBinomial(u32, f64),
    Split(f64),
}

/// Sampler for sin-trees of a given model.
#[derive(Debug, Clone)]
pub struct SinTreeSampler {
    sigma: u32,
    model: BackboneModel,
    cap: usize,
}

/// The three independent random sources of one sin-tree.
#[derive(Debug, Clone)]
pub struct SinTreeSeeds {
    backbone: SimRng,
    left: SimRng,
    right: SimRng,
}

impl SinTreeSeeds {
    pub fn from_splitter(splitter: &StreamSplitter, replica: u64) -> Self {
        SinTreeSeeds {
            backbone: splitter.stream(replica, Purpose::Backbone),
            left: splitter.stream(replica, Purpose::LeftSide),
            right: splitter.stream(replica, Purpose::RightSide),
        }
    }

    pub fn from_rng(rng: &mut SimRng) -> Self {
        SinTreeSeeds {
            backbone: fork(rng),
            left: fork(rng),
            right: fork(rng),
        }
    }
}

/// Lazily drawn backbone degrees `(Z_i, Z̃_i)`.
struct Degrees<'a> {
    sampler: &'a SinTreeSampler,
    rng: SimRng,
    drawn: Vec<(u32, u32)>,
}

impl Degrees<'_> {
    fn get(&mut self, i: usize) -> Result<(u32, u32)> {
        while self.drawn.len() <= i {
            let level = self.drawn.len();
            let d = match self.sampler.level_law(level)? {
                LevelLaw::OneSided(z) => (z.sample(&mut self.rng), 0),
                LevelLaw::OneSidedBinomial(n, p) => (small_binomial(n, p, &mut self.rng), 0),
                LevelLaw::Split(p) => {
                    let y = self.rng.random_range(1..=self.sampler.sigma);
                    let z = small_binomial(y - 1, p, &mut self.rng);
                    let zt = small_binomial(self.sampler.sigma - y, p, &mut self.rng);
                    (z, zt)
                }
            };
            self.drawn.push(d);
        }
        Ok(self.drawn[i])
    }
}

impl SinTreeSampler {
    pub fn new(params: ModelParams, model: BackboneModel) -> Result<Self> {
        Self::with_cap(params, model, DEFAULT_GW_CAP)
    }

    pub fn with_cap(params: ModelParams, model: BackboneModel, cap: usize) -> Result<Self> {
        match &model {
            BackboneModel::ZTheta { z_law, w } => {
                z_law.validate()?;
                if !(0.0..=1.0).contains(w) {
                    return Err(Error::invalid(format!("w = {w} outside [0, 1]")));
                }
            }
            BackboneModel::Structural { w_path, .. } if w_path.sigma() != params.sigma() => {
                return Err(Error::invalid("W path was built for a different sigma"));
            }
            _ => {}
        }
        if cap == 0 {
            return Err(Error::invalid("cap must be positive"));
        }
        Ok(SinTreeSampler {
            sigma: params.sigma(),
            model,
            cap,
        })
    }

    pub fn model(&self) -> &BackboneModel {
        &self.model
    }

    fn level_law(&self, i: usize) -> Result<LevelLaw<'_>> {
        let p_c = 1.0 / self.sigma as f64;
        Ok(match &self.model {
            BackboneModel::ZTheta { z_law, .. } => LevelLaw::OneSided(z_law),
            BackboneModel::Iic { two_sided: false } => LevelLaw::OneSidedBinomial(self.sigma - 1, p_c),
            BackboneModel::Iic { two_sided: true } => LevelLaw::Split(p_c),
            BackboneModel::Structural { w_path, two_sided } => {
                let w = w_path.w_hat_at(i)?;
                if *two_sided {
                    LevelLaw::Split(w)
                } else {
                    LevelLaw::OneSidedBinomial(self.sigma - 1, w)
                }
            }
        })
    }

    /// Parameter of the trees attached at backbone height `i`.
    fn tree_parameter(&self, i: usize) -> Result<f64> {
        Ok(match &self.model {
            BackboneModel::ZTheta { w, .. } => *w,
            BackboneModel::Iic { .. } => 1.0 / self.sigma as f64,
            BackboneModel::Structural { w_path, .. } => w_path.w_hat_at(i)?,
        })
    }

    fn degrees(&self, seeds: &SinTreeSeeds) -> Degrees<'_> {
        Degrees {
            sampler: self,
            rng: seeds.backbone.clone(),
            drawn: Vec::new(),
        }
    }

    fn tree(&self, w: f64, rng: &mut SimRng) -> Result<PlaneTree> {
        let mut counts = Vec::new();
        match extend_gw(&mut counts, self.sigma, w, usize::MAX, self.cap, rng) {
            GwStatus::Done => Ok(PlaneTree::from_counts_unchecked(counts)),
            _ => Err(Error::Overflow { cap: self.cap }),
        }
    }

    /// Backbone degrees `(Z_i, Z̃_i)` for `i < height`, without the attached
    /// trees.
    pub fn backbone_degrees(&self, height: usize, seeds: &SinTreeSeeds) -> Result<Vec<(u32, u32)>> {
        let mut degrees = self.degrees(seeds);
        (0..height).map(|i| degrees.get(i)).collect()
    }

    /// The sin-tree materialized up to backbone height `height`.
    pub fn materialize(&self, height: usize, seeds: &SinTreeSeeds) -> Result<SinTree> {
        let mut degrees = self.degrees(seeds);
        let mut left_rng = seeds.left.clone();
        let mut right_rng = seeds.right.clone();
        let mut tree = SinTree::default();
        for i in 0..height {
            let (z, zt) = degrees.get(i)?;
            let w = self.tree_parameter(i)?;
            let left = (0..z)
                .map(|_| self.tree(w, &mut left_rng))
                .collect::<Result<Vec<_>>>()?;
            let mut mirrored = (0..zt)
                .map(|_| self.tree(w, &mut right_rng))
                .collect::<Result<Vec<_>>>()?;
            mirrored.reverse();
            let right = mirrored.iter().map(PlaneTree::reflect).collect();
            tree.push_level(BackboneLevel { left, right });
        }
        Ok(tree)
    }

    /// First `n` depth-first child counts of the left part of the infinite
    /// tree. Equal to a prefix of the truncations of [`Self::materialize`].
    pub fn left_prefix(&self, n: usize, seeds: &SinTreeSeeds) -> Result<Vec<u32>> {
        self.side_prefix(n, seeds, false)
    }

    /// First `n` depth-first child counts of the right part (the left part of
    /// the mirror image).
    pub fn right_prefix(&self, n: usize, seeds: &SinTreeSeeds) -> Result<Vec<u32>> {
        self.side_prefix(n, seeds, true)
    }

    fn side_prefix(&self, n: usize, seeds: &SinTreeSeeds, right: bool) -> Result<Vec<u32>> {
        let mut degrees = self.degrees(seeds);
        let mut rng = if right { seeds.right.clone() } else { seeds.left.clone() };
        let mut out = Vec::with_capacity(n);
        let mut level = 0;
        while out.len() < n {
            let (z, zt) = degrees.get(level)?;
            let z = if right { zt } else { z };
            out.push(z + 1);
            let w = self.tree_parameter(level)?;
            for _ in 0..z {
                if out.len() >= n {
                    break;
                }
                if extend_gw(&mut out, self.sigma, w, n, self.cap, &mut rng) == GwStatus::Overflow {
                    return Err(Error::Overflow { cap: self.cap });
                }
            }
            level += 1;
        }
        Ok(out)
    }
}

/// `(Z, θ)`-tree: `Z_i ~ z_law` left subtrees at each backbone vertex, each a
/// Bin(σ, w) Galton-Watson tree.
pub fn sample_ztheta(params: ModelParams, z_law: ZLaw, w: f64, height: usize, rng: &mut SimRng) -> Result<SinTree> {
    let sampler = SinTreeSampler::new(params, BackboneModel::ZTheta { z_law, w })?;
    sampler.materialize(height, &SinTreeSeeds::from_rng(rng))
}

/// Incipient infinite cluster. The conditioned version is one-sided; the
/// unconditioned one carries trees on both sides (use
/// [`SinTree::split_sides`] for the pair of sides).
pub fn sample_iic(params: ModelParams, conditioned: bool, height: usize, rng: &mut SimRng) -> Result<SinTree> {
    if height < 1 {
        return Err(Error::invalid("height must be at least 1"));
    }
    let sampler = SinTreeSampler::new(
        params,
        BackboneModel::Iic {
            two_sided: !conditioned,
        },
    )?;
    sampler.materialize(height, &SinTreeSeeds::from_rng(rng))
}

/// Invasion cluster along `w_path`, built segment by segment.
pub fn sample_ipc_structural(
    params: ModelParams,
    w_path: &WPath,
    height: usize,
    two_sided: bool,
    rng: &mut SimRng,
) -> Result<SinTree> {
    if height > w_path.max_height() + 1 {
        return Err(Error::InsufficientMaterialization {
            requested: height,
            available: w_path.max_height() + 1,
        });
    }
    let sampler = SinTreeSampler::new(
        params,
        BackboneModel::Structural {
            w_path: w_path.clone(),
            two_sided,
        },
    )?;
    sampler.materialize(height, &SinTreeSeeds::from_rng(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::lukaciewicz_steps;
    use crate::stats::ks::ks_two_sample;
    use rand::SeedableRng;

    fn p(sigma: u32) -> ModelParams {
        ModelParams::new(sigma).unwrap()
    }

    #[test]
    fn zlaw_moments() {
        let b = ZLaw::Binomial { trials: 2, p: 0.5 };
        assert_eq!(b.pmf(1), 0.5);
        assert!((b.mean() - b.moment(1.0)).abs() < 1e-15);
        assert!((b.positive_mass() - 0.75).abs() < 1e-15);
        let s = ZLaw::Split { sigma: 2, p: 0.5 };
        assert!((s.pmf(1) - 0.25).abs() < 1e-15);
        assert!((s.mean() - s.moment(1.0)).abs() < 1e-15);
        let s3 = ZLaw::Split { sigma: 3, p: 0.3 };
        assert!((s3.mean() - s3.moment(1.0)).abs() < 1e-15);
        assert!(((0..=2).map(|j| s3.pmf(j)).sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(ZLaw::Binomial { trials: 2, p: 1.5 }.validate().is_err());
    }

    #[test]
    fn bare_and_constant_trees() {
        let mut rng = SimRng::seed_from_u64(0);
        let t = sample_ztheta(p(2), ZLaw::Constant { value: 0 }, 0.5, 6, &mut rng).unwrap();
        assert_eq!(t, SinTree::bare(6));
        let t = sample_ztheta(p(2), ZLaw::Constant { value: 1 }, 0.0, 4, &mut rng).unwrap();
        assert_eq!(t.truncate(2).unwrap().child_counts(), &[2, 0, 2, 0, 0]);
        assert!(t.is_backbone_rightmost());
    }

    fn degree_histogram(t: &SinTree, right: bool) -> Vec<usize> {
        let mut h = vec![0; 4];
        for l in t.levels() {
            h[if right { l.right.len() } else { l.left.len() }] += 1;
        }
        h
    }

    fn iic_degrees(sigma: u32, two_sided: bool, height: usize, seed: u64) -> Vec<(u32, u32)> {
        let s = SinTreeSampler::new(p(sigma), BackboneModel::Iic { two_sided }).unwrap();
        let seeds = SinTreeSeeds::from_rng(&mut SimRng::seed_from_u64(seed));
        s.backbone_degrees(height, &seeds).unwrap()
    }

    #[test]
    fn conditioned_iic_degrees_are_bernoulli_half() {
        let d = iic_degrees(2, false, 20_000, 1);
        assert!(d.iter().all(|&(z, zt)| z <= 1 && zt == 0));
        let frac = d.iter().filter(|&&(z, _)| z == 1).count() as f64 / 20_000.0;
        assert!((frac - 0.5).abs() < 3.0 * (0.25f64 / 20_000.0).sqrt() + 1e-3);
        let mut rng = SimRng::seed_from_u64(1);
        assert!(sample_iic(p(2), true, 30, &mut rng).unwrap().is_backbone_rightmost());
    }

    #[test]
    fn unconditioned_iic_degrees() {
        let d = iic_degrees(2, true, 40_000, 2);
        let n = d.len() as f64;
        let ones = d.iter().filter(|&&(z, _)| z == 1).count() as f64;
        assert!((ones / n - 0.25).abs() < 3.0 * (0.25f64 * 0.75 / n).sqrt());
        assert!(iic_degrees(3, true, 5000, 3).iter().all(|&(z, zt)| z + zt <= 2));
    }

    #[test]
    fn degrees_agree_with_materialization() {
        let s = SinTreeSampler::new(p(3), BackboneModel::Iic { two_sided: true }).unwrap();
        let seeds = SinTreeSeeds::from_rng(&mut SimRng::seed_from_u64(4));
        let t = s.materialize(40, &seeds).unwrap();
        let d = s.backbone_degrees(40, &seeds).unwrap();
        for (l, &(z, zt)) in t.levels().iter().zip(&d) {
            assert_eq!((l.left.len() as u32, l.right.len() as u32), (z, zt));
        }
    }

    #[test]
    fn segment_law_matches_binomial() {
        let w = 0.3;
        let mut rng = SimRng::seed_from_u64(3);
        let t = sample_ztheta(p(3), ZLaw::Binomial { trials: 2, p: w }, w, 30_000, &mut rng).unwrap();
        let h = degree_histogram(&t, false);
        let n = 30_000.0;
        for (j, expect) in [(1.0 - w) * (1.0 - w), 2.0 * w * (1.0 - w), w * w]
            .into_iter()
            .enumerate()
        {
            let f = h[j] as f64 / n;
            assert!((f - expect).abs() < 4.0 * (expect * (1.0 - expect) / n).sqrt(), "j={j}");
        }
    }

    #[test]
    fn same_seeds_same_tree() {
        let s = SinTreeSampler::new(p(2), BackboneModel::Iic { two_sided: true }).unwrap();
        let split = StreamSplitter::new(99);
        let a = s.materialize(50, &SinTreeSeeds::from_splitter(&split, 4)).unwrap();
        let b = s.materialize(50, &SinTreeSeeds::from_splitter(&split, 4)).unwrap();
        let c = s.materialize(50, &SinTreeSeeds::from_splitter(&split, 5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // a longer materialization extends a shorter one
        let d = s.materialize(80, &SinTreeSeeds::from_splitter(&split, 4)).unwrap();
        assert_eq!(&d.levels()[..50], a.levels());
    }

    #[test]
    fn streamed_prefixes_match_materialization() {
        let split = StreamSplitter::new(7);
        for two_sided in [false, true] {
            let s = SinTreeSampler::new(p(3), BackboneModel::Iic { two_sided }).unwrap();
            for r in 0..20 {
                let seeds = SinTreeSeeds::from_splitter(&split, r);
                let full = s.materialize(60, &seeds).unwrap();
                let (l, rt) = full.split_sides();
                for (side, part) in [(false, l), (true, rt)] {
                    let counts = part.truncate(60).unwrap().into_child_counts();
                    let n = counts.len() - 1;
                    for m in [1, 5, n / 2, n] {
                        let pre = if side {
                            s.right_prefix(m, &seeds)
                        } else {
                            s.left_prefix(m, &seeds)
                        }
                        .unwrap();
                        assert_eq!(&pre[..], &counts[..m]);
                    }
                }
            }
        }
    }

    #[test]
    fn structural_critical_equals_iic_in_law() {
        let split = StreamSplitter::new(11);
        let iic = SinTreeSampler::new(p(2), BackboneModel::Iic { two_sided: false }).unwrap();
        let st = SinTreeSampler::new(
            p(2),
            BackboneModel::Structural {
                w_path: WPath::critical(2, 100),
                two_sided: false,
            },
        )
        .unwrap();
        // Lukaciewicz value after 300 depth-first steps of the left part
        let sizes = |s: &SinTreeSampler, base: u64| -> Vec<f64> {
            (0..3000)
                .map(|r| {
                    let pre = s
                        .left_prefix(300, &SinTreeSeeds::from_splitter(&split, base + r))
                        .unwrap();
                    pre.iter().map(|&c| f64::from(c) - 1.0).sum::<f64>()
                })
                .collect()
        };
        let (d, p_value) = ks_two_sample(&sizes(&iic, 0), &sizes(&st, 10_000)).unwrap();
        assert!(p_value > 0.001, "D = {d}");
    }

    #[test]
    fn single_segment_equals_ztheta() {
        let w_hat = 0.3;
        let wp = WPath::from_w_hat(3, vec![0], vec![w_hat], 50).unwrap();
        let mut rng = SimRng::seed_from_u64(12);
        let st = sample_ipc_structural(p(3), &wp, 40, false, &mut rng.clone()).unwrap();
        let zt = sample_ztheta(p(3), ZLaw::Binomial { trials: 2, p: w_hat }, w_hat, 40, &mut rng).unwrap();
        // identical construction under identical randomness
        assert_eq!(
            lukaciewicz_steps(&st.truncate(40).unwrap()),
            lukaciewicz_steps(&zt.truncate(40).unwrap())
        );
        assert!(sample_ipc_structural(p(3), &wp, 60, false, &mut rng).is_err());
    }

    #[test]
    fn two_sided_structural_respects_slot_count() {
        let wp = WPath::from_w_hat(3, vec![0, 10], vec![0.2, 1.0 / 3.0], 100).unwrap();
        let mut rng = SimRng::seed_from_u64(13);
        let t = sample_ipc_structural(p(3), &wp, 100, true, &mut rng).unwrap();
        assert!(t.levels().iter().all(|l| l.left.len() + l.right.len() <= 2));
    }

    #[test]
    fn overflow_propagates() {
        let s = SinTreeSampler::with_cap(
            p(2),
            BackboneModel::ZTheta {
                z_law: ZLaw::Constant { value: 1 },
                w: 0.95,
            },
            50,
        )
        .unwrap();
        let r = s.materialize(30, &SinTreeSeeds::from_rng(&mut SimRng::seed_from_u64(0)));
        assert!(matches!(r, Err(Error::Overflow { cap: 50 })));
    }
}

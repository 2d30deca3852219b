//! Random generation of the discrete objects: Galton-Watson trees, sin-trees
//! of the (Z, θ), incipient-infinite-cluster and invasion kinds, and direct
//! invasion percolation.

mod backbone;
mod gw;
mod ipc_direct;
mod params;
mod profile;
mod wpath;

pub use backbone::{
    sample_iic, sample_ipc_structural, sample_ztheta, BackboneModel, SinTreeSampler, SinTreeSeeds, ZLaw,
};
pub use gw::{sample_gw, small_binomial, GwOutcome, DEFAULT_GW_CAP};
pub use ipc_direct::{sample_ipc_direct, IpcRun};
pub use params::{dual_parameter, gamma, invert_dual, zeta, ModelParams};
pub use profile::sample_level_profile;
pub use wpath::{sample_w_asymptotic, WPath, W_HAT_FLOOR};

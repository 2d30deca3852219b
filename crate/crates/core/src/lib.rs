//! Invasion percolation on regular trees, its plane-tree encodings and the
//! continuum limit objects driven by the Poisson lower envelope.

pub mod codec;
pub mod continuum;
pub mod error;
pub mod manifest;
pub mod rng;
pub mod samplers;
pub mod stats;
pub mod trees;

pub use error::{Error, Result};
pub use manifest::Manifest;

//! Continuum objects: the Poisson lower envelope, the equation it drives, the
//! limit functionals and the pseudo-metric of the continuum sin-tree.

mod envelope;
mod functional;
mod metric;
mod sde;

pub use envelope::{Envelope, DEFAULT_T_MIN};
pub use functional::{limit_functional, Functional};
pub use metric::continuum_metric;
pub use sde::{
    first_hitting, sample_two_sided, solve_sde, solve_sde_with_noise, solve_two_sided, visit_sde, Coupling, LimitPath,
    SdeConfig, TwoSided, Variant,
};

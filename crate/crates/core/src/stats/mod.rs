//! Level and volume counts, local times, excursion rates, the level limit
//! sampler and the two-sample comparisons built on them.

mod excursion;
pub mod experiment;
pub mod ks;
mod level_limit;
mod levels;
mod local_time;
mod sample_set;

pub use excursion::{excursion_inf_rate, excursion_sup_rate};
pub use ks::{ks_one_sample, ks_two_sample};
pub use level_limit::{level_limit_mean, sample_level_limit, LevelLimitDraw, DEFAULT_RELATIVE_DELTA};
pub use levels::{level_count, level_profile, tree_level_count, tree_volume, volume};
pub use local_time::{height_qv_rate, occupation_local_time, occupation_time, segment_occupation};
pub use sample_set::{correlation, SampleSet};

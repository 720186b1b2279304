//! Seeded samplers, the Monte Carlo replication harness and the KS normality check.

pub mod config;
mod harness;
mod ks;
mod sampler;

pub use config::{parse_study, preset, preset_text, to_config_text, EpsilonRule, ExperimentConfig, Study, Target, PRESET_NAMES};
pub use harness::{
    empirical_mse, run_replications, summarize, target_truth, ReplicationRecord, ReplicationResult,
    ReplicationSummary,
};
pub use ks::{kolmogorov_tail, ks_test, KsResult};
pub use sampler::{replication_rng, sample, standard_normals, SimRng};

//! Reproducible experiments: strict JSON configuration, trials seeded by
//! `split(base_seed, i)` on a bounded worker pool, and CSV/JSON output.

mod config;
mod experiments;
mod output;

pub use config::{ExperimentConfig, ExperimentKind, GeometrySection, ModelSection, MsaSection, OneOrMany, RunSection};
pub use experiments::{
    replay_emsa, run_emsa, run_experiment, run_geometry, run_localization_probability, run_schedule, run_wegner,
};
pub use output::{real, Outcome, Table};

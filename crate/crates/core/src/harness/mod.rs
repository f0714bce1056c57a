//! Seeded experiment runner: scenarios, regret traces, verification suites.

mod config;
mod scenarios;
mod trace;
pub mod verify;

pub use config::ExperimentConfig;
pub use scenarios::{run, scenario_names, RunOutput};
pub use trace::{RegretTrace, ReplicaTrace, TraceRow};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "UNIREG_OUT_DIR";

//! Experiment configuration, scenarios, trial batches and artifacts.

pub mod config;
pub mod output;
pub mod scenario;
pub mod svg;
pub mod trials;

pub use config::{ExperimentConfig, Layout, Target, TargetLabel};
pub use output::{replay, write_comparison, write_outputs};
pub use scenario::{generate_initial, grid5x5, load_layout, Scenario};
pub use trials::{aggregate, run_trials, Aggregates, RunSummary, TrialRecord};

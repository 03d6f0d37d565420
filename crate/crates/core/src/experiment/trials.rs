use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::scenario::generate_initial;
use crate::controller::{run_singling, TrialResult};
use crate::swarm::SwarmState;
use crate::{Error, Result};

/// Generator used for every trial, recorded in the outputs.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

/// One trial of a batch; exactly one of `result` / `error` is set.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub result: Option<TrialResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub trials: usize,
    pub completed: usize,
    pub errors: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean over trials of the time-averaged largest-component fraction.
    pub mean_time_avg_connectivity: f64,
    pub min_time_avg_connectivity: f64,
    /// Mean over trials of the final-step largest-component fraction.
    pub mean_final_connectivity: f64,
    pub min_final_connectivity: f64,
    /// Mean separation step among successful trials.
    pub mean_separation_time: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub target_id: usize,
    pub sheep: usize,
    pub initial: SwarmState,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Aggregates,
}

impl RunSummary {
    pub fn seeds(&self) -> Vec<u64> {
        self.trials.iter().map(|t| t.seed).collect()
    }

    pub fn results(&self) -> impl Iterator<Item = &TrialResult> {
        self.trials.iter().filter_map(|t| t.result.as_ref())
    }
}

pub fn trial_seed(base_seed: u64, index: usize) -> u64 {
    base_seed.wrapping_add(index as u64)
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NAN, f64::min)
}

/// Aggregates from per-trial records; depends only on the records'
/// contents in index order.
pub fn aggregate(records: &[TrialRecord]) -> Aggregates {
    let results: Vec<&TrialResult> = records.iter().filter_map(|r| r.result.as_ref()).collect();
    let time_avg: Vec<f64> = results.iter().map(|r| r.mean_connectivity()).collect();
    let finals: Vec<f64> = results.iter().map(|r| r.final_connectivity()).collect();
    let sep_times: Vec<f64> = results.iter().filter(|r| r.success).map(|r| r.steps as f64).collect();
    let successes = sep_times.len();
    Aggregates {
        trials: records.len(),
        completed: results.len(),
        errors: records.len() - results.len(),
        successes,
        success_rate: successes as f64 / records.len().max(1) as f64,
        mean_time_avg_connectivity: mean(&time_avg),
        min_time_avg_connectivity: min(&time_avg),
        mean_final_connectivity: mean(&finals),
        min_final_connectivity: min(&finals),
        mean_separation_time: (!sep_times.is_empty()).then(|| mean(&sep_times)),
    }
}

/// Runs one trial with its own generator.
pub fn run_trial(config: &ExperimentConfig, initial: &SwarmState, t: usize, index: usize) -> TrialRecord {
    let seed = trial_seed(config.base_seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match run_singling(
        initial,
        t,
        &config.params,
        config.method,
        &mut rng,
        seed,
        &config.controller(),
    ) {
        Ok(result) => TrialRecord {
            index,
            seed,
            result: Some(result),
            error: None,
        },
        Err(e) => TrialRecord {
            index,
            seed,
            result: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs all trials of a config on a bounded worker pool and aggregates them.
/// Results are merged by trial index, so the summary does not depend on
/// scheduling.
pub fn run_trials(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let (initial, t) = generate_initial(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut trials: Vec<TrialRecord> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, &initial, t, i))
            .collect()
    });
    trials.sort_by_key(|r| r.index);
    let aggregates = aggregate(&trials);
    Ok(RunSummary {
        config: config.clone(),
        target_id: t,
        sheep: initial.len(),
        initial,
        trials,
        aggregates,
    })
}

//! Batch experiment runner for `qsim-core`.
//!
//! Each experiment reads a typed parameter table (TOML, all keys optional),
//! runs under a fixed seed and thread count, and produces CSV tables plus a
//! JSON summary whose checks decide the exit status.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::path::Path;

pub use config::{defaults, load_params, normalized_toml, parse_params, Params};
pub use error::CliError;
pub use experiments::Experiment;
pub use report::{write_outputs, Report};

/// Runs `experiment` inside a dedicated pool of `threads` workers (0 picks
/// the machine default).
pub fn run_experiment(experiment: Experiment, params: &Params, seed: u64, threads: usize) -> Result<Report, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Threads(e.to_string()))?;
    pool.install(|| experiment.run(params, seed))
}

/// Parameters from `config` if given, defaults otherwise.
pub fn resolve_params(experiment: Experiment, config: Option<&Path>) -> Result<Params, CliError> {
    let specs = experiment.specs();
    match config {
        Some(path) => load_params(path, experiment.name(), &specs),
        None => Ok(defaults(&specs)),
    }
}

//! Monte-Carlo harness: trial runners, sweeps, phase-transition and
//! second-epoch statistics, theory tables and the validation suite.
//!
//! Every trial is a pure function of `(parameters, base seed, trial index)`.
//! Trials run on a rayon pool and are collected back in trial-index order, so
//! outputs do not depend on the thread count.

mod epoch2;
mod output;
mod sweep;
mod tables;
mod transition;
mod trial;
mod validate;

use std::path::PathBuf;

use thiserror::Error;

use crate::graph::GraphError;
use crate::oracle::OracleError;
use crate::theory::TheoryError;

pub use epoch2::{epoch2_stats, Epoch2Config, Epoch2Report, Epoch2Summary, Epoch2TrialRow, YHistRow};
pub use output::{write_rows, OutputFormat};
pub use sweep::{sweep_c, sweep_n, SweepRow};
pub use tables::{gamma_rows, predict_rows, tree_hist_rows, tree_rows, GammaRow, PredictRow, TreeHistRow, TreeRow};
pub use transition::{phase_transition, PhaseTransitionConfig, PhaseTransitionRow, Side};
pub use trial::{cmd_collapse, default_phase_budget, run_trial, CollapseConfig, ExperimentRecord};
pub use validate::{validate, validate_with, CheckResult, DominationTest, ValidationConfig, ValidationReport};

/// Environment variable consulted for the worker count when no explicit count is given.
pub const THREADS_ENV: &str = "COLLAPSE_LAB_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("output encoding failed: {0}")]
    Encode(String),
    #[error("audit failed in trial {trial}: {detail}")]
    Audit { trial: u64, detail: String },
}

/// Runs `f` on a pool of `threads` workers (`None`: rayon's default, i.e. available parallelism).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) if k > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

/// Worker count: [`THREADS_ENV`] when set to a positive integer, else `explicit`.
pub fn resolve_threads(explicit: Option<usize>) -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
        .or(explicit)
}

pub(crate) fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

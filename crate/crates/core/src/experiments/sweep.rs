use serde::{Deserialize, Serialize};

use super::trial::{cmd_collapse, CollapseConfig, ExperimentRecord};
use super::{mean_and_std, ExperimentError};

/// One grid point. The first five columns are the figure data; the rest identify the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub c: f64,
    pub mean_core_f0: f64,
    pub std_core_f0: f64,
    pub predicted_core_f0: Option<f64>,
    pub t: usize,
    pub trials: u64,
    pub base_seed: u64,
}

impl SweepRow {
    pub fn from_records(records: &[ExperimentRecord], base_seed: u64) -> Option<Self> {
        let first = records.first()?;
        let cores: Vec<f64> = records.iter().map(|r| r.core_f0 as f64).collect();
        let (mean, std) = mean_and_std(&cores);
        Some(Self {
            n: first.n,
            c: first.c,
            mean_core_f0: mean,
            std_core_f0: std,
            predicted_core_f0: first.predicted_core_f0,
            t: first.t,
            trials: records.len() as u64,
            base_seed,
        })
    }
}

fn point(n: usize, c: f64, t: Option<usize>, trials: u64, seed: u64) -> Result<SweepRow, ExperimentError> {
    let cfg = CollapseConfig { t, ..CollapseConfig::new(n, c, trials, seed) };
    let records = cmd_collapse(&cfg)?;
    Ok(SweepRow::from_records(&records, seed).expect("at least one trial"))
}

fn check_grid<T>(grid: &[T]) -> Result<(), ExperimentError> {
    if grid.is_empty() {
        Err(ExperimentError::Parameter("grid must not be empty".into()))
    } else {
        Ok(())
    }
}

/// Core size against `n` at fixed `c`. Every point uses the same base seed.
pub fn sweep_n(c: f64, n_grid: &[usize], t: Option<usize>, trials: u64, seed: u64) -> Result<Vec<SweepRow>, ExperimentError> {
    check_grid(n_grid)?;
    n_grid.iter().map(|&n| point(n, c, t, trials, seed)).collect()
}

/// Core size against `c` at fixed `n`.
pub fn sweep_c(n: usize, c_grid: &[f64], t: Option<usize>, trials: u64, seed: u64) -> Result<Vec<SweepRow>, ExperimentError> {
    check_grid(c_grid)?;
    c_grid.iter().map(|&c| point(n, c, t, trials, seed)).collect()
}

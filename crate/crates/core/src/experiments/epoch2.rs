use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::collapse::{run_epoch1, run_epoch2};
use crate::graph::{sample_er_with, GraphParams};
use crate::rng;
use crate::theory;

#[derive(Clone, Debug, PartialEq)]
pub struct Epoch2Config {
    pub n: usize,
    pub c: f64,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
    /// Run even when `eps` exceeds the range covered by the ending bound.
    pub allow_outside_range: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epoch2TrialRow {
    pub trial_index: u64,
    pub seed: u64,
    pub f0_epoch1: usize,
    pub core_f0: usize,
    pub epoch2_deleted: usize,
    pub sum_y: u64,
    pub mean_y: Option<f64>,
    pub within_budget: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YHistRow {
    pub y: usize,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epoch2Summary {
    pub n: usize,
    pub c: f64,
    pub eps: f64,
    pub eps_limit: f64,
    pub t: usize,
    pub trials: u64,
    pub base_seed: u64,
    pub total_steps: u64,
    /// Mean of all `Y_i` pooled over trials; absent when no trial took a step.
    pub mean_y: Option<f64>,
    pub drift_bound: f64,
    pub mean_deleted: f64,
    pub max_deleted: usize,
    pub fraction_within_budget: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epoch2Report {
    pub summary: Epoch2Summary,
    pub histogram: Vec<YHistRow>,
    pub trials: Vec<Epoch2TrialRow>,
}

/// Both epochs with the phase budget matched to `eps`, recording every `Y_i`.
pub fn epoch2_stats(cfg: &Epoch2Config) -> Result<Epoch2Report, ExperimentError> {
    if cfg.trials == 0 {
        return Err(ExperimentError::Parameter("trials must be at least 1".into()));
    }
    let params = GraphParams::with_density(cfg.n, cfg.c, 0)?;
    let limit = theory::epoch2_epsilon_limit(cfg.c)?;
    if !(cfg.eps > 0.0) || (cfg.eps > limit && !cfg.allow_outside_range) {
        return Err(ExperimentError::Parameter(format!(
            "eps = {} is outside (0, {limit:.6}], the range min{{(1-γ)(1-cγ)/12, (5/192)(1-γ)(1-cγ)²}} at c = {}",
            cfg.eps, cfg.c
        )));
    }
    let t = theory::epoch2_phase_budget(cfg.c, cfg.eps)?;
    let budget = cfg.eps * cfg.n as f64;

    let per_trial: Vec<(Epoch2TrialRow, Vec<u64>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = rng::trial_seed(cfg.seed, i);
            let mut rng = rng::rng_from_seed(seed);
            let mut g = sample_er_with(cfg.n, params.p, &mut rng);
            let f0_epoch1 = run_epoch1(&mut g, t).final_f0();
            let trace = run_epoch2(&mut g, &mut rng);
            let mut hist = Vec::new();
            for &y in &trace.y_values {
                if hist.len() <= y {
                    hist.resize(y + 1, 0u64);
                }
                hist[y] += 1;
            }
            let row = Epoch2TrialRow {
                trial_index: i,
                seed,
                f0_epoch1,
                core_f0: g.non_isolated_count(),
                epoch2_deleted: trace.deleted_total,
                sum_y: trace.y_values.iter().map(|&y| y as u64).sum(),
                mean_y: trace.mean_y(),
                within_budget: trace.deleted_total as f64 <= budget,
            };
            (row, hist)
        })
        .collect();

    // At least the y = 0 bin, so an empty epoch still yields a table.
    let mut hist: Vec<u64> = vec![0];
    let mut rows = Vec::with_capacity(per_trial.len());
    for (row, h) in per_trial {
        if hist.len() < h.len() {
            hist.resize(h.len(), 0);
        }
        for (a, b) in hist.iter_mut().zip(&h) {
            *a += b;
        }
        rows.push(row);
    }
    let total_steps: u64 = rows.iter().map(|r| r.epoch2_deleted as u64).sum();
    let sum_y: u64 = rows.iter().map(|r| r.sum_y).sum();
    let trials = rows.len() as f64;
    let summary = Epoch2Summary {
        n: cfg.n,
        c: cfg.c,
        eps: cfg.eps,
        eps_limit: limit,
        t,
        trials: cfg.trials,
        base_seed: cfg.seed,
        total_steps,
        mean_y: (total_steps > 0).then(|| sum_y as f64 / total_steps as f64),
        drift_bound: theory::drift_bound(cfg.c)?,
        mean_deleted: total_steps as f64 / trials,
        max_deleted: rows.iter().map(|r| r.epoch2_deleted).max().unwrap_or(0),
        fraction_within_budget: rows.iter().filter(|r| r.within_budget).count() as f64 / trials,
    };
    let histogram = hist
        .into_iter()
        .enumerate()
        .map(|(y, count)| YHistRow { y, count })
        .collect();
    Ok(Epoch2Report { summary, histogram, trials: rows })
}

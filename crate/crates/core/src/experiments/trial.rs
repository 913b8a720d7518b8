use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::collapse::{count_dominated_pairs, has_universal_vertex, run_core, run_epoch1, run_epoch2};
use crate::graph::{sample_er_with, GraphParams};
use crate::oracle::{euler_characteristic, DEFAULT_N_LIMIT};
use crate::rng;
use crate::theory;

/// One trial of the two-epoch collapse. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub c: f64,
    pub t: usize,
    pub trial_index: u64,
    /// Seed of this trial's stream; `rng_from_seed(seed)` replays it alone.
    pub seed: u64,
    pub f0_epoch1: usize,
    pub core_f0: usize,
    /// Productive phases of a phase-only run from the same sample to its core.
    pub phases_to_core: usize,
    pub epoch2_deleted: usize,
    pub mean_y: Option<f64>,
    pub max_degree: usize,
    pub dominated_pairs: usize,
    pub has_universal: bool,
    pub wall_time_ms: Option<u64>,
    pub expected_f0_after_t: f64,
    pub predicted_core_f0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseConfig {
    pub n: usize,
    pub c: f64,
    /// First-epoch phases; [`default_phase_budget`] when `None`.
    pub t: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    /// Fill `wall_time_ms`. Off by default so outputs are reproducible byte for byte.
    pub timings: bool,
}

impl CollapseConfig {
    pub fn new(n: usize, c: f64, trials: u64, seed: u64) -> Self {
        Self { n, c, t: None, trials, seed, timings: false }
    }

    pub fn phase_budget(&self) -> Result<usize, ExperimentError> {
        match self.t {
            Some(t) => Ok(t),
            None => default_phase_budget(self.c),
        }
    }
}

/// `rounds_for_epsilon(c, 0.01)` above the threshold; zero phases (all work in the second epoch) for `c <= 1`.
pub fn default_phase_budget(c: f64) -> Result<usize, ExperimentError> {
    if c > 1.0 {
        Ok(theory::rounds_for_epsilon(c, 0.01)?)
    } else {
        Ok(0)
    }
}

/// Sample, prune `t` phases, finish with the second epoch on the same stream.
///
/// For graphs within the oracle limit the Euler characteristic of the clique
/// complex is compared before and after; a mismatch is an error.
pub fn run_trial(n: usize, c: f64, t: usize, base_seed: u64, index: u64, timings: bool) -> Result<ExperimentRecord, ExperimentError> {
    let params = GraphParams::with_density(n, c, 0)?;
    let seed = rng::trial_seed(base_seed, index);
    let start = Instant::now();
    let mut rng = rng::rng_from_seed(seed);
    let mut g = sample_er_with(n, params.p, &mut rng);

    let max_degree = g.max_degree();
    let dominated_pairs = count_dominated_pairs(&g);
    let has_universal = has_universal_vertex(&g);
    let chi_before = if n <= DEFAULT_N_LIMIT { Some(euler_characteristic(&g, DEFAULT_N_LIMIT)?) } else { None };

    let phases_to_core = run_core(&mut g.clone()).productive_phases();
    let f0_epoch1 = run_epoch1(&mut g, t).final_f0();
    let epoch2 = run_epoch2(&mut g, &mut rng);
    let core_f0 = g.non_isolated_count();

    if let Some(before) = chi_before {
        let after = euler_characteristic(&g, DEFAULT_N_LIMIT)?;
        if before != after {
            return Err(ExperimentError::Audit {
                trial: index,
                detail: format!("Euler characteristic changed from {before} to {after}"),
            });
        }
    }
    let wall_time_ms = timings.then(|| start.elapsed().as_millis() as u64);

    Ok(ExperimentRecord {
        n,
        c,
        t,
        trial_index: index,
        seed,
        f0_epoch1,
        core_f0,
        phases_to_core,
        epoch2_deleted: epoch2.deleted_total,
        mean_y: epoch2.mean_y(),
        max_degree,
        dominated_pairs,
        has_universal,
        wall_time_ms,
        expected_f0_after_t: theory::expected_f0_after_t(c, n, t),
        predicted_core_f0: theory::core_size_prediction(c, n).ok(),
    })
}

/// All trials of `cfg`, in trial-index order regardless of scheduling.
pub fn cmd_collapse(cfg: &CollapseConfig) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    if cfg.trials == 0 {
        return Err(ExperimentError::Parameter("trials must be at least 1".into()));
    }
    GraphParams::with_density(cfg.n, cfg.c, 0)?;
    let t = cfg.phase_budget()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg.n, cfg.c, t, cfg.seed, i, cfg.timings))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_invariants_and_replay() {
        let cfg = CollapseConfig { t: Some(3), ..CollapseConfig::new(400, 1.5, 6, 11) };
        let rows = cmd_collapse(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.trial_index, i as u64);
            assert!(r.core_f0 <= r.f0_epoch1 && r.f0_epoch1 <= r.n);
            assert!(r.wall_time_ms.is_none());
            let again = run_trial(400, 1.5, 3, 11, i as u64, false).unwrap();
            assert_eq!(&again, r);
        }
    }

    #[test]
    fn small_graphs_pass_the_euler_audit() {
        for c in [0.5, 2.0, 5.0, 12.0] {
            let cfg = CollapseConfig { t: Some(2), ..CollapseConfig::new(25, c, 20, 3) };
            cmd_collapse(&cfg).unwrap();
        }
    }

    #[test]
    fn extra_trials_leave_earlier_ones_alone() {
        let a = cmd_collapse(&CollapseConfig::new(200, 2.0, 3, 5)).unwrap();
        let b = cmd_collapse(&CollapseConfig::new(200, 2.0, 5, 5)).unwrap();
        assert_eq!(&b[..3], &a[..]);
    }

    #[test]
    fn default_budget() {
        assert_eq!(default_phase_budget(1.5).unwrap(), 11);
        assert_eq!(default_phase_budget(0.5).unwrap(), 0);
    }

    #[test]
    fn rejects_zero_trials_and_bad_density() {
        assert!(cmd_collapse(&CollapseConfig::new(10, 2.0, 0, 1)).is_err());
        assert!(cmd_collapse(&CollapseConfig::new(10, 20.0, 1, 1)).is_err());
    }
}

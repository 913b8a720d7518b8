use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::theory::{self, Prefactor, TheoryError, DEFAULT_TOL};
use crate::tree::estimate_gamma;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub t: usize,
    pub gamma_t: f64,
    /// `γ_{t+1} - γ_t`; absent on the last row.
    pub gap: Option<f64>,
    /// `γ - γ_t`; absent for `c <= 1`.
    pub dist_to_limit: Option<f64>,
    pub gamma_limit: Option<f64>,
}

/// `γ_0 ..= γ_T`, with the limit columns when `c > 1`.
pub fn gamma_rows(c: f64, horizon: usize) -> Result<Vec<GammaRow>, ExperimentError> {
    if !(c > 0.0) {
        return Err(TheoryError::NonPositiveDensity(c).into());
    }
    let table = if c > 1.0 { theory::gamma_table(c, horizon, DEFAULT_TOL)? } else { theory::gamma_sequence(c, horizon) };
    Ok((0..=table.horizon())
        .map(|t| GammaRow {
            t,
            gamma_t: table.gammas[t],
            gap: table.gaps.get(t).copied(),
            dist_to_limit: table.dist.get(t).copied(),
            gamma_limit: table.gamma_star,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictRow {
    pub t: usize,
    pub expected_f0: f64,
    pub f0_fraction: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub gap: f64,
    pub gap_lower: f64,
    pub gap_upper: f64,
    pub delta_lower: f64,
    pub delta_upper: f64,
    pub eps_lower: f64,
    pub eps_upper: f64,
}

/// First-epoch predictions for `t = 0..=T` at size `n`. `printed` switches the
/// bound prefactor from `e^{-c}` to the `e^{c}` variant.
pub fn predict_rows(c: f64, n: usize, horizon: usize, printed: bool) -> Result<Vec<PredictRow>, ExperimentError> {
    let table = theory::gamma_table(c, horizon + 2, DEFAULT_TOL)?;
    let prefactor = if printed { Prefactor::Printed } else { Prefactor::Telescoped };
    (0..=horizon)
        .map(|t| {
            let b = theory::epsilon_bounds_with(c, t, prefactor)?;
            Ok(PredictRow {
                t,
                expected_f0: table.f0_fraction(t) * n as f64,
                f0_fraction: table.f0_fraction(t),
                delta: table.delta(t),
                epsilon: table.epsilon(t),
                gap: table.gaps[t],
                gap_lower: b.gap_lower,
                gap_upper: b.gap_upper,
                delta_lower: b.delta_lower,
                delta_upper: b.delta_upper,
                eps_lower: b.eps_lower,
                eps_upper: b.eps_upper,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeRow {
    pub t: usize,
    pub trials: u64,
    pub gamma_hat: f64,
    pub gamma_theory: f64,
    pub stderr: f64,
    pub z: f64,
}

/// Monte-Carlo `γ̂_t` for `t = 1..=t_max` against the recursion.
pub fn tree_rows(c: f64, t_max: usize, trials: u64, seed: u64) -> Result<Vec<TreeRow>, ExperimentError> {
    if trials == 0 || t_max == 0 {
        return Err(ExperimentError::Parameter("trials and t must be at least 1".into()));
    }
    let table = theory::gamma_sequence(c, t_max);
    Ok((1..=t_max)
        .map(|t| {
            let stats = estimate_gamma(c, t, trials, seed);
            let theory_value = table.gammas[t];
            let stderr = stats.gamma_stderr(theory_value);
            let hat = stats.gamma_hat();
            TreeRow {
                t,
                trials,
                gamma_hat: hat,
                gamma_theory: theory_value,
                stderr,
                z: if stderr > 0.0 { (hat - theory_value) / stderr } else { 0.0 },
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeHistRow {
    pub k: usize,
    pub count: u64,
    pub pmf_hat: f64,
    pub pmf_theory: f64,
}

/// Root-degree histogram after `t - 1` steps of root collapsing on depth-`t` trees.
pub fn tree_hist_rows(c: f64, t: usize, trials: u64, seed: u64) -> Result<Vec<TreeHistRow>, ExperimentError> {
    if trials == 0 || t == 0 {
        return Err(ExperimentError::Parameter("trials and t must be at least 1".into()));
    }
    let stats = estimate_gamma(c, t, trials, seed);
    Ok((0..stats.root_degree_hist.len())
        .map(|k| TreeHistRow {
            k,
            count: stats.root_degree_hist[k],
            pmf_hat: stats.pmf_hat(k),
            pmf_theory: theory::root_degree_pmf(c, t, k),
        })
        .collect())
}

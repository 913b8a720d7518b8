use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mean_and_std, ExperimentError};
use crate::collapse::count_dominated_pairs;
use crate::graph::{sample_er_with, GraphError};
use crate::rng;
use crate::theory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `p = λ ln n / n`; success is a graph with no dominated pair.
    Sparse,
    /// `p = 1 - λ ln n / n`; success is a graph with a universal vertex.
    Dense,
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sparse" => Ok(Side::Sparse),
            "dense" => Ok(Side::Dense),
            other => Err(format!("unknown side {other:?}, expected sparse or dense")),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Sparse => "sparse",
            Side::Dense => "dense",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTransitionConfig {
    pub side: Side,
    pub n: usize,
    pub lambda: f64,
    /// Explicit edge probability, used instead of the `λ` substitution.
    pub p: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl PhaseTransitionConfig {
    pub fn edge_probability(&self) -> Result<f64, ExperimentError> {
        let p = match self.p {
            Some(p) => p,
            None => {
                if !(self.lambda > 0.0) {
                    return Err(ExperimentError::Parameter(format!("lambda = {} must be positive", self.lambda)));
                }
                let nf = self.n as f64;
                let q = self.lambda * nf.ln() / nf;
                match self.side {
                    Side::Sparse => q,
                    Side::Dense => 1.0 - q,
                }
            }
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidProbability(p).into());
        }
        Ok(p)
    }
}

/// Summary of one phase-transition run.
///
/// `mean_count` is the ordered dominated-pair count (sparse) or the number of
/// universal vertices (dense); `expected_count` is its exact mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTransitionRow {
    pub side: Side,
    pub n: usize,
    pub lambda: Option<f64>,
    pub p: f64,
    pub trials: u64,
    pub base_seed: u64,
    pub success_fraction: f64,
    pub mean_count: f64,
    pub count_stderr: f64,
    pub expected_count: f64,
}

fn trial_count(side: Side, n: usize, p: f64, seed: u64) -> usize {
    let mut rng = rng::rng_from_seed(seed);
    match side {
        Side::Sparse => count_dominated_pairs(&sample_er_with(n, p, &mut rng)),
        // G(n, p) is the complement of G(n, 1 - p); universal vertices of G are
        // the isolated vertices of its complement, which is sparse here.
        Side::Dense => {
            let h = sample_er_with(n, 1.0 - p, &mut rng);
            if n == 1 {
                1
            } else {
                h.alive_vertices().filter(|&v| h.neighbors(v).is_empty()).count()
            }
        }
    }
}

pub fn phase_transition(cfg: &PhaseTransitionConfig) -> Result<PhaseTransitionRow, ExperimentError> {
    if cfg.trials == 0 {
        return Err(ExperimentError::Parameter("trials must be at least 1".into()));
    }
    let p = cfg.edge_probability()?;
    let counts: Vec<usize> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| trial_count(cfg.side, cfg.n, p, rng::trial_seed(cfg.seed, i)))
        .collect();
    let successes = counts
        .iter()
        .filter(|&&k| match cfg.side {
            Side::Sparse => k == 0,
            Side::Dense => k > 0,
        })
        .count();
    let as_f64: Vec<f64> = counts.iter().map(|&k| k as f64).collect();
    let (mean, std) = mean_and_std(&as_f64);
    let expected = match cfg.side {
        Side::Sparse => 2.0 * theory::expected_dominated_pairs(cfg.n, p),
        Side::Dense => theory::expected_universal_vertices(cfg.n, p),
    };
    Ok(PhaseTransitionRow {
        side: cfg.side,
        n: cfg.n,
        lambda: cfg.p.is_none().then_some(cfg.lambda),
        p,
        trials: cfg.trials,
        base_seed: cfg.seed,
        success_fraction: successes as f64 / cfg.trials as f64,
        mean_count: mean,
        count_stderr: std / (cfg.trials as f64).sqrt(),
        expected_count: expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(side: Side, n: usize, lambda: f64, p: Option<f64>, trials: u64) -> PhaseTransitionConfig {
        PhaseTransitionConfig { side, n, lambda, p, trials, seed: 17 }
    }

    #[test]
    fn substitution_and_domain() {
        let s = cfg(Side::Sparse, 1000, 1.5, None, 1);
        assert!((s.edge_probability().unwrap() - 1.5 * 1000f64.ln() / 1000.0).abs() < 1e-15);
        assert!(cfg(Side::Dense, 3, 5.0, None, 1).edge_probability().is_err());
        assert!(cfg(Side::Sparse, 10, 0.0, None, 1).edge_probability().is_err());
        assert!(cfg(Side::Sparse, 10, 1.0, Some(1.2), 1).edge_probability().is_err());
    }

    #[test]
    fn dense_complement_counts_universal_vertices() {
        // Direct count on G against the complement trick, same p.
        let p = 0.9;
        let mut direct = 0.0;
        let mut via = 0.0;
        for i in 0..4000u64 {
            let seed = rng::trial_seed(3, i);
            let g = sample_er_with(12, p, &mut rng::rng_from_seed(seed));
            direct += g.universal_vertex_count() as f64;
            via += trial_count(Side::Dense, 12, p, seed) as f64;
        }
        let expected = theory::expected_universal_vertices(12, p) * 4000.0;
        // Both estimators have sd about sqrt(4000 * var) with var < 4 here.
        assert!((direct - expected).abs() < 4.0 * (4000f64 * 4.0).sqrt());
        assert!((via - expected).abs() < 4.0 * (4000f64 * 4.0).sqrt());
    }

    #[test]
    fn complete_and_empty_extremes() {
        let full = phase_transition(&cfg(Side::Dense, 6, 0.0, Some(1.0), 3)).unwrap();
        assert_eq!(full.success_fraction, 1.0);
        assert_eq!(full.mean_count, 6.0);
        let empty = phase_transition(&cfg(Side::Sparse, 6, 0.0, Some(0.0), 3)).unwrap();
        assert_eq!(empty.success_fraction, 1.0);
        assert_eq!(empty.expected_count, 0.0);
    }
}

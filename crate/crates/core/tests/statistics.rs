//! Statistical checks on the sampler and the collapse records. Seeds are fixed.

use collapse_lab::experiments::{cmd_collapse, CollapseConfig};
use collapse_lab::graph::sample_er_edges;
use collapse_lab::rng::{rng_from_seed, trial_seed};

#[test]
fn er_edge_count_mean() {
    let (n, p) = (10_000usize, 1.5 / 10_000.0);
    let pairs = (n * (n - 1) / 2) as f64;
    let counts: Vec<f64> = (0..100)
        .map(|i| sample_er_edges(n, p, &mut rng_from_seed(trial_seed(7, i))).len() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / 100.0;
    let se = (pairs * p * (1.0 - p) / 100.0).sqrt();
    assert!((mean - pairs * p).abs() < 3.0 * se, "mean {mean} vs {}", pairs * p);
}

#[test]
fn er_pair_frequency_is_uniform() {
    // Edges incident to vertex 0 against the last vertex pairs: both ends of the rank order.
    let (n, p, trials) = (2000usize, 3.0 / 2000.0, 400u64);
    let (mut head, mut tail) = (0u64, 0u64);
    for i in 0..trials {
        for (u, v) in sample_er_edges(n, p, &mut rng_from_seed(trial_seed(8, i))) {
            if u == 0 {
                head += 1;
            }
            if v as usize == n - 1 {
                tail += 1;
            }
        }
    }
    let expected = trials as f64 * (n - 1) as f64 * p;
    let sd = expected.sqrt();
    assert!((head as f64 - expected).abs() < 4.0 * sd, "{head} vs {expected}");
    assert!((tail as f64 - expected).abs() < 4.0 * sd, "{tail} vs {expected}");
}

#[test]
fn max_degree_exceeding_log_n_becomes_rarer() {
    let frac = |n: usize| {
        let rows = cmd_collapse(&CollapseConfig { t: Some(1), ..CollapseConfig::new(n, 1.5, 20, 3) }).unwrap();
        rows.iter().filter(|r| r.max_degree as f64 > (n as f64).ln()).count() as f64 / 20.0
    };
    let (small, large) = (frac(1000), frac(10_000));
    assert!(large <= small, "{large} > {small}");
}

#[test]
fn first_epoch_dispersion_scales_below_n_two_thirds() {
    for n in [10_000usize, 40_000] {
        let rows = cmd_collapse(&CollapseConfig { t: Some(5), ..CollapseConfig::new(n, 1.5, 30, 11) }).unwrap();
        let xs: Vec<f64> = rows.iter().map(|r| r.f0_epoch1 as f64).collect();
        let mean = xs.iter().sum::<f64>() / 30.0;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 29.0).sqrt();
        let ratio = sd / (n as f64).powf(2.0 / 3.0);
        assert!(ratio < 3.0, "n={n}: sd/n^(2/3) = {ratio}");
    }
}

#[test]
fn subcritical_collapses_almost_entirely() {
    let rows = cmd_collapse(&CollapseConfig { t: Some(10), ..CollapseConfig::new(100, 0.5, 10, 5) }).unwrap();
    let empty = rows.iter().filter(|r| r.core_f0 == 0).count();
    assert!(empty >= 7, "{empty} of 10 trials reached an empty core");
    assert!(rows.iter().all(|r| r.predicted_core_f0.is_none()));
}

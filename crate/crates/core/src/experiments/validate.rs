use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::collapse::{find_dominator, run_core, run_core_by, run_epoch1_observed, run_epoch2_observed};
use crate::graph::{sample_er_with, AdjacencyGraph, VertexId};
use crate::oracle::{euler_characteristic, is_dominated_via_link, non_isolated_isomorphic};
use crate::rng;
use crate::theory::{self, Prefactor, DEFAULT_TOL};

/// Graph-native domination test under audit.
pub type DominationTest = fn(&AdjacencyGraph, VertexId) -> bool;

fn containment_test(g: &AdjacencyGraph, v: VertexId) -> bool {
    matches!(find_dominator(g, v), Ok(Some(_)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationConfig {
    pub graphs: u64,
    pub max_n: usize,
    pub orders: usize,
    pub seed: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { graphs: 100, max_n: 25, orders: 5, seed: 0x5EED }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        writeln!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

pub fn validate(cfg: &ValidationConfig) -> Result<ValidationReport, ExperimentError> {
    validate_with(cfg, containment_test)
}

/// Per-graph findings, merged in graph order.
#[derive(Default)]
struct GraphAudit {
    vertices_checked: u64,
    oracle_mismatch: Option<String>,
    removals: u64,
    euler_mismatch: Option<String>,
    cores_compared: u64,
    core_mismatch: Option<String>,
    identical_sets: u64,
}

fn shuffle(items: &mut [VertexId], rng: &mut rng::TrialRng) {
    for i in (1..items.len()).rev() {
        let j = rng::below(rng, i + 1);
        items.swap(i, j);
    }
}

fn alive_set(g: &AdjacencyGraph) -> Vec<VertexId> {
    g.alive_vertices().filter(|&v| !g.neighbors(v).is_empty()).collect()
}

fn audit_graph(cfg: &ValidationConfig, index: u64, test: DominationTest) -> Result<GraphAudit, ExperimentError> {
    let limit = cfg.max_n.max(2);
    let mut rng = rng::rng_from_seed(rng::trial_seed(cfg.seed, index));
    let n = 2 + rng::below(&mut rng, limit - 1);
    let p = 0.1 + 0.6 * rng::unit_f64(&mut rng);
    let g = sample_er_with(n, p, &mut rng);
    let mut audit = GraphAudit::default();

    let compare_all = |h: &AdjacencyGraph, audit: &mut GraphAudit, when: &str| -> Result<(), ExperimentError> {
        for v in h.alive_vertices() {
            audit.vertices_checked += 1;
            let link = is_dominated_via_link(h, v, limit)?;
            if link != test(h, v) && audit.oracle_mismatch.is_none() {
                audit.oracle_mismatch =
                    Some(format!("graph {index} (n={n}) {when}: vertex {v} link-cone={link}, containment={}", !link));
            }
        }
        Ok(())
    };
    compare_all(&g, &mut audit, "initially")?;

    let chi = euler_characteristic(&g, limit)?;
    let mut failure: Option<ExperimentError> = None;

    // Phase pruning to the core, auditing after every single removal.
    let mut core = g.clone();
    run_epoch1_observed(&mut core, usize::MAX, |h, v| {
        if failure.is_some() {
            return;
        }
        audit.removals += 1;
        if let Err(e) = compare_all(h, &mut audit, &format!("after removing {v}")) {
            failure = Some(e);
            return;
        }
        match euler_characteristic(h, limit) {
            Ok(x) if x != chi && audit.euler_mismatch.is_none() => {
                audit.euler_mismatch = Some(format!("graph {index}: χ {chi} -> {x} after removing {v}"));
            }
            Ok(_) => {}
            Err(e) => failure = Some(e.into()),
        }
    });
    if let Some(e) = failure.take() {
        return Err(e);
    }

    // Random single removals on the same sample.
    let mut second = g.clone();
    run_epoch2_observed(&mut second, &mut rng, |h, _, _| {
        if failure.is_some() {
            return;
        }
        audit.removals += 1;
        match euler_characteristic(h, limit) {
            Ok(x) if x != chi && audit.euler_mismatch.is_none() => {
                audit.euler_mismatch = Some(format!("graph {index}: χ {chi} -> {x} during single removals"));
            }
            Ok(_) => {}
            Err(e) => failure = Some(e.into()),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let chi_second = euler_characteristic(&second, limit)?;
    if chi_second != chi && audit.euler_mismatch.is_none() {
        audit.euler_mismatch = Some(format!("graph {index}: χ {chi} -> {chi_second} at the single-removal core"));
    }

    // Cores under other processing orders must agree up to isomorphism.
    let reference = alive_set(&core);
    let mut candidates = vec![second];
    for _ in 0..cfg.orders {
        let mut h = g.clone();
        let mut order_rng = rng::rng_from_seed(rng::splitmix64_mix(rng::unit_f64(&mut rng).to_bits()));
        run_core_by(&mut h, |vs| shuffle(vs, &mut order_rng));
        candidates.push(h);
    }
    for h in &candidates {
        audit.cores_compared += 1;
        let same_size = h.non_isolated_count() == core.non_isolated_count();
        if !(same_size && non_isolated_isomorphic(h, &core)) && audit.core_mismatch.is_none() {
            audit.core_mismatch = Some(format!(
                "graph {index}: core with {} vertices not isomorphic to reference with {}",
                h.non_isolated_count(),
                core.non_isolated_count()
            ));
        }
        if alive_set(h) == reference {
            audit.identical_sets += 1;
        }
    }
    Ok(audit)
}

fn rate_sandwich() -> Result<CheckResult, ExperimentError> {
    let mut checked = 0;
    let mut violation = None;
    for c in [1.5, 2.0, 3.0] {
        let table = theory::gamma_table(c, 33, DEFAULT_TOL)?;
        for t in 0..=30 {
            let b = theory::epsilon_bounds(c, t)?;
            let (gap, delta, eps) = (table.gaps[t], table.delta(t), table.epsilon(t));
            checked += 1;
            let ok = b.gap_lower <= gap
                && gap <= b.gap_upper
                && b.delta_lower <= delta
                && delta <= b.delta_upper
                && b.eps_lower <= eps
                && eps <= b.eps_upper;
            if !ok && violation.is_none() {
                violation = Some(format!("violated at c={c}, t={t}"));
            }
        }
    }
    Ok(match violation {
        None => CheckResult::new("rate sandwich", true, format!("{checked} (c, t) points, gap/delta/epsilon within bounds")),
        Some(d) => CheckResult::new("rate sandwich", false, d),
    })
}

fn printed_counterexample() -> Result<CheckResult, ExperimentError> {
    let printed = theory::epsilon_bounds_with(1.5, 1, Prefactor::Printed)?;
    let gap = theory::gamma_sequence(1.5, 2).gaps[1];
    Ok(CheckResult::new(
        "printed prefactor counterexample",
        printed.gap_lower > gap,
        format!("c=1.5, t=1: e^c lower bound {:.4} vs gap {:.4}", printed.gap_lower, gap),
    ))
}

fn pmf_normalization() -> CheckResult {
    let mut worst: f64 = 0.0;
    for c in [0.5, 1.5, 3.0, 5.0] {
        for t in 1..=6 {
            let total: f64 = (0..200).map(|k| theory::root_degree_pmf(c, t, k)).sum();
            let ge2 = 1.0 - theory::root_degree_pmf(c, t, 0) - theory::root_degree_pmf(c, t, 1);
            worst = worst.max((total - 1.0).abs()).max((ge2 - theory::prob_degree_ge2(c, t)).abs());
        }
    }
    CheckResult::new("pmf normalization", worst < 1e-12, format!("max error {worst:.1e}"))
}

fn fixed_point() -> Result<CheckResult, ExperimentError> {
    let mut detail = Vec::new();
    let mut ok = true;
    for c in [1.5, 2.0, 3.0, 4.0, 5.0] {
        let g = theory::gamma_fixed_point(c, DEFAULT_TOL)?;
        let residual = ((-c * (1.0 - g)).exp() - g).abs();
        ok &= residual < 1e-12 && c * g < 1.0;
        detail.push(format!("c={c}: cγ={:.6}", c * g));
    }
    Ok(CheckResult::new("fixed point", ok, detail.join(", ")))
}

/// Runs every check. `test` stands in for the containment test in the equivalence check.
pub fn validate_with(cfg: &ValidationConfig, test: DominationTest) -> Result<ValidationReport, ExperimentError> {
    let audits: Vec<GraphAudit> = (0..cfg.graphs)
        .into_par_iter()
        .map(|i| audit_graph(cfg, i, test))
        .collect::<Result<_, _>>()?;
    let first = |f: fn(&GraphAudit) -> &Option<String>| audits.iter().find_map(|a| f(a).clone());
    let vertices: u64 = audits.iter().map(|a| a.vertices_checked).sum();
    let removals: u64 = audits.iter().map(|a| a.removals).sum();
    let cores: u64 = audits.iter().map(|a| a.cores_compared).sum();
    let identical: u64 = audits.iter().map(|a| a.identical_sets).sum();

    let mut checks = Vec::new();
    checks.push(match first(|a| &a.oracle_mismatch) {
        None => CheckResult::new("oracle equivalence", true, format!("{vertices} vertex checks over {} graphs", cfg.graphs)),
        Some(d) => CheckResult::new("oracle equivalence", false, d),
    });
    checks.push(match first(|a| &a.euler_mismatch) {
        None => CheckResult::new("euler invariance", true, format!("{removals} elementary removals")),
        Some(d) => CheckResult::new("euler invariance", false, d),
    });
    checks.push(match first(|a| &a.core_mismatch) {
        None => CheckResult::new(
            "core uniqueness",
            true,
            format!("{cores} alternative cores isomorphic to the reference; {identical} with the same vertex set"),
        ),
        Some(d) => CheckResult::new("core uniqueness", false, d),
    });
    checks.push(rate_sandwich()?);
    checks.push(printed_counterexample()?);
    checks.push(pmf_normalization());
    checks.push(fixed_point()?);

    // Phase pruning to the core is itself a fixed point of the containment test.
    let mut g = sample_er_with(200, 3.0 / 200.0, &mut rng::rng_from_seed(cfg.seed));
    let trace = run_core(&mut g);
    let residual = g.alive_vertices().filter(|&v| containment_test(&g, v)).count();
    checks.push(CheckResult::new(
        "core has no dominated vertex",
        trace.reached_core && residual == 0,
        format!("n=200 sample, {} phases, {residual} dominated left", trace.phases.len()),
    ));
    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ValidationConfig {
        ValidationConfig { graphs: 12, max_n: 14, orders: 3, seed: 1 }
    }

    #[test]
    fn passes_and_is_deterministic() {
        let a = validate(&small()).unwrap();
        assert!(a.passed(), "{a}");
        let b = validate(&small()).unwrap();
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn broken_subset_test_is_caught() {
        // Open neighborhoods instead of closed ones.
        fn broken(g: &AdjacencyGraph, v: VertexId) -> bool {
            g.neighbors(v).iter().any(|&w| g.neighbors(v).iter().all(|&x| x == w || g.neighbors(w).contains(&x)) && g.degree(v).unwrap() > 1)
        }
        let r = validate_with(&small(), broken).unwrap();
        assert!(!r.passed());
        assert!(r.failures().any(|c| c.name.contains("oracle equivalence")));
    }
}

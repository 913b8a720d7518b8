//! Poisson Galton–Watson trees under root collapsing.
//!
//! A depth-`t` tree is grown breadth first: every node above depth `t` draws a
//! Poisson(`c`) number of children. Root collapsing then removes, at each step,
//! every non-root vertex of degree one, and never the root. The probability
//! that the root is isolated within `t - 1` steps is the recursion value `γ_t`.

use rand::RngCore;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::graph::AdjacencyGraph;
use crate::rng;
use crate::theory;

const NO_PARENT: u32 = u32::MAX;

/// Flat breadth-first tree. Children of a node occupy one contiguous index range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonTree {
    pub parent: Vec<u32>,
    pub depth: Vec<u32>,
    pub first_child: Vec<u32>,
    pub child_count: Vec<u32>,
    pub max_depth: u32,
}

impl PoissonTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root_degree(&self) -> u32 {
        self.child_count[0]
    }

    /// Builds a tree from a breadth-first list of child counts.
    pub fn from_child_counts(counts: &[u32], max_depth: u32) -> Self {
        let mut tree = Self::root(max_depth);
        let mut next = 0usize;
        let mut i = 0usize;
        while i < tree.len() {
            let k = if tree.depth[i] < max_depth {
                let k = counts.get(next).copied().unwrap_or(0);
                next += 1;
                k
            } else {
                0
            };
            tree.attach(i, k);
            i += 1;
        }
        tree
    }

    fn root(max_depth: u32) -> Self {
        Self {
            parent: vec![NO_PARENT],
            depth: vec![0],
            first_child: vec![0],
            child_count: vec![0],
            max_depth,
        }
    }

    fn attach(&mut self, node: usize, k: u32) {
        let first = self.len() as u32;
        self.first_child[node] = first;
        self.child_count[node] = k;
        let d = self.depth[node] + 1;
        for _ in 0..k {
            self.parent.push(node as u32);
            self.depth.push(d);
            self.first_child.push(0);
            self.child_count.push(0);
        }
    }

    pub fn to_graph(&self) -> AdjacencyGraph {
        let edges: Vec<(u32, u32)> = (1..self.len()).map(|i| (self.parent[i], i as u32)).collect();
        AdjacencyGraph::from_edges(self.len(), &edges).expect("tree edges are valid")
    }
}

/// Grows a depth-`depth` tree; every node above the last level draws Poisson(`c`) children.
pub fn sample_tree<R: RngCore + ?Sized>(c: f64, depth: u32, rng: &mut R) -> PoissonTree {
    let mut tree = PoissonTree::root(depth);
    let mut i = 0usize;
    while i < tree.len() {
        if tree.depth[i] < depth {
            let k = rng::poisson(rng, c);
            tree.attach(i, k);
        }
        i += 1;
    }
    tree
}

/// Outcome of root collapsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootCollapse {
    /// First step after which the root has degree 0; `None` if not reached within the budget.
    pub isolated_after: Option<usize>,
    /// Root degree after `s` steps, for every executed `s` (index 0 is the initial degree).
    pub root_degree_by_step: Vec<u32>,
}

impl RootCollapse {
    /// Root degree after `s` steps; once the process has stopped the degree stays put.
    pub fn root_degree_after(&self, s: usize) -> u32 {
        let last = self.root_degree_by_step.len() - 1;
        self.root_degree_by_step[s.min(last)]
    }
}

/// Each step removes all current non-root degree-one vertices at once.
pub fn root_collapse(tree: &PoissonTree, max_steps: usize) -> RootCollapse {
    let n = tree.len();
    // Either 0 children (non-root leaf) or children still alive.
    let mut live_children: Vec<u32> = tree.child_count.clone();
    let mut frontier: Vec<u32> = (1..n as u32).filter(|&i| tree.child_count[i as usize] == 0).collect();
    let mut root_degree = live_children[0];
    let mut by_step = vec![root_degree];
    if root_degree == 0 {
        return RootCollapse { isolated_after: Some(0), root_degree_by_step: by_step };
    }
    let mut next = Vec::new();
    for step in 1..=max_steps {
        if frontier.is_empty() {
            break;
        }
        next.clear();
        for &leaf in &frontier {
            let p = tree.parent[leaf as usize];
            live_children[p as usize] -= 1;
            if p != 0 && live_children[p as usize] == 0 {
                next.push(p);
            }
        }
        std::mem::swap(&mut frontier, &mut next);
        root_degree = live_children[0];
        by_step.push(root_degree);
        if root_degree == 0 {
            return RootCollapse { isolated_after: Some(step), root_degree_by_step: by_step };
        }
    }
    RootCollapse { isolated_after: None, root_degree_by_step: by_step }
}

/// Aggregated Monte-Carlo statistics for depth-`t` trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeTrialStats {
    pub c_bits: u64,
    pub t: usize,
    pub trials: u64,
    /// `isolated_by_step[s]`: trees whose root is isolated after at most `s` steps, `s < t`.
    pub isolated_by_step: Vec<u64>,
    /// Root degree after `t - 1` steps.
    pub root_degree_hist: Vec<u64>,
}

impl TreeTrialStats {
    fn empty(c: f64, t: usize) -> Self {
        Self {
            c_bits: c.to_bits(),
            t,
            trials: 0,
            isolated_by_step: vec![0; t],
            root_degree_hist: Vec::new(),
        }
    }

    pub fn c(&self) -> f64 {
        f64::from_bits(self.c_bits)
    }

    fn record(&mut self, outcome: &RootCollapse) {
        self.trials += 1;
        if let Some(s) = outcome.isolated_after {
            for slot in self.isolated_by_step.iter_mut().skip(s) {
                *slot += 1;
            }
        }
        let k = outcome.root_degree_after(self.t - 1) as usize;
        if self.root_degree_hist.len() <= k {
            self.root_degree_hist.resize(k + 1, 0);
        }
        self.root_degree_hist[k] += 1;
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        for (a, b) in self.isolated_by_step.iter_mut().zip(&other.isolated_by_step) {
            *a += b;
        }
        if self.root_degree_hist.len() < other.root_degree_hist.len() {
            self.root_degree_hist.resize(other.root_degree_hist.len(), 0);
        }
        for (a, b) in self.root_degree_hist.iter_mut().zip(&other.root_degree_hist) {
            *a += b;
        }
        self
    }

    /// Estimate of `γ_t`.
    pub fn gamma_hat(&self) -> f64 {
        self.isolated_by_step[self.t - 1] as f64 / self.trials as f64
    }

    /// Binomial standard error of [`Self::gamma_hat`] under the theoretical `γ_t`.
    pub fn gamma_stderr(&self, gamma: f64) -> f64 {
        (gamma * (1.0 - gamma) / self.trials as f64).sqrt()
    }

    pub fn pmf_hat(&self, k: usize) -> f64 {
        self.root_degree_hist.get(k).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    /// Pearson χ² fit of the root-degree histogram against `γ_t^k`.
    pub fn degree_fit(&self) -> ChiSquareFit {
        let (c, t) = (self.c(), self.t);
        let probs: Vec<f64> = (0..=60).map(|k| theory::root_degree_pmf(c, t, k)).collect();
        let observed: Vec<u64> = (0..=60)
            .map(|k| self.root_degree_hist.get(k).copied().unwrap_or(0))
            .collect();
        chi_square_fit(&observed, &probs, self.trials, 5.0)
    }
}

/// Runs `trials` independent depth-`t` trees; trial `i` uses `trial_seed(seed, i)`.
///
/// Tree `i` for depth `t` is the depth-`t` truncation of tree `i` for any deeper
/// run with the same seed, so estimates at different `t` share random numbers.
pub fn estimate_gamma(c: f64, t: usize, trials: u64, seed: u64) -> TreeTrialStats {
    let t = t.max(1);
    (0..trials)
        .into_par_iter()
        .fold(
            || TreeTrialStats::empty(c, t),
            |mut acc, i| {
                let mut rng = rng::rng_from_seed(rng::trial_seed(seed, i));
                let tree = sample_tree(c, t as u32, &mut rng);
                acc.record(&root_collapse(&tree, t));
                acc
            },
        )
        .reduce(|| TreeTrialStats::empty(c, t), TreeTrialStats::merge)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub bins: usize,
}

impl ChiSquareFit {
    pub fn passes(&self, level: f64) -> bool {
        self.p_value >= level
    }
}

/// Pearson χ² on `observed` counts vs `probs`. Bins from the right are pooled
/// until every bin expects at least `min_expected`; the residual mass beyond the
/// listed bins joins the last pool.
pub fn chi_square_fit(observed: &[u64], probs: &[f64], total: u64, min_expected: f64) -> ChiSquareFit {
    let total_f = total as f64;
    let listed: f64 = probs.iter().sum();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc_obs = 0.0;
    let mut acc_exp = (1.0 - listed).max(0.0) * total_f;
    for k in (0..probs.len()).rev() {
        acc_obs += observed.get(k).copied().unwrap_or(0) as f64;
        acc_exp += probs[k] * total_f;
        if acc_exp >= min_expected {
            bins.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if acc_exp > 0.0 || acc_obs > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc_obs;
                last.1 += acc_exp;
            }
            None => bins.push((acc_obs, acc_exp)),
        }
    }
    let statistic: f64 = bins.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len().saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    ChiSquareFit { statistic, dof, p_value: 1.0 - dist.cdf(statistic), bins: bins.len() }
}

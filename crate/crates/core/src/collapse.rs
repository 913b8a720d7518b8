//! Strong collapse on flag-complex 1-skeletons.
//!
//! A vertex `v` of a flag complex is dominated by `w` exactly when
//! `N[v] ⊆ N[w]`, so every test here is a neighborhood containment on the
//! graph. Two drivers are provided: phase-parallel pruning (first epoch) and
//! uniform single removals until no dominated vertex is left (second epoch).

use std::io::{self, Write};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::graph::{AdjacencyGraph, GraphError, VertexId};
use crate::rng;

/// Smallest-id dominator of `v`, if any. Isolated vertices are never dominated.
pub fn find_dominator(g: &AdjacencyGraph, v: VertexId) -> Result<Option<VertexId>, GraphError> {
    g.check_alive(v)?;
    Ok(dominator_of(g, v, None))
}

/// Dominator search in `g`, or in `g` minus `skip` when given.
#[inline]
fn dominator_of(g: &AdjacencyGraph, v: VertexId, skip: Option<VertexId>) -> Option<VertexId> {
    g.neighbors(v)
        .iter()
        .copied()
        .filter(|&w| Some(w) != skip)
        .find(|&w| g.closed_subset_unchecked(v, w, skip))
}

#[inline]
pub(crate) fn is_dominated(g: &AdjacencyGraph, v: VertexId) -> bool {
    dominator_of(g, v, None).is_some()
}

/// All alive dominated vertices, ascending.
pub fn dominated_set(g: &AdjacencyGraph) -> Vec<VertexId> {
    g.alive_vertices().filter(|&v| is_dominated(g, v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phase_index: usize,
    pub removed: Vec<VertexId>,
    pub f0_after: usize,
    pub isolated_created: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseTrace {
    pub phases: Vec<PhaseReport>,
    pub initial_f0: usize,
    pub reached_core: bool,
}

impl CollapseTrace {
    /// Non-isolated count after the last executed phase.
    pub fn final_f0(&self) -> usize {
        self.phases.last().map_or(self.initial_f0, |p| p.f0_after)
    }

    pub fn removed_total(&self) -> usize {
        self.phases.iter().map(|p| p.removed.len()).sum()
    }

    /// Phases that removed at least one vertex.
    pub fn productive_phases(&self) -> usize {
        self.phases.iter().filter(|p| !p.removed.is_empty()).count()
    }

    /// `phase,f0_after,removed_count` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "phase,f0_after,removed_count")?;
        for p in &self.phases {
            writeln!(out, "{},{},{}", p.phase_index, p.f0_after, p.removed.len())?;
        }
        Ok(())
    }
}

/// One pruning phase with ascending-id processing.
///
/// The dominated set is snapshotted first; each snapshot vertex is then
/// re-checked against the current graph and removed only if still dominated,
/// so every removal is an elementary strong collapse. `phase_index` is 1 for a
/// standalone call; epoch drivers renumber it.
pub fn prune_phase(g: &mut AdjacencyGraph) -> PhaseReport {
    prune_phase_by(g, |_| {})
}

/// As [`prune_phase`], with `reorder` applied to the ascending snapshot before processing.
pub fn prune_phase_by<F>(g: &mut AdjacencyGraph, reorder: F) -> PhaseReport
where
    F: FnMut(&mut Vec<VertexId>),
{
    prune_phase_observed(g, reorder, |_, _| {})
}

/// As [`prune_phase_by`]; `observe(graph_after, removed)` runs after every single removal.
pub fn prune_phase_observed<F, O>(g: &mut AdjacencyGraph, mut reorder: F, mut observe: O) -> PhaseReport
where
    F: FnMut(&mut Vec<VertexId>),
    O: FnMut(&AdjacencyGraph, VertexId),
{
    let f0_before = g.non_isolated_count();
    let mut snapshot = dominated_set(g);
    reorder(&mut snapshot);
    let mut removed = Vec::new();
    for v in snapshot {
        if is_dominated(g, v) {
            g.remove_vertex(v).expect("snapshot vertex is alive");
            removed.push(v);
            observe(g, v);
        }
    }
    let f0_after = g.non_isolated_count();
    PhaseReport {
        phase_index: 1,
        isolated_created: f0_before - removed.len() - f0_after,
        removed,
        f0_after,
    }
}

/// Up to `t` pruning phases, stopping after the first phase that removes nothing.
pub fn run_epoch1(g: &mut AdjacencyGraph, t: usize) -> CollapseTrace {
    run_phases(g, t, |_| {})
}

/// Phases until a phase removes nothing. The final graph has no dominated vertex.
pub fn run_core(g: &mut AdjacencyGraph) -> CollapseTrace {
    run_phases(g, usize::MAX, |_| {})
}

/// [`run_core`] with a custom within-phase processing order.
pub fn run_core_by<F>(g: &mut AdjacencyGraph, reorder: F) -> CollapseTrace
where
    F: FnMut(&mut Vec<VertexId>),
{
    run_phases(g, usize::MAX, reorder)
}

/// [`run_epoch1`] with a per-removal observer, see [`prune_phase_observed`].
pub fn run_epoch1_observed<O>(g: &mut AdjacencyGraph, t: usize, observe: O) -> CollapseTrace
where
    O: FnMut(&AdjacencyGraph, VertexId),
{
    run_phases_observed(g, t, |_| {}, observe)
}

fn run_phases<F>(g: &mut AdjacencyGraph, t: usize, reorder: F) -> CollapseTrace
where
    F: FnMut(&mut Vec<VertexId>),
{
    run_phases_observed(g, t, reorder, |_, _| {})
}

fn run_phases_observed<F, O>(g: &mut AdjacencyGraph, t: usize, mut reorder: F, mut observe: O) -> CollapseTrace
where
    F: FnMut(&mut Vec<VertexId>),
    O: FnMut(&AdjacencyGraph, VertexId),
{
    let mut trace = CollapseTrace {
        phases: Vec::new(),
        initial_f0: g.non_isolated_count(),
        reached_core: false,
    };
    for index in 1..=t {
        let mut report = prune_phase_observed(g, &mut reorder, &mut observe);
        report.phase_index = index;
        let empty = report.removed.is_empty();
        trace.phases.push(report);
        if empty {
            trace.reached_core = true;
            break;
        }
    }
    trace
}

/// Alive vertices within distance two of `b`, excluding `b`, ascending.
pub fn distance_two_ball(g: &AdjacencyGraph, b: VertexId) -> Vec<VertexId> {
    let mut ball: Vec<VertexId> = Vec::new();
    for &u in g.neighbors(b) {
        ball.push(u);
        ball.extend(g.neighbors(u).iter().copied().filter(|&x| x != b));
    }
    ball.sort_unstable();
    ball.dedup();
    ball
}

/// Vertices that are not dominated in `g` but become dominated once `b` is deleted.
///
/// Only the distance-two ball of `b` can change status; `g` is not modified.
pub fn newly_dominated_after_deletion(
    g: &AdjacencyGraph,
    b: VertexId,
) -> Result<Vec<VertexId>, GraphError> {
    g.check_alive(b)?;
    Ok(distance_two_ball(g, b)
        .into_iter()
        .filter(|&v| !is_dominated(g, v) && dominator_of(g, v, Some(b)).is_some())
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Epoch2Trace {
    pub steps: usize,
    pub removed: Vec<VertexId>,
    pub y_values: Vec<usize>,
    pub deleted_total: usize,
}

impl Epoch2Trace {
    /// Sample mean of the per-step newly-dominated counts; `None` when no step ran.
    pub fn mean_y(&self) -> Option<f64> {
        if self.y_values.is_empty() {
            None
        } else {
            Some(self.y_values.iter().sum::<usize>() as f64 / self.y_values.len() as f64)
        }
    }
}

/// Dominated vertices with O(1) insert, delete and uniform pick.
struct DominatedPool {
    items: Vec<VertexId>,
    slot: Vec<u32>,
}

impl DominatedPool {
    const ABSENT: u32 = u32::MAX;

    fn new(n: usize, initial: Vec<VertexId>) -> Self {
        let mut slot = vec![Self::ABSENT; n];
        for (i, v) in initial.iter().enumerate() {
            slot[v.index()] = i as u32;
        }
        Self { items: initial, slot }
    }

    #[inline]
    fn contains(&self, v: VertexId) -> bool {
        self.slot[v.index()] != Self::ABSENT
    }

    fn insert(&mut self, v: VertexId) {
        if !self.contains(v) {
            self.slot[v.index()] = self.items.len() as u32;
            self.items.push(v);
        }
    }

    fn remove(&mut self, v: VertexId) {
        let i = self.slot[v.index()];
        if i == Self::ABSENT {
            return;
        }
        let last = *self.items.last().expect("non-empty when v is present");
        self.items.swap_remove(i as usize);
        if last != v {
            self.slot[last.index()] = i;
        }
        self.slot[v.index()] = Self::ABSENT;
    }
}

/// Second epoch: remove a uniformly random dominated vertex until none is left.
///
/// The dominated set is kept incrementally; after each removal only the
/// distance-two ball of the removed vertex is re-examined. The pick is
/// `items[below(rng, len)]` over the pool's internal order, which is a
/// deterministic function of the removal history.
pub fn run_epoch2<R: RngCore + ?Sized>(g: &mut AdjacencyGraph, rng: &mut R) -> Epoch2Trace {
    run_epoch2_observed(g, rng, |_, _, _| {})
}

/// [`run_epoch2`] that calls `observe(graph_before, chosen, newly_dominated)` before each removal.
pub fn run_epoch2_observed<R, F>(g: &mut AdjacencyGraph, rng: &mut R, mut observe: F) -> Epoch2Trace
where
    R: RngCore + ?Sized,
    F: FnMut(&AdjacencyGraph, VertexId, &[VertexId]),
{
    let mut pool = DominatedPool::new(g.n(), dominated_set(g));
    let mut trace = Epoch2Trace::default();
    let mut newly = Vec::new();
    while !pool.items.is_empty() {
        let v = pool.items[rng::below(rng, pool.items.len())];
        let ball = distance_two_ball(g, v);
        newly.clear();
        newly.extend(
            ball.iter()
                .copied()
                .filter(|&u| !pool.contains(u) && dominator_of(g, u, Some(v)).is_some()),
        );
        observe(g, v, &newly);
        g.remove_vertex(v).expect("pooled vertex is alive");
        pool.remove(v);
        for &u in &ball {
            if is_dominated(g, u) {
                pool.insert(u);
            } else {
                pool.remove(u);
            }
        }
        trace.removed.push(v);
        trace.y_values.push(newly.len());
        trace.steps += 1;
    }
    trace.deleted_total = trace.steps;
    trace
}

/// Ordered pairs `(u, w)`, `u != w`, with `N[u] ⊆ N[w]`.
pub fn count_dominated_pairs(g: &AdjacencyGraph) -> usize {
    g.alive_vertices()
        .map(|u| {
            g.neighbors(u)
                .iter()
                .filter(|&&w| g.closed_subset_unchecked(u, w, None))
                .count()
        })
        .sum()
}

pub fn has_universal_vertex(g: &AdjacencyGraph) -> bool {
    g.universal_vertex_count() > 0
}

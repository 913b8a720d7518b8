//! Sparse undirected graph with tombstoned vertex deletion.
//!
//! The graph is the 1-skeleton of a flag complex; every collapse decision in
//! the crate is made on it through closed-neighborhood containment.

use std::fmt;
use std::io::{self, Write};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{self, TrialRng};

/// Stable vertex identifier. Deleted vertices keep their id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("density constant c = {c} gives p = c/n outside [0, 1] for n = {n}")]
    InvalidDensity { c: f64, n: usize },
    #[error("vertex {0} is not alive")]
    DeadVertex(VertexId),
    #[error("vertex {0} is out of range for a graph on {1} vertices")]
    OutOfRange(VertexId, usize),
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(u32, u32),
}

/// Parameters of a G(n, p) draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl GraphParams {
    pub fn new(n: usize, p: f64, seed: u64) -> Result<Self, GraphError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidProbability(p));
        }
        Ok(Self { n, p, seed })
    }

    /// `p = c / n`.
    pub fn with_density(n: usize, c: f64, seed: u64) -> Result<Self, GraphError> {
        let p = if n == 0 { 0.0 } else { c / n as f64 };
        if !(c >= 0.0) || p > 1.0 {
            return Err(GraphError::InvalidDensity { c, n });
        }
        Ok(Self { n, p, seed })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyGraph {
    alive: Vec<bool>,
    neighbors: Vec<Vec<VertexId>>,
    alive_count: usize,
    edge_count: usize,
}

impl AdjacencyGraph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            alive: vec![true; n],
            neighbors: vec![Vec::new(); n],
            alive_count: n,
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges are merged; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u == v || u as usize >= n || v as usize >= n {
                return Err(GraphError::InvalidEdge(u, v));
            }
            g.neighbors[u as usize].push(VertexId(v));
            g.neighbors[v as usize].push(VertexId(u));
        }
        for list in &mut g.neighbors {
            list.sort_unstable();
            list.dedup();
        }
        g.edge_count = g.neighbors.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        Self::from_edges(n, &edges).expect("complete graph edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<(u32, u32)> = (0..n as u32).map(|u| (u, (u + 1) % n as u32)).collect();
        Self::from_edges(n, &edges).expect("cycle edges are valid")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path edges are valid")
    }

    /// Star `K_{1,k}` with center `v0`.
    pub fn star(k: usize) -> Self {
        let edges: Vec<(u32, u32)> = (1..=k as u32).map(|v| (0, v)).collect();
        Self::from_edges(k + 1, &edges).expect("star edges are valid")
    }

    /// Number of vertices at construction, alive or not.
    #[inline]
    pub fn n(&self) -> usize {
        self.alive.len()
    }

    #[inline]
    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn is_alive(&self, v: VertexId) -> bool {
        self.alive.get(v.index()).copied().unwrap_or(false)
    }

    pub fn alive_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| VertexId(i as u32))
    }

    pub fn check_alive(&self, v: VertexId) -> Result<(), GraphError> {
        if v.index() >= self.n() {
            Err(GraphError::OutOfRange(v, self.n()))
        } else if !self.alive[v.index()] {
            Err(GraphError::DeadVertex(v))
        } else {
            Ok(())
        }
    }

    /// Open neighborhood as a sorted slice. Dead vertices have an empty slice.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.check_alive(v)?;
        Ok(self.neighbors[v.index()].len())
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors
            .get(u.index())
            .is_some_and(|l| l.binary_search(&v).is_ok())
    }

    /// `N[v] = N(v) ∪ {v}`, sorted.
    pub fn closed_neighborhood(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_alive(v)?;
        let open = &self.neighbors[v.index()];
        let mut out = Vec::with_capacity(open.len() + 1);
        let split = open.partition_point(|&x| x < v);
        out.extend_from_slice(&open[..split]);
        out.push(v);
        out.extend_from_slice(&open[split..]);
        Ok(out)
    }

    /// Tests `N[u] ⊆ N[w]`.
    pub fn is_closed_nbhd_subset(&self, u: VertexId, w: VertexId) -> Result<bool, GraphError> {
        self.check_alive(u)?;
        self.check_alive(w)?;
        Ok(self.closed_subset_unchecked(u, w, None))
    }

    /// `N[u] \ {skip} ⊆ N[w] \ {skip}` by a linear merge of the two sorted lists.
    ///
    /// Callers guarantee `u` and `w` are alive. With `skip = Some(b)` this is the
    /// containment test in the graph with `b` deleted.
    pub(crate) fn closed_subset_unchecked(
        &self,
        u: VertexId,
        w: VertexId,
        skip: Option<VertexId>,
    ) -> bool {
        if u == w {
            return true;
        }
        let nu = &self.neighbors[u.index()];
        let nw = &self.neighbors[w.index()];
        // Necessary size condition, valid with or without the skipped vertex.
        if nu.len() > nw.len() + 1 {
            return false;
        }
        // u must lie in N[w]: since u != w, u must be adjacent to w.
        if nw.binary_search(&u).is_err() {
            return false;
        }
        let mut j = 0;
        for &x in nu {
            if Some(x) == skip || x == w {
                continue;
            }
            while j < nw.len() && nw[j] < x {
                j += 1;
            }
            if j == nw.len() || nw[j] != x {
                return false;
            }
        }
        true
    }

    /// Deletes `v` and every edge at `v`. Returns the former neighbors of `v`.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_alive(v)?;
        let nbrs = std::mem::take(&mut self.neighbors[v.index()]);
        for &u in &nbrs {
            let list = &mut self.neighbors[u.index()];
            if let Ok(pos) = list.binary_search(&v) {
                list.remove(pos);
            }
        }
        self.alive[v.index()] = false;
        self.alive_count -= 1;
        self.edge_count -= nbrs.len();
        Ok(nbrs)
    }

    /// Alive vertices with degree at least one (the f0 statistic).
    pub fn non_isolated_count(&self) -> usize {
        self.neighbors.iter().filter(|l| !l.is_empty()).count()
    }

    /// Number of alive vertices adjacent to every other alive vertex.
    pub fn universal_vertex_count(&self) -> usize {
        if self.alive_count == 0 {
            return 0;
        }
        let target = self.alive_count - 1;
        self.alive_vertices()
            .filter(|v| self.neighbors[v.index()].len() == target)
            .count()
    }

    /// Edges `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(u, list)| {
            let u = VertexId(u as u32);
            list.iter().filter(move |&&v| u < v).map(move |&v| (u, v))
        })
    }

    /// Writes the edge list as `u v` lines, `u < v`, ascending.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", u.0, v.0)?;
        }
        Ok(())
    }

    /// Full rescan of the structural invariants. Returns a description of the first violation.
    pub fn audit(&self) -> Result<(), String> {
        let mut alive = 0;
        let mut degree_sum = 0;
        for (i, list) in self.neighbors.iter().enumerate() {
            let v = VertexId(i as u32);
            if self.alive[i] {
                alive += 1;
            } else if !list.is_empty() {
                return Err(format!("dead vertex {v} has neighbors"));
            }
            degree_sum += list.len();
            for pair in list.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(format!("neighbor list of {v} not strictly sorted"));
                }
            }
            for &u in list {
                if u == v {
                    return Err(format!("self-loop at {v}"));
                }
                if !self.is_alive(u) {
                    return Err(format!("{v} lists dead neighbor {u}"));
                }
                if self.neighbors[u.index()].binary_search(&v).is_err() {
                    return Err(format!("asymmetric edge {v} -> {u}"));
                }
            }
        }
        if alive != self.alive_count {
            return Err("alive count out of sync".into());
        }
        if degree_sum != 2 * self.edge_count {
            return Err("edge count out of sync".into());
        }
        Ok(())
    }
}

/// Edges of G(n, p) drawn by geometric gap skipping over the pairs `(u, v)`,
/// `u < v`, in row-major order `(0,1), (0,2), …, (0,n-1), (1,2), …`.
///
/// Each gap is a `geometric_skip` draw from the trial stream; the first edge
/// sits at pair index `skip_0`, the next at `skip_0 + 1 + skip_1`, and so on.
pub fn sample_er_edges<R: RngCore + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    if n < 2 || p <= 0.0 {
        return edges;
    }
    if p >= 1.0 {
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        return edges;
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let log_q = (-p).ln_1p();
    edges.reserve((total as f64 * p * 1.1) as usize + 16);
    let n64 = n as u64;
    // Current pair: row u, column v; `index` is its row-major rank.
    let mut u: u64 = 0;
    let mut v: u64 = 0;
    let mut index: u64 = 0;
    let mut first = true;
    loop {
        let skip = rng::geometric_skip(rng, log_q);
        let advance = if first { skip } else { skip.saturating_add(1) };
        let target = match index.checked_add(advance) {
            Some(t) if t < total => t,
            _ => break,
        };
        if first {
            v = 1;
            first = false;
        }
        let mut remaining = target - index;
        // Walk rows; each row u holds columns u+1 .. n-1.
        while remaining > 0 {
            let room = n64 - 1 - v;
            if remaining <= room {
                v += remaining;
                remaining = 0;
            } else {
                remaining -= room + 1;
                u += 1;
                v = u + 1;
            }
        }
        index = target;
        edges.push((u as u32, v as u32));
    }
    edges
}

/// Seeded G(n, p) draw; the stream is `rng_from_seed(params.seed)`.
pub fn sample_er(params: &GraphParams) -> Result<AdjacencyGraph, GraphError> {
    if !(0.0..=1.0).contains(&params.p) {
        return Err(GraphError::InvalidProbability(params.p));
    }
    let mut rng = rng::rng_from_seed(params.seed);
    Ok(sample_er_with(params.n, params.p, &mut rng))
}

pub fn sample_er_with(n: usize, p: f64, rng: &mut TrialRng) -> AdjacencyGraph {
    let edges = sample_er_edges(n, p, rng);
    from_sorted_edges(n, &edges)
}

/// Row-major sorted edges produce sorted neighbor lists without a sort pass.
fn from_sorted_edges(n: usize, edges: &[(u32, u32)]) -> AdjacencyGraph {
    let mut degree = vec![0usize; n];
    for &(u, v) in edges {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    let mut neighbors: Vec<Vec<VertexId>> = degree.iter().map(|&d| Vec::with_capacity(d)).collect();
    // Lower neighbors of x are pushed in earlier rows, upper ones in row x: lists stay sorted.
    for &(u, v) in edges {
        neighbors[u as usize].push(VertexId(v));
        neighbors[v as usize].push(VertexId(u));
    }
    AdjacencyGraph {
        alive: vec![true; n],
        neighbors,
        alive_count: n,
        edge_count: edges.len(),
    }
}

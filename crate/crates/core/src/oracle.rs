//! Brute-force simplicial checks for small graphs.
//!
//! Everything here works on the clique complex directly (enumerated cliques,
//! links built from induced subgraphs) and is refused above a fixed vertex
//! budget. It exists to audit the graph-native collapse engine.

use std::fmt;

use thiserror::Error;

use crate::graph::{AdjacencyGraph, GraphError, VertexId};

pub const DEFAULT_N_LIMIT: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("graph has {alive} alive vertices, above the oracle limit of {limit}")]
    TooLarge { alive: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `f[d]` is the number of `d`-simplices, i.e. `(d+1)`-cliques.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCensus {
    pub f: Vec<u64>,
}

impl CliqueCensus {
    pub fn euler_characteristic(&self) -> i64 {
        self.f
            .iter()
            .enumerate()
            .map(|(d, &k)| if d % 2 == 0 { k as i64 } else { -(k as i64) })
            .sum()
    }
}

impl fmt::Display for CliqueCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.f.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

fn guard(g: &AdjacencyGraph, n_limit: usize) -> Result<(), OracleError> {
    if g.alive_count() > n_limit {
        Err(OracleError::TooLarge { alive: g.alive_count(), limit: n_limit })
    } else {
        Ok(())
    }
}

/// Counts every clique by extending each one only with higher-id common neighbors.
pub fn clique_census(g: &AdjacencyGraph, n_limit: usize) -> Result<CliqueCensus, OracleError> {
    guard(g, n_limit)?;
    let mut f = Vec::new();
    for v in g.alive_vertices() {
        let later: Vec<VertexId> = g.neighbors(v).iter().copied().filter(|&u| u > v).collect();
        extend(g, 0, &later, &mut f);
    }
    Ok(CliqueCensus { f })
}

fn extend(g: &AdjacencyGraph, dim: usize, candidates: &[VertexId], f: &mut Vec<u64>) {
    if f.len() <= dim {
        f.resize(dim + 1, 0);
    }
    f[dim] += 1;
    for (i, &u) in candidates.iter().enumerate() {
        let next: Vec<VertexId> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|&x| g.has_edge(u, x))
            .collect();
        extend(g, dim + 1, &next, f);
    }
}

pub fn euler_characteristic(g: &AdjacencyGraph, n_limit: usize) -> Result<i64, OracleError> {
    Ok(clique_census(g, n_limit)?.euler_characteristic())
}

/// Domination from the definition: the link of `v` is a simplicial cone.
///
/// In a flag complex the link of `v` is the clique complex of the subgraph
/// induced on `N(v)`, and that complex is a cone exactly when some vertex of
/// `N(v)` is adjacent to all the others. An empty link is not a cone.
pub fn is_dominated_via_link(g: &AdjacencyGraph, v: VertexId, n_limit: usize) -> Result<bool, OracleError> {
    guard(g, n_limit)?;
    g.check_alive(v)?;
    let link = g.neighbors(v);
    Ok(link
        .iter()
        .any(|&apex| link.iter().all(|&x| x == apex || g.has_edge(apex, x))))
}

/// Isomorphism of the subgraphs induced on non-isolated alive vertices, by backtracking.
pub fn non_isolated_isomorphic(a: &AdjacencyGraph, b: &AdjacencyGraph) -> bool {
    let va: Vec<VertexId> = a.alive_vertices().filter(|&v| !a.neighbors(v).is_empty()).collect();
    let vb: Vec<VertexId> = b.alive_vertices().filter(|&v| !b.neighbors(v).is_empty()).collect();
    if va.len() != vb.len() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut da: Vec<usize> = va.iter().map(|&v| a.neighbors(v).len()).collect();
    let mut db: Vec<usize> = vb.iter().map(|&v| b.neighbors(v).len()).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    let mut order = va.clone();
    order.sort_by_key(|&v| std::cmp::Reverse(a.neighbors(v).len()));
    let mut map: Vec<Option<VertexId>> = vec![None; a.n()];
    let mut used = vec![false; b.n()];
    extend_map(a, b, &order, 0, &vb, &mut map, &mut used)
}

fn extend_map(
    a: &AdjacencyGraph,
    b: &AdjacencyGraph,
    order: &[VertexId],
    depth: usize,
    vb: &[VertexId],
    map: &mut Vec<Option<VertexId>>,
    used: &mut Vec<bool>,
) -> bool {
    let Some(&x) = order.get(depth) else {
        return true;
    };
    for &y in vb {
        if used[y.index()] || a.neighbors(x).len() != b.neighbors(y).len() {
            continue;
        }
        let consistent = order[..depth].iter().all(|&prev| {
            let image = map[prev.index()].expect("mapped");
            a.has_edge(x, prev) == b.has_edge(y, image)
        });
        if !consistent {
            continue;
        }
        map[x.index()] = Some(y);
        used[y.index()] = true;
        if extend_map(a, b, order, depth + 1, vb, map, used) {
            return true;
        }
        map[x.index()] = None;
        used[y.index()] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wheel5() -> AdjacencyGraph {
        let mut edges: Vec<(u32, u32)> = (1..=5u32).map(|v| (0, v)).collect();
        edges.extend((1..=5u32).map(|v| (v, v % 5 + 1)));
        AdjacencyGraph::from_edges(6, &edges).unwrap()
    }

    #[test]
    fn census_examples() {
        assert_eq!(clique_census(&AdjacencyGraph::complete(3), 30).unwrap().f, vec![3, 3, 1]);
        assert_eq!(clique_census(&AdjacencyGraph::complete(4), 30).unwrap().f, vec![4, 6, 4, 1]);
        assert_eq!(clique_census(&AdjacencyGraph::cycle(4), 30).unwrap().f, vec![4, 4]);
        assert_eq!(clique_census(&AdjacencyGraph::complete(4), 30).unwrap().to_string(), "4,6,4,1");
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_characteristic(&AdjacencyGraph::complete(3), 30).unwrap(), 1);
        assert_eq!(euler_characteristic(&AdjacencyGraph::cycle(4), 30).unwrap(), 0);
        assert_eq!(euler_characteristic(&AdjacencyGraph::complete(4), 30).unwrap(), 1);
    }

    #[test]
    fn census_of_complete_graph_is_binomial() {
        let c = clique_census(&AdjacencyGraph::complete(10), 30).unwrap();
        let mut binom = 10u64;
        for (d, &k) in c.f.iter().enumerate() {
            assert_eq!(k, binom);
            binom = binom * (10 - d as u64 - 1) / (d as u64 + 2);
        }
    }

    #[test]
    fn size_guard() {
        let g = AdjacencyGraph::empty(31);
        assert_eq!(clique_census(&g, 30), Err(OracleError::TooLarge { alive: 31, limit: 30 }));
        assert!(is_dominated_via_link(&g, VertexId(0), 30).is_err());
    }

    #[test]
    fn link_examples() {
        let p = AdjacencyGraph::path(3);
        assert!(is_dominated_via_link(&p, VertexId(0), 30).unwrap());
        let c4 = AdjacencyGraph::cycle(4);
        assert!(!is_dominated_via_link(&c4, VertexId(0), 30).unwrap());
        // The hub's link is the 5-cycle, which has no apex; rim links are 3-paths through the hub.
        let w = wheel5();
        assert!(!is_dominated_via_link(&w, VertexId(0), 30).unwrap());
        assert_eq!(crate::collapse::find_dominator(&w, VertexId(0)).unwrap(), None);
        assert!(is_dominated_via_link(&w, VertexId(3), 30).unwrap());
        assert!(!is_dominated_via_link(&AdjacencyGraph::empty(1), VertexId(0), 30).unwrap());
    }

    #[test]
    fn isomorphism() {
        let a = AdjacencyGraph::cycle(5);
        let b = AdjacencyGraph::from_edges(7, &[(6, 2), (2, 4), (4, 1), (1, 3), (3, 6)]).unwrap();
        assert!(non_isolated_isomorphic(&a, &b));
        let c = AdjacencyGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap();
        assert!(!non_isolated_isomorphic(&a, &c));
        let d = AdjacencyGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let e = AdjacencyGraph::cycle(6);
        assert!(!non_isolated_isomorphic(&d, &e));
    }
}

//! Strong collapse of Erdős–Rényi clique complexes.
//!
//! The crate couples a graph-native collapse engine ([`collapse`]) with the
//! closed-form predictions it is measured against ([`theory`]), a Poisson
//! branching-tree simulator ([`tree`]), brute-force simplicial checks for small
//! graphs ([`oracle`]) and a reproducible Monte-Carlo harness ([`experiments`]).

pub mod collapse;
pub mod experiments;
pub mod graph;
pub mod oracle;
pub mod rng;
pub mod theory;
pub mod tree;

pub use collapse::{CollapseTrace, Epoch2Trace, PhaseReport};
pub use experiments::{ExperimentError, ExperimentRecord, OutputFormat};
pub use graph::{AdjacencyGraph, GraphError, GraphParams, VertexId};
pub use theory::{GammaTable, RateBounds, TheoryError, TheoryParams};

//! Ghost-value iterative relaxation for k-edge-connectivity.
//!
//! Rounds fractional solutions of the k-edge-connectivity cut LP to integral
//! ones that lose at most a constant amount of connectivity and no cost, and
//! builds k-ECSS, k-ECSM and subset k-ECSM solvers on top. All arithmetic is
//! exact.

// Index loops read more clearly than zipped iterators in the matrix and
// graph code.
#![allow(clippy::needless_range_loop)]

pub mod cut_oracle;
pub mod gadgets;
pub mod ghost_rounding;
pub mod harness;
pub mod lp;
pub mod multigraph;
pub mod problems;
pub mod rational;

pub use multigraph::{EdgeId, MultiGraph, OriginalEdgeId, VertexId, VertexSet};
pub use rational::Rational;

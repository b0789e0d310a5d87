//! Reconfiguration of Nondeterministic Constraint Logic (NCL).
//!
//! A constraint graph has red edges of weight 1 and blue edges of weight 2.
//! An orientation is feasible when every vertex receives in-weight at least
//! two, and a move reverses one edge while keeping feasibility. The crate
//! decides whether a target orientation, or the reversal of a target edge,
//! is reachable from an initial orientation. It provides:
//!
//! * [`oracle`]: brute-force breadth-first search used as the reference.
//! * [`kernel`]: reduction rules that shrink an instance to a size bounded
//!   by its number of red edges.
//! * [`blue`]: a solver whose running time is exponential only in the number
//!   of blue edges, built on demand-class pairs and flow feasibility.
//! * [`andor`]: a reduction of AND/OR graphs to binary constraint
//!   satisfaction reconfiguration.
//! * [`single`]: the uniform-weight variant with vertex demands, reduced to
//!   common independent sets of two partition matroids.
//! * [`io`], [`generate`] and [`dot`]: the JSON format, seeded instance
//!   generators and Graphviz export.

pub mod andor;
pub mod blue;
pub mod dot;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod netflow;
pub mod oracle;
pub mod single;

pub use error::{NclError, Result};
pub use graph::{ConstraintGraph, Edge, EdgeId, Instance, Orientation, Query, Verdict, VertexId, VertexKind, Weight};

/// Flow network with 64-bit signed capacities.
pub type FlowNetworkI64 = netflow::FlowNetwork<i64>;

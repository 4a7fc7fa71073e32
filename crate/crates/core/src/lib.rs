//! Gate-level Grover search for the size-k dominating-set problem.
//!
//! The pipeline: parse a graph, plan a qubit layout, synthesize a
//! phase-kickback oracle from controlled cyclic counters and per-vertex
//! checkers, verify it exhaustively against brute force via reversible
//! evaluation, then amplify and sample, either dense (full statevector) or
//! compressed (exact evolution of just the vertex register). A
//! phase-estimation module estimates the solution count independently.

pub mod circuit;
pub mod cli;
pub mod counter;
pub mod graph;
pub mod grover;
pub mod oracle;
pub mod qcount;
pub mod sim;

pub use circuit::{Circuit, Gate};
pub use graph::{Graph, VertexSet};
pub use sim::StateVector;

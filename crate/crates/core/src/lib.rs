//! Random walks on simplicial complexes and the spectral and topological
//! machinery around them: boundary operators, Hodge Laplacians, signed graphs,
//! orientability, and up/down/graph-type walks with their limits and rates.

pub mod chain;
pub mod cli;
pub mod complex;
pub mod corpus;
pub mod error;
pub mod hodge;
pub mod io;
pub mod matrix;
pub mod rank;
pub mod report;
pub mod orientation;
pub mod signed_graph;
pub mod walks;

pub use complex::{Direction, OrientedSimplex, Sign, Simplex, SimplicialComplex, WeightFunction, Weights};
pub use error::{Error, Result};
pub use matrix::{IntegerMatrix, Label, OperatorMatrix};

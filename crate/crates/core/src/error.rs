use thiserror::Error;

use crate::complex::Simplex;

/// Errors raised by complex construction, operators and walks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("facet list is empty")]
    EmptyFacetList,
    #[error("facet {index} is empty")]
    EmptyFacet { index: usize },
    #[error("facet {index} repeats vertex {vertex}")]
    DuplicateVertex { index: usize, vertex: usize },
    #[error("simplex {0} is not in the complex")]
    SimplexNotFound(Simplex),
    #[error("dimension {dim} out of range for {what} (valid {min}..={max})")]
    DimensionOutOfRange { what: &'static str, dim: usize, min: usize, max: usize },
    #[error("{face} is not a codimension-1 face of {simplex}")]
    NotAFace { face: Simplex, simplex: Simplex },
    #[error("weight of {simplex} is {value}, weights must be strictly positive")]
    NonPositiveWeight { simplex: Simplex, value: f64 },
    #[error("no weight given for {0}")]
    MissingWeight(Simplex),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not self-adjoint for the given weights (asymmetry {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },
    #[error("betti number disagreement at dimension {dim}: spectral {spectral}, exact {exact}")]
    BettiDisagreement { dim: usize, spectral: usize, exact: usize },
    #[error("isolated vertex {0} in signed graph")]
    IsolatedVertex(String),
    #[error("{0} has no coface; complex is not pure at this dimension")]
    NotPure(Simplex),
    #[error("faces with degree other than {expected}: {}", list(.offenders))]
    FaceDegree { expected: usize, offenders: Vec<Simplex> },
    #[error("faces of the {dim}-simplexes have maximum degree {max_degree}; lower adjacency needs at least 2")]
    NoLowerAdjacency { dim: usize, max_degree: usize },
    #[error("complex is not orientable; negative cycle {}", list(.cycle))]
    NotOrientable { cycle: Vec<Simplex> },
    #[error("free faces present: {}; extend the complex first", list(.faces))]
    FreeFaces { faces: Vec<Simplex> },
    #[error("{0} has no non-free faces; the graph-type walk has no moves from it")]
    Stranded(Simplex),
    #[error("laziness {0} outside [0, 1]")]
    InvalidLaziness(f64),
    #[error("chain is periodic: p = 0 with a disorientable component")]
    Periodic,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}

fn list(items: &[Simplex]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub type Result<T> = std::result::Result<T, Error>;

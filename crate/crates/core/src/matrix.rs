//! Dense matrices whose rows and columns are named by simplexes or walk states.

use std::fmt;

use nalgebra::{DMatrix, Scalar};
use serde::{Deserialize, Serialize};

use crate::complex::{OrientedSimplex, Simplex};

/// Name of a row or column.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Simplex(Simplex),
    Oriented(OrientedSimplex),
    /// The absorbing state of a Dirichlet walk.
    Death,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Simplex(s) => write!(f, "{s}"),
            Label::Oriented(o) => write!(f, "{o}"),
            Label::Death => f.write_str("death"),
        }
    }
}

/// A dense matrix with ordered, duplicate-free row and column labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix<T: Scalar> {
    pub rows: Vec<Label>,
    pub cols: Vec<Label>,
    pub data: DMatrix<T>,
}

pub type OperatorMatrix = LabeledMatrix<f64>;
pub type IntegerMatrix = LabeledMatrix<i64>;

impl<T: Scalar> LabeledMatrix<T> {
    pub fn new(rows: Vec<Label>, cols: Vec<Label>, data: DMatrix<T>) -> Self {
        assert_eq!((rows.len(), cols.len()), data.shape(), "label count must match matrix shape");
        LabeledMatrix { rows, cols, data }
    }

    pub fn transpose(&self) -> Self {
        LabeledMatrix { rows: self.cols.clone(), cols: self.rows.clone(), data: self.data.transpose() }
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }
}

impl IntegerMatrix {
    pub fn to_real(&self) -> OperatorMatrix {
        LabeledMatrix { rows: self.rows.clone(), cols: self.cols.clone(), data: self.data.map(|x| x as f64) }
    }
}

impl OperatorMatrix {
    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &DMatrix<f64>) -> f64 {
        max_abs_diff(&self.data, other)
    }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn simplex_labels(simplices: &[Simplex]) -> Vec<Label> {
    simplices.iter().cloned().map(Label::Simplex).collect()
}

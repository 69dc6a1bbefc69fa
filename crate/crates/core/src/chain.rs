//! Chain and cochain spaces: boundary, coboundary and weighted adjoint operators.

use nalgebra::{DMatrix, DVector};

use crate::complex::{OrientedSimplex, SimplicialComplex, WeightFunction, Weights};
use crate::error::{Error, Result};
use crate::matrix::{simplex_labels, IntegerMatrix, OperatorMatrix};

/// A real antisymmetric function on oriented `dim`-simplexes, stored on canonical representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub dim: usize,
    pub values: DVector<f64>,
}

impl Cochain {
    pub fn zeros(complex: &SimplicialComplex, dim: usize) -> Self {
        Cochain { dim, values: DVector::zeros(complex.count(dim)) }
    }

    pub fn from_values(complex: &SimplicialComplex, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != complex.count(dim) {
            return Err(Error::DimensionMismatch { expected: complex.count(dim), found: values.len() });
        }
        Ok(Cochain { dim, values: DVector::from_vec(values) })
    }

    /// `±1` on the given oriented simplex, zero elsewhere.
    pub fn indicator(complex: &SimplicialComplex, o: &OrientedSimplex) -> Result<Self> {
        let i = complex.require(&o.simplex)?;
        let mut c = Cochain::zeros(complex, o.simplex.dim());
        c.values[i] = o.sign.value();
        Ok(c)
    }

    /// Value on an oriented simplex; negated for the reversed orientation.
    pub fn eval(&self, complex: &SimplicialComplex, o: &OrientedSimplex) -> Result<f64> {
        if o.simplex.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: o.simplex.dim() });
        }
        Ok(o.sign.value() * self.values[complex.require(&o.simplex)?])
    }
}

pub(crate) fn check_range(what: &'static str, d: usize, min: usize, max: usize) -> Result<()> {
    if d < min || d > max || max < min {
        return Err(Error::DimensionOutOfRange { what, dim: d, min, max });
    }
    Ok(())
}

/// Integer boundary `∂_d` as a `|S_{d-1}| x |S_d|` matrix; empty shapes at the extremes.
pub(crate) fn boundary_int(complex: &SimplicialComplex, d: usize) -> DMatrix<i64> {
    let rows = if d == 0 { 0 } else { complex.count(d - 1) };
    let cols = if d > complex.dim() { 0 } else { complex.count(d) };
    let mut m = DMatrix::zeros(rows, cols);
    if d >= 1 {
        for i in 0..cols {
            for (j, &f) in complex.faces_of(d, i).iter().enumerate() {
                m[(f, i)] = if j % 2 == 0 { 1 } else { -1 };
            }
        }
    }
    m
}

pub(crate) fn boundary_dense(complex: &SimplicialComplex, d: usize) -> DMatrix<f64> {
    boundary_int(complex, d).map(|x| x as f64)
}

/// `∂_d : C_d → C_{d-1}` for `1 <= d <= N`.
pub fn boundary_matrix(complex: &SimplicialComplex, d: usize) -> Result<IntegerMatrix> {
    check_range("boundary map", d, 1, complex.dim())?;
    Ok(IntegerMatrix::new(
        simplex_labels(complex.simplices(d - 1)),
        simplex_labels(complex.simplices(d)),
        boundary_int(complex, d),
    ))
}

/// `δ_d : C^d → C^{d+1}` for `0 <= d <= N-1`; the transpose of `∂_{d+1}`.
pub fn coboundary_matrix(complex: &SimplicialComplex, d: usize) -> Result<IntegerMatrix> {
    check_range("coboundary map", d, 0, complex.dim().wrapping_sub(1))?;
    Ok(boundary_matrix(complex, d + 1)?.transpose())
}

/// `Σ w(σ) f(σ) g(σ)` over canonical `d`-simplexes.
pub fn inner_product(complex: &SimplicialComplex, f: &Cochain, g: &Cochain, w: &WeightFunction) -> Result<f64> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch { expected: f.dim, found: g.dim });
    }
    let weights = w.resolve(complex)?;
    weighted_dot(weights.at(f.dim), &f.values, &g.values)
}

pub(crate) fn weighted_dot(w: &[f64], f: &DVector<f64>, g: &DVector<f64>) -> Result<f64> {
    if f.len() != w.len() || g.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), found: f.len().max(g.len()) });
    }
    Ok(w.iter().zip(f.iter().zip(g.iter())).map(|(w, (a, b))| w * a * b).sum())
}

pub(crate) fn adjoint_dense(complex: &SimplicialComplex, d: usize, weights: &Weights) -> DMatrix<f64> {
    // δ*_d = W_d^{-1} ∂_{d+1} W_{d+1}
    let mut m = boundary_dense(complex, d + 1);
    let (wd, wu) = (weights.at(d), weights.at(d + 1));
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            m[(r, c)] *= wu[c] / wd[r];
        }
    }
    m
}

/// `δ*_d : C^{d+1} → C^d`, the adjoint of `δ_d` for the weighted inner products.
pub fn adjoint_coboundary_matrix(complex: &SimplicialComplex, d: usize, w: &WeightFunction) -> Result<OperatorMatrix> {
    check_range("adjoint coboundary", d, 0, complex.dim().wrapping_sub(1))?;
    let weights = w.resolve(complex)?;
    Ok(OperatorMatrix::new(
        simplex_labels(complex.simplices(d)),
        simplex_labels(complex.simplices(d + 1)),
        adjoint_dense(complex, d, &weights),
    ))
}

//! Hodge Laplacians, their spectra, Betti numbers, the Hodge decomposition
//! and the spectral/essential gaps of the up-Laplacian below the top dimension.
//!
//! Weighted operators are self-adjoint for the weighted inner product, not
//! symmetric as matrices. Spectra are computed on the symmetrized form
//! `W^{1/2} L W^{-1/2}` and eigenvectors mapped back with `W^{-1/2}`, so the
//! returned eigenvectors are orthonormal for the weighted inner product.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::chain::{adjoint_dense, boundary_dense, boundary_int, check_range, Cochain};
use crate::complex::{SimplicialComplex, WeightFunction, Weights};
use crate::error::{Error, Result};
use crate::matrix::{simplex_labels, OperatorMatrix};
use crate::rank::exact_rank;

/// Relative threshold below which an eigenvalue counts as zero.
pub const KERNEL_TOLERANCE: f64 = 1e-8;
/// Allowed asymmetry of the symmetrized operator.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianKind {
    Up,
    Down,
    Full,
}

pub(crate) fn up_dense(complex: &SimplicialComplex, d: usize, weights: &Weights) -> DMatrix<f64> {
    // δ*_d δ_d
    if d >= complex.dim() {
        let n = complex.count(d);
        return DMatrix::zeros(n, n);
    }
    adjoint_dense(complex, d, weights) * boundary_dense(complex, d + 1).transpose()
}

pub(crate) fn down_dense(complex: &SimplicialComplex, d: usize, weights: &Weights) -> DMatrix<f64> {
    // δ_{d-1} δ*_{d-1}
    if d == 0 {
        let n = complex.count(0);
        return DMatrix::zeros(n, n);
    }
    boundary_dense(complex, d).transpose() * adjoint_dense(complex, d - 1, weights)
}

fn labeled(complex: &SimplicialComplex, d: usize, data: DMatrix<f64>) -> OperatorMatrix {
    let labels = simplex_labels(complex.simplices(d));
    OperatorMatrix::new(labels.clone(), labels, data)
}

/// `L_d^up = δ*_d δ_d` for `0 <= d <= N-1`.
pub fn up_laplacian(complex: &SimplicialComplex, d: usize, w: &WeightFunction) -> Result<OperatorMatrix> {
    check_range("up Laplacian", d, 0, complex.dim().wrapping_sub(1))?;
    Ok(labeled(complex, d, up_dense(complex, d, &w.resolve(complex)?)))
}

/// `L_d^down = δ_{d-1} δ*_{d-1}` for `1 <= d <= N`.
pub fn down_laplacian(complex: &SimplicialComplex, d: usize, w: &WeightFunction) -> Result<OperatorMatrix> {
    check_range("down Laplacian", d, 1, complex.dim())?;
    Ok(labeled(complex, d, down_dense(complex, d, &w.resolve(complex)?)))
}

/// `L_d = L_d^up + L_d^down`, with the missing half taken as zero at `d = 0` and `d = N`.
pub fn full_laplacian(complex: &SimplicialComplex, d: usize, w: &WeightFunction) -> Result<OperatorMatrix> {
    check_range("full Laplacian", d, 0, complex.dim())?;
    let weights = w.resolve(complex)?;
    Ok(labeled(complex, d, up_dense(complex, d, &weights) + down_dense(complex, d, &weights)))
}

pub fn laplacian(complex: &SimplicialComplex, kind: LaplacianKind, d: usize, w: &WeightFunction) -> Result<OperatorMatrix> {
    match kind {
        LaplacianKind::Up => up_laplacian(complex, d, w),
        LaplacianKind::Down => down_laplacian(complex, d, w),
        LaplacianKind::Full => full_laplacian(complex, d, w),
    }
}

/// Eigen-decomposition of a weighted self-adjoint operator.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns, orthonormal for the weighted inner product.
    pub eigenvectors: DMatrix<f64>,
    pub kernel_dim: usize,
    /// Absolute threshold used for `kernel_dim`.
    pub kernel_tolerance: f64,
}

impl SpectralDecomposition {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self, k: usize) -> bool {
        self.eigenvalues[k].abs() < self.kernel_tolerance
    }

    /// Eigenvectors with zero eigenvalue, as columns.
    pub fn kernel_basis(&self) -> DMatrix<f64> {
        self.select(|k| self.is_zero(k))
    }

    /// Eigenvectors with nonzero eigenvalue, spanning the image.
    pub fn image_basis(&self) -> DMatrix<f64> {
        self.select(|k| !self.is_zero(k))
    }

    /// Nonzero eigenvalues, ascending.
    pub fn nonzero_eigenvalues(&self) -> Vec<f64> {
        (0..self.eigenvalues.len()).filter(|&k| !self.is_zero(k)).map(|k| self.eigenvalues[k]).collect()
    }

    fn select(&self, keep: impl Fn(usize) -> bool) -> DMatrix<f64> {
        let cols: Vec<usize> = (0..self.eigenvalues.len()).filter(|&k| keep(k)).collect();
        self.eigenvectors.select_columns(cols.iter())
    }
}

/// Spectrum of `l`, assumed self-adjoint for the inner product with diagonal `weights`.
pub fn spectrum(l: &DMatrix<f64>, weights: &[f64]) -> Result<SpectralDecomposition> {
    let n = l.nrows();
    if l.ncols() != n || weights.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: weights.len() });
    }
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
            kernel_dim: 0,
            kernel_tolerance: KERNEL_TOLERANCE,
        });
    }
    let root: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |r, c| root[r] * l[(r, c)] / root[c]);
    let scale = s.amax().max(1.0);
    let deviation = (&s - s.transpose()).amax();
    if deviation > SYMMETRY_TOLERANCE * scale {
        return Err(Error::NotSelfAdjoint { deviation });
    }
    let sym = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])] / root[r]);
    let radius = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let kernel_tolerance = KERNEL_TOLERANCE * radius.max(1.0);
    let kernel_dim = eigenvalues.iter().filter(|x| x.abs() < kernel_tolerance).count();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors, kernel_dim, kernel_tolerance })
}

/// Spectrum of one of the Laplacians at dimension `d`.
pub fn laplacian_spectrum(
    complex: &SimplicialComplex,
    kind: LaplacianKind,
    d: usize,
    w: &WeightFunction,
) -> Result<SpectralDecomposition> {
    let l = laplacian(complex, kind, d, w)?;
    spectrum(&l.data, w.resolve(complex)?.at(d))
}

/// `|S_d| - rank ∂_d - rank ∂_{d+1}` with exact integer ranks.
pub fn exact_betti(complex: &SimplicialComplex, d: usize) -> Result<usize> {
    check_range("betti number", d, 0, complex.dim())?;
    let lower = if d == 0 { 0 } else { exact_rank(&boundary_int(complex, d)) };
    let upper = if d == complex.dim() { 0 } else { exact_rank(&boundary_int(complex, d + 1)) };
    Ok(complex.count(d) - lower - upper)
}

/// Betti number at `d`, computed from the kernel of the full Laplacian and
/// checked against the exact-rank value.
pub fn betti(complex: &SimplicialComplex, d: usize, w: &WeightFunction) -> Result<usize> {
    let exact = exact_betti(complex, d)?;
    let spectral = laplacian_spectrum(complex, LaplacianKind::Full, d, w)?.kernel_dim;
    if spectral != exact {
        return Err(Error::BettiDisagreement { dim: d, spectral, exact });
    }
    Ok(exact)
}

pub fn betti_numbers(complex: &SimplicialComplex, w: &WeightFunction) -> Result<Vec<usize>> {
    (0..=complex.dim()).map(|d| betti(complex, d, w)).collect()
}

/// Orthogonal projection onto the span of W-orthonormal columns `q`.
pub(crate) fn project(q: &DMatrix<f64>, weights: &[f64], f: &DVector<f64>) -> DVector<f64> {
    if q.ncols() == 0 {
        return DVector::zeros(f.len());
    }
    let wf = DVector::from_iterator(f.len(), f.iter().zip(weights).map(|(x, w)| x * w));
    q * (q.transpose() * wf)
}

pub(crate) fn weighted_norm(weights: &[f64], f: &DVector<f64>) -> f64 {
    f.iter().zip(weights).map(|(x, w)| w * x * x).sum::<f64>().sqrt()
}

/// The three orthogonal pieces of a cochain.
#[derive(Clone, Debug)]
pub struct HodgeParts {
    /// Component in `im δ_{d-1}`.
    pub exact: Cochain,
    /// Component in `ker L_d`.
    pub harmonic: Cochain,
    /// Component in `im δ*_d`.
    pub coexact: Cochain,
}

pub fn hodge_decompose(complex: &SimplicialComplex, f: &Cochain, w: &WeightFunction) -> Result<HodgeParts> {
    let d = f.dim;
    check_range("Hodge decomposition", d, 0, complex.dim())?;
    if f.values.len() != complex.count(d) {
        return Err(Error::DimensionMismatch { expected: complex.count(d), found: f.values.len() });
    }
    let weights = w.resolve(complex)?;
    let wd = weights.at(d);
    let up = spectrum(&up_dense(complex, d, &weights), wd)?;
    let down = spectrum(&down_dense(complex, d, &weights), wd)?;
    let full = spectrum(&(up_dense(complex, d, &weights) + down_dense(complex, d, &weights)), wd)?;
    let part = |v: DVector<f64>| Cochain { dim: d, values: v };
    Ok(HodgeParts {
        exact: part(project(&down.image_basis(), wd, &f.values)),
        harmonic: part(project(&full.kernel_basis(), wd, &f.values)),
        coexact: part(project(&up.image_basis(), wd, &f.values)),
    })
}

/// Smallest eigenvalue of `l` restricted to the span of the W-orthonormal columns `q`.
pub(crate) fn restricted_minimum(l: &DMatrix<f64>, q: &DMatrix<f64>, weights: &[f64]) -> Option<f64> {
    if q.ncols() == 0 {
        return None;
    }
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(weights));
    let compressed = q.transpose() * w * l * q;
    let sym = (&compressed + compressed.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.iter().copied().reduce(f64::min)
}

/// Spectral gap: `min Spec(L_{N-1}^up restricted to ker L_{N-1}^down)`. `None` when that subspace is trivial.
pub fn spectral_gap(complex: &SimplicialComplex, w: &WeightFunction) -> Result<Option<f64>> {
    gap(complex, w, false)
}

/// Essential gap: `min Spec(L_{N-1}^up restricted to im L_{N-1}^up)`. `None` when that subspace is trivial.
pub fn essential_gap(complex: &SimplicialComplex, w: &WeightFunction) -> Result<Option<f64>> {
    gap(complex, w, true)
}

fn gap(complex: &SimplicialComplex, w: &WeightFunction, essential: bool) -> Result<Option<f64>> {
    let n = complex.dim();
    check_range("spectral gap", n, 1, usize::MAX)?;
    let d = n - 1;
    let weights = w.resolve(complex)?;
    let wd = weights.at(d);
    let up = up_dense(complex, d, &weights);
    let basis = if essential {
        spectrum(&up, wd)?.image_basis()
    } else {
        spectrum(&down_dense(complex, d, &weights), wd)?.kernel_basis()
    };
    Ok(restricted_minimum(&up, &basis, wd).map(|x| x.max(0.0)))
}

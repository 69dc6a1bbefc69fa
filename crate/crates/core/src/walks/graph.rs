//! Walks on vertices and on top simplexes; stationary distributions of reversible chains.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_laziness, ConvergenceFit, StateSpaceKind, Walk};
use crate::chain::check_range;
use crate::complex::{OrientedSimplex, Sign, SimplicialComplex, WeightFunction};
use crate::error::{Error, Result};
use crate::hodge::{down_dense, project, spectrum, up_dense, SpectralDecomposition};
use crate::matrix::{max_abs_diff, simplex_labels, Label, OperatorMatrix};
use crate::orientation::{free_faces, is_orientable};

/// Stay with `α`; move to each neighbour with `(1-α)/deg v`.
pub fn graph_walk_matrix(complex: &SimplicialComplex, alpha: f64) -> Result<Walk> {
    check_laziness(alpha)?;
    check_range("graph walk", complex.dim(), 1, usize::MAX)?;
    let n = complex.count(0);
    let mut m = DMatrix::zeros(n, n);
    let mut degrees = Vec::with_capacity(n);
    for v in 0..n {
        let deg = complex.coface_count(0, v);
        if deg == 0 {
            return Err(Error::IsolatedVertex(complex.simplex(0, v).to_string()));
        }
        m[(v, v)] = alpha;
        for (u, _) in complex.up_neighbors(0, v) {
            m[(v, u)] += (1.0 - alpha) / deg as f64;
        }
        degrees.push(deg as f64);
    }
    let labels = simplex_labels(complex.simplices(0));
    Ok(Walk {
        kind: StateSpaceKind::Vertices,
        laziness: alpha,
        matrix: OperatorMatrix::new(labels.clone(), labels, m),
        reversing_measure: Some(degrees),
    })
}

/// Residual of `M = I - (1-α) Δ_0`, with `Δ_0` the normalized up Laplacian of the 1-skeleton.
pub fn graph_walk_identity_residual(complex: &SimplicialComplex, alpha: f64) -> Result<f64> {
    let walk = graph_walk_matrix(complex, alpha)?;
    let skeleton = complex.skeleton(1);
    let delta = up_dense(&skeleton, 0, &WeightFunction::Normalized.resolve(&skeleton)?);
    let n = delta.nrows();
    Ok(max_abs_diff(&walk.matrix.data, &(DMatrix::identity(n, n) - delta * (1.0 - alpha))))
}

/// What to do with top simplexes that have free faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPolicy {
    /// Every `(N-1)`-face must have degree 2.
    Closed,
    /// Free faces are allowed; moves are spread over the non-free faces only.
    Open,
}

/// Walk on top simplexes carrying a compatible orientation: stay with `p`, otherwise
/// cross one of the `θ` non-free faces uniformly.
pub fn graph_type_down_walk(complex: &SimplicialComplex, p: f64, policy: BoundaryPolicy) -> Result<Walk> {
    check_laziness(p)?;
    let n = complex.dim();
    let verdict = is_orientable(complex)?;
    let Some(assignment) = verdict.assignment else {
        return Err(Error::NotOrientable { cycle: verdict.obstruction.unwrap_or_default() });
    };
    if policy == BoundaryPolicy::Closed {
        let faces = free_faces(complex);
        if !faces.is_empty() {
            return Err(Error::FreeFaces { faces });
        }
    }
    let count = complex.count(n);
    let mut m = DMatrix::zeros(count, count);
    let mut theta = Vec::with_capacity(count);
    for i in 0..count {
        let neighbors = complex.down_neighbors(n, i);
        if neighbors.is_empty() {
            return Err(Error::Stranded(complex.simplex(n, i).clone()));
        }
        let t = neighbors.len() as f64;
        m[(i, i)] = p;
        for (j, _) in neighbors {
            m[(i, j)] += (1.0 - p) / t;
        }
        theta.push(t);
    }
    let labels = assignment.oriented().into_iter().map(Label::Oriented).collect::<Vec<_>>();
    Ok(Walk {
        kind: StateSpaceKind::TopSimplices,
        laziness: p,
        matrix: OperatorMatrix::new(labels.clone(), labels, m),
        reversing_measure: Some(theta),
    })
}

fn orientation_signs(walk: &Walk) -> Vec<f64> {
    walk.states()
        .iter()
        .map(|l| match l {
            Label::Oriented(OrientedSimplex { sign, .. }) => sign.value(),
            _ => Sign::Plus.value(),
        })
        .collect()
}

/// Residual of `M = I - (2(1-p)/(N+1)) D Δ^down_N D` on a closed orientable complex, with
/// `D` the diagonal of orientation signs and normalized weights.
pub fn graph_type_identity_residual(complex: &SimplicialComplex, p: f64) -> Result<f64> {
    let walk = graph_type_down_walk(complex, p, BoundaryPolicy::Closed)?;
    let n = complex.dim();
    let delta = down_dense(complex, n, &WeightFunction::Normalized.resolve(complex)?);
    let o = orientation_signs(&walk);
    let conj = DMatrix::from_fn(delta.nrows(), delta.ncols(), |r, c| o[r] * delta[(r, c)] * o[c]);
    let size = conj.nrows();
    let closed = DMatrix::identity(size, size) - conj * (2.0 * (1.0 - p) / (n as f64 + 1.0));
    Ok(max_abs_diff(&walk.matrix.data, &closed))
}

fn reversing_measure(walk: &Walk) -> Result<&[f64]> {
    walk.reversing_measure
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("walk has no known reversing measure".into()))
}

/// Spectrum of `I - M` for the inner product weighted by the reversing measure.
fn relaxation_spectrum(walk: &Walk) -> Result<SpectralDecomposition> {
    let theta = reversing_measure(walk)?;
    let n = walk.len();
    spectrum(&(DMatrix::identity(n, n) - &walk.matrix.data), theta)
}

/// `μ_∞ = Θ Q Qᵀ μ_0` with `Q` a Θ-orthonormal basis of the fixed functions.
fn spectral_limit(spec: &SpectralDecomposition, theta: &[f64], start: &DVector<f64>) -> DVector<f64> {
    let f = DVector::from_iterator(start.len(), start.iter().zip(theta).map(|(m, t)| m / t));
    let g = project(&spec.kernel_basis(), theta, &f);
    DVector::from_iterator(g.len(), g.iter().zip(theta).map(|(x, t)| x * t))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stationary {
    /// Projection onto the eigenvalue-1 eigenspace.
    pub spectral: Vec<f64>,
    /// Power iteration result.
    pub power: Vec<f64>,
    pub iterations: usize,
    pub agreement: f64,
    pub eigenspace_dim: usize,
    pub warnings: Vec<String>,
}

const POWER_STEP_TOLERANCE: f64 = 1e-12;
const POWER_MAX_ITERATIONS: usize = 200_000;

/// Limit of `μ_t` computed by spectral projection and by power iteration.
pub fn stationary_distribution(walk: &Walk, start: &DVector<f64>) -> Result<Stationary> {
    if start.len() != walk.len() {
        return Err(Error::DimensionMismatch { expected: walk.len(), found: start.len() });
    }
    let theta = reversing_measure(walk)?;
    let spec = relaxation_spectrum(walk)?;
    // an eigenvalue -1 of M is an eigenvalue 2 of I - M
    if spec.eigenvalues.iter().any(|&x| (x - 2.0).abs() < 1e-8) {
        return Err(Error::Periodic);
    }
    let spectral = spectral_limit(&spec, theta, start);
    let mut warnings = Vec::new();
    if walk.laziness >= 1.0 {
        warnings.push("laziness 1 makes the walk constant".to_string());
    }
    let mut mu = start.clone();
    let mut iterations = 0;
    while iterations < POWER_MAX_ITERATIONS {
        let next = walk.step(&mu);
        iterations += 1;
        let change = (&next - &mu).amax();
        mu = next;
        if change <= POWER_STEP_TOLERANCE {
            break;
        }
    }
    if iterations == POWER_MAX_ITERATIONS {
        warnings.push(format!("power iteration stopped after {iterations} steps"));
    }
    Ok(Stationary {
        agreement: (&mu - &spectral).amax(),
        spectral: spectral.iter().copied().collect(),
        power: mu.iter().copied().collect(),
        iterations,
        eigenspace_dim: spec.kernel_dim,
        warnings,
    })
}

fn reversible_fit(walk: &Walk, start: &DVector<f64>, steps: usize, bound: f64) -> Result<ConvergenceFit> {
    let theta = reversing_measure(walk)?.to_vec();
    let spec = relaxation_spectrum(walk)?;
    let limit = spectral_limit(&spec, &theta, start);
    let mut mu = start.clone();
    let (mut distances, mut tv) = (Vec::with_capacity(steps + 1), Vec::with_capacity(steps + 1));
    for t in 0..=steps {
        if t > 0 {
            mu = walk.step(&mu);
        }
        let diff = &mu - &limit;
        distances.push(diff.iter().zip(&theta).map(|(x, w)| x * x / w).sum::<f64>().sqrt());
        tv.push(0.5 * diff.iter().map(|x| x.abs()).sum::<f64>());
    }
    let mut fit = ConvergenceFit::new(distances, bound);
    fit.total_variation = Some(tv);
    if walk.laziness < 0.5 {
        fit.warnings.push(format!("rate bound is stated for laziness at least 1/2, got {}", walk.laziness));
    }
    if walk.laziness >= 1.0 {
        fit.warnings.push("laziness 1 gives M = I; no convergence".to_string());
    }
    Ok(fit)
}

fn start_mass(walk: &Walk, start: usize) -> Result<DVector<f64>> {
    if start >= walk.len() {
        return Err(Error::InvalidArgument(format!("start state {start} out of range")));
    }
    Ok(walk.point_mass(start))
}

/// Decay of a point mass towards stationarity against `1 - (1-α) λ`, with `λ` the smallest
/// nonzero eigenvalue of `Δ_0`.
pub fn graph_walk_convergence_rate(
    complex: &SimplicialComplex,
    alpha: f64,
    start: usize,
    steps: usize,
) -> Result<ConvergenceFit> {
    let walk = graph_walk_matrix(complex, alpha)?;
    let skeleton = complex.skeleton(1);
    let weights = WeightFunction::Normalized.resolve(&skeleton)?;
    let spec = spectrum(&up_dense(&skeleton, 0, &weights), weights.at(0))?;
    let lambda = spec.nonzero_eigenvalues().first().copied().unwrap_or(0.0);
    reversible_fit(&walk, &start_mass(&walk, start)?, steps, 1.0 - (1.0 - alpha) * lambda)
}

/// Decay of a point mass on a top simplex. On closed complexes the bound is
/// `1 - 2(1-p) λ_N/(N+1)` with `λ_N` the smallest nonzero eigenvalue of `Δ^down_N`, and
/// `‖M^t - P‖ = bound^t` is checked in the Θ-weighted operator norm. With free faces the
/// bound is `1 - γ`, `γ` the smallest nonzero eigenvalue of `I - M`.
pub fn graph_type_convergence_rate(
    complex: &SimplicialComplex,
    p: f64,
    policy: BoundaryPolicy,
    start: usize,
    steps: usize,
) -> Result<ConvergenceFit> {
    let walk = graph_type_down_walk(complex, p, policy)?;
    let n = complex.dim();
    let closed = free_faces(complex).is_empty();
    let bound = if closed {
        let weights = WeightFunction::Normalized.resolve(complex)?;
        let spec = spectrum(&down_dense(complex, n, &weights), weights.at(n))?;
        let lambda = spec.nonzero_eigenvalues().first().copied().unwrap_or(0.0);
        1.0 - 2.0 * (1.0 - p) * lambda / (n as f64 + 1.0)
    } else {
        1.0 - relaxation_spectrum(&walk)?.nonzero_eigenvalues().first().copied().unwrap_or(0.0)
    };
    let mut fit = reversible_fit(&walk, &start_mass(&walk, start)?, steps, bound)?;
    if closed {
        fit.operator_norm_residual = Some(operator_norm_residual(&walk, bound, steps)?);
    }
    Ok(fit)
}

/// `max_{t <= steps} |‖M^t - P‖_Θ - bound^t|` where `P` projects onto the fixed functions.
fn operator_norm_residual(walk: &Walk, bound: f64, steps: usize) -> Result<f64> {
    let theta = reversing_measure(walk)?;
    let spec = relaxation_spectrum(walk)?;
    let q = spec.kernel_basis();
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(theta));
    let proj = &q * q.transpose() * &w;
    let root: Vec<f64> = theta.iter().map(|x| x.sqrt()).collect();
    let n = walk.len();
    let mut power = DMatrix::identity(n, n);
    let mut worst = 0.0f64;
    for t in 0..=steps {
        if t > 0 {
            power = &power * &walk.matrix.data;
        }
        let diff = &power - &proj;
        let sym = DMatrix::from_fn(n, n, |r, c| root[r] * diff[(r, c)] / root[c]);
        let norm = sym.svd(false, false).singular_values.max();
        let expected = if t == 0 { if q.ncols() == n { 0.0 } else { 1.0 } } else { bound.powi(t as i32) };
        worst = worst.max((norm - expected).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> SimplicialComplex {
        SimplicialComplex::from_facets([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
    }
    fn torus() -> SimplicialComplex {
        let mut facets = Vec::new();
        for i in 0..7 {
            facets.push([i, (i + 1) % 7, (i + 3) % 7]);
            facets.push([i, (i + 2) % 7, (i + 3) % 7]);
        }
        SimplicialComplex::from_facets(facets).unwrap()
    }
    fn path() -> SimplicialComplex {
        SimplicialComplex::from_facets([[0, 1], [1, 2]]).unwrap()
    }

    #[test]
    fn path_walk() {
        let w = graph_walk_matrix(&path(), 0.5).unwrap();
        assert_eq!(w.matrix.data.row(1).iter().copied().collect::<Vec<_>>(), vec![0.25, 0.5, 0.25]);
        assert!(graph_walk_identity_residual(&path(), 0.5).unwrap() <= 1e-12);
        let isolated = SimplicialComplex::from_facets([vec![0, 1], vec![2]]).unwrap();
        assert!(matches!(graph_walk_matrix(&isolated, 0.5), Err(Error::IsolatedVertex(_))));
    }

    #[test]
    fn odd_cycle_limit_is_start_independent() {
        let c5 = SimplicialComplex::from_facets((0..5).map(|i| [i, (i + 1) % 5])).unwrap();
        let w = graph_walk_matrix(&c5, 0.0).unwrap();
        for s in 0..5 {
            let st = stationary_distribution(&w, &w.point_mass(s)).unwrap();
            assert!(st.spectral.iter().all(|&x| (x - 0.2).abs() < 1e-10));
            assert!(st.agreement < 1e-8);
        }
        let fit = graph_walk_convergence_rate(&c5, 0.5, 0, 60).unwrap();
        assert!(fit.within_bound);
    }

    #[test]
    fn sphere_graph_type_walk() {
        let k = sphere();
        let w = graph_type_down_walk(&k, 0.5, BoundaryPolicy::Closed).unwrap();
        // stay 1/2, each of the three neighbours 1/6
        assert!(w.matrix.data.row(0).iter().all(|&x| x == 0.5 || (x - 1.0 / 6.0).abs() < 1e-15));
        assert!((w.matrix.data.clone() - w.matrix.data.transpose()).amax() < 1e-15);
        for p in [0.25, 0.5, 0.9] {
            assert!(graph_type_identity_residual(&k, p).unwrap() <= 1e-12);
            assert!(graph_type_identity_residual(&torus(), p).unwrap() <= 1e-12);
        }
        let st = stationary_distribution(&w, &w.point_mass(2)).unwrap();
        assert!(st.spectral.iter().all(|&x| (x - 0.25).abs() < 1e-10));
        assert_eq!(st.eigenspace_dim, 1);
    }

    #[test]
    fn graph_type_preconditions() {
        let mobius =
            SimplicialComplex::from_facets([[0, 1, 2], [1, 2, 3], [2, 3, 4], [3, 4, 0], [4, 0, 1]]).unwrap();
        assert!(matches!(graph_type_down_walk(&mobius, 0.5, BoundaryPolicy::Open), Err(Error::NotOrientable { .. })));
        let filled = SimplicialComplex::from_facets([[0, 1, 2]]).unwrap();
        assert!(matches!(graph_type_down_walk(&filled, 0.5, BoundaryPolicy::Closed), Err(Error::FreeFaces { .. })));
        assert!(matches!(graph_type_down_walk(&filled, 0.5, BoundaryPolicy::Open), Err(Error::Stranded(_))));
        let strip = SimplicialComplex::from_facets([[0, 1, 2], [1, 2, 3]]).unwrap();
        let w = graph_type_down_walk(&strip, 0.5, BoundaryPolicy::Open).unwrap();
        assert_eq!(w.matrix.data[(0, 1)], 0.5);
    }

    #[test]
    fn periodic_chain_rejected() {
        // 4-cycle graph: disorientable, so p = 0 gives a period-2 chain
        let c4 = SimplicialComplex::from_facets((0..4).map(|i| [i, (i + 1) % 4])).unwrap();
        let w = graph_type_down_walk(&c4, 0.0, BoundaryPolicy::Closed).unwrap();
        assert_eq!(stationary_distribution(&w, &w.point_mass(0)).unwrap_err(), Error::Periodic);
        let w = graph_type_down_walk(&sphere(), 0.0, BoundaryPolicy::Closed).unwrap();
        assert!(stationary_distribution(&w, &w.point_mass(0)).is_ok());
    }

    #[test]
    fn torus_rates() {
        let fit = graph_type_convergence_rate(&torus(), 0.75, BoundaryPolicy::Closed, 0, 80).unwrap();
        assert!(fit.within_bound, "{} > {}", fit.fitted_ratio, fit.bound);
        let fit = graph_type_convergence_rate(&sphere(), 0.5, BoundaryPolicy::Closed, 0, 20).unwrap();
        assert!(fit.operator_norm_residual.unwrap() <= 1e-8);
        assert!((fit.bound - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lazy_one_is_flagged() {
        let fit = graph_type_convergence_rate(&sphere(), 1.0, BoundaryPolicy::Closed, 0, 5).unwrap();
        assert!(!fit.warnings.is_empty());
        assert!(fit.distances.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-15));
    }
}

//! The Dirichlet down walk on oriented `d`-simplexes with a death state.

use nalgebra::{DMatrix, DVector};

use super::{
    check_laziness, oriented_labels, threshold_warning, ConvergenceFit, ExpectationProcess, HomologyProbe,
    StateSpaceKind, TransitionOperator, Walk,
};
use crate::chain::{check_range, Cochain};
use crate::complex::{OrientedSimplex, Sign, SimplicialComplex, Weights};
use crate::error::{Error, Result};
use crate::hodge::{down_dense, project, spectrum, up_dense};
use crate::matrix::{max_abs_diff, simplex_labels, Label, OperatorMatrix};

/// Largest number of cofaces of a `(d-1)`-simplex.
pub fn max_lower_degree(complex: &SimplicialComplex, d: usize) -> Result<usize> {
    check_range("down walk", d, 1, complex.dim())?;
    Ok((0..complex.count(d - 1)).map(|r| complex.coface_count(d - 1, r)).max().unwrap_or(0))
}

fn move_probability(complex: &SimplicialComplex, d: usize, p: f64) -> Result<(usize, f64)> {
    check_laziness(p)?;
    let dmax = max_lower_degree(complex, d)?;
    if dmax <= 1 {
        return Err(Error::NoLowerAdjacency { dim: d, max_degree: dmax });
    }
    Ok((dmax, (1.0 - p) / ((dmax as f64 - 1.0) * (d as f64 + 1.0))))
}

/// States: `+σ` for all `σ`, then `-σ`, then death. Stay with `p`; move with
/// `(1-p)/((D_max-1)(d+1))` to every `±σ'` inducing the opposite orientation on a shared
/// face; the rest goes to death, which is absorbing.
pub fn down_walk_matrix(complex: &SimplicialComplex, d: usize, p: f64) -> Result<Walk> {
    let (_, q) = move_probability(complex, d, p)?;
    let n = complex.count(d);
    let death = 2 * n;
    let mut m = DMatrix::zeros(2 * n + 1, 2 * n + 1);
    for i in 0..n {
        for (block, sign) in [(0, Sign::Plus), (n, Sign::Minus)] {
            let from = block + i;
            m[(from, from)] += p;
            let mut moved = 0.0;
            for (k, &r) in complex.faces_of(d, i).iter().enumerate() {
                for &j in complex.cofaces_of(d - 1, r).iter().filter(|&&j| j != i) {
                    let other = complex.incidence(d, j, r).expect("coface relation");
                    let target = -(sign * Sign::parity(k) * other);
                    m[(from, if target == Sign::Plus { j } else { n + j })] += q;
                    moved += q;
                }
            }
            m[(from, death)] = (1.0 - p - moved).max(0.0);
        }
    }
    m[(death, death)] = 1.0;
    let mut labels = oriented_labels(complex.simplices(d));
    labels.push(Label::Death);
    Ok(Walk {
        kind: StateSpaceKind::OrientedWithDeath { dim: d },
        laziness: p,
        matrix: OperatorMatrix::new(labels.clone(), labels, m),
        reversing_measure: None,
    })
}

fn propagation(complex: &SimplicialComplex, d: usize, p: f64) -> Result<DMatrix<f64>> {
    let walk = down_walk_matrix(complex, d, p)?;
    let n = complex.count(d);
    let m = &walk.matrix.data;
    // column σ: where mass on +σ goes, as a signed difference
    Ok(DMatrix::from_fn(n, n, |e, s| m[(s, e)] - m[(s, n + e)]))
}

fn diagonal_coefficient(dmax: usize, p: f64) -> f64 {
    let m = dmax as f64;
    (p * (m - 2.0) + 1.0) / (m - 1.0)
}

/// `B[e, σ] = P(+σ → +e) - P(+σ → -e)`, with the residual of
/// `B = ((p(D_max-2)+1)/(D_max-1)) I - ((1-p)/((d+1)(D_max-1))) L^down_d` for constant weights.
pub fn down_propagation_matrix(complex: &SimplicialComplex, d: usize, p: f64) -> Result<TransitionOperator> {
    let (dmax, q) = move_probability(complex, d, p)?;
    let b = propagation(complex, d, p)?;
    let n = b.nrows();
    let closed = DMatrix::identity(n, n) * diagonal_coefficient(dmax, p)
        - down_dense(complex, d, &Weights::ones(complex)) * q;
    let residual = max_abs_diff(&b, &closed);
    let labels = simplex_labels(complex.simplices(d));
    Ok(TransitionOperator { operator: OperatorMatrix::new(labels.clone(), labels, b), residual })
}

/// `T f(σ) = f(+σ) - f(-σ)` from functions on the `2n + 1` walk states to cochains.
pub fn antisymmetrizer(n: usize) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(n, 2 * n + 1);
    for i in 0..n {
        t[(i, i)] = 1.0;
        t[(i, n + i)] = -1.0;
    }
    t
}

/// `max_{t <= t_max} |T (Pᵀ)^t - B^t T|`, entrywise.
pub fn intertwining_residual(complex: &SimplicialComplex, d: usize, p: f64, t_max: usize) -> Result<f64> {
    let forward = down_walk_matrix(complex, d, p)?.matrix.data.transpose();
    let b = propagation(complex, d, p)?;
    let t = antisymmetrizer(complex.count(d));
    let (mut lhs, mut rhs) = (t.clone(), t);
    let mut worst = 0.0f64;
    for _ in 0..=t_max {
        worst = worst.max(max_abs_diff(&lhs, &rhs));
        lhs = &lhs * &forward;
        rhs = &b * &rhs;
    }
    Ok(worst)
}

struct DownSetup {
    b: DMatrix<f64>,
    scale: f64,
    kernel: DMatrix<f64>,
    gap: Option<f64>,
    dmax: usize,
}

fn setup(complex: &SimplicialComplex, d: usize, p: f64) -> Result<DownSetup> {
    let (dmax, _) = move_probability(complex, d, p)?;
    let b = propagation(complex, d, p)?;
    let ones = vec![1.0; complex.count(d)];
    let spec = spectrum(&down_dense(complex, d, &Weights::ones(complex)), &ones)?;
    Ok(DownSetup {
        b,
        scale: 1.0 / diagonal_coefficient(dmax, p),
        kernel: spec.kernel_basis(),
        gap: spec.nonzero_eigenvalues().first().copied(),
        dmax,
    })
}

fn run_process(
    complex: &SimplicialComplex,
    s: &DownSetup,
    d: usize,
    start: &OrientedSimplex,
    p: f64,
    steps: usize,
) -> Result<ExpectationProcess> {
    if start.simplex.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: start.simplex.dim() });
    }
    let init = Cochain::indicator(complex, start)?;
    let ones = vec![1.0; complex.count(d)];
    let limit = project(&s.kernel, &ones, &init.values);
    let mut values = vec![init];
    for _ in 0..steps {
        let next: DVector<f64> = &s.b * &values.last().expect("nonempty").values * s.scale;
        values.push(Cochain { dim: d, values: next });
    }
    let final_distance = (&values.last().expect("nonempty").values - &limit).norm();
    let m = s.dmax as f64;
    Ok(ExpectationProcess {
        start: start.clone(),
        scale: s.scale,
        values,
        limit: Cochain { dim: d, values: limit },
        final_distance,
        warnings: threshold_warning(p, (m - 2.0) / (3.0 * m - 4.0), "down walk"),
    })
}

/// `Ẽ_n = ((D_max-1)/(p(D_max-2)+1))^n B^n 1_{[e]}`; the limit is the projection of the
/// start onto `ker L^down_d`.
pub fn expectation_process_down(
    complex: &SimplicialComplex,
    d: usize,
    start: &OrientedSimplex,
    p: f64,
    steps: usize,
) -> Result<ExpectationProcess> {
    run_process(complex, &setup(complex, d, p)?, d, start, p, steps)
}

/// Limits from every canonical start, projected onto `ker δ_d`. The rank is `β_d`.
pub fn down_homology_rank(complex: &SimplicialComplex, d: usize, p: f64) -> Result<HomologyProbe> {
    let s = setup(complex, d, p)?;
    let ones = vec![1.0; complex.count(d)];
    let cycles = spectrum(&up_dense(complex, d, &Weights::ones(complex)), &ones)?.kernel_basis();
    let mut limits = Vec::new();
    let mut projected = Vec::new();
    for sigma in complex.simplices(d) {
        let init = Cochain::indicator(complex, &OrientedSimplex::positive(sigma.clone()))?;
        let limit = project(&s.kernel, &ones, &init.values);
        projected.push(Cochain { dim: d, values: project(&cycles, &ones, &limit) });
        limits.push(Cochain { dim: d, values: limit });
    }
    Ok(HomologyProbe::new(limits, projected))
}

/// Distance from `Ẽ_n` to its limit against `1 - (1-p) λ_d / ((d+1)(p(D_max-2)+1))`, where
/// `λ_d` is the smallest nonzero eigenvalue of `L^down_d`.
pub fn down_convergence_rate(
    complex: &SimplicialComplex,
    d: usize,
    start: &OrientedSimplex,
    p: f64,
    steps: usize,
) -> Result<ConvergenceFit> {
    let s = setup(complex, d, p)?;
    let process = run_process(complex, &s, d, start, p, steps)?;
    let distances: Vec<f64> = process.values.iter().map(|e| (&e.values - &process.limit.values).norm()).collect();
    let m = s.dmax as f64;
    let lambda = s.gap.unwrap_or(0.0);
    let mut fit = ConvergenceFit::new(distances, 1.0 - (1.0 - p) * lambda / ((d as f64 + 1.0) * (p * (m - 2.0) + 1.0)));
    if p < 0.5 {
        fit.warnings.push(format!("rate bound is stated for laziness at least 1/2, got {p}"));
    }
    fit.warnings.extend(process.warnings);
    Ok(fit)
}

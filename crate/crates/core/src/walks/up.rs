//! The up walk on oriented `(N-1)`-simplexes.

use nalgebra::DMatrix;

use super::{
    check_laziness, oriented_labels, threshold_warning, ConvergenceFit, ExpectationProcess, HomologyProbe,
    StateSpaceKind, TransitionOperator, Walk,
};
use crate::chain::{check_range, Cochain};
use crate::complex::{OrientedSimplex, Sign, SimplicialComplex, WeightFunction, Weights};
use crate::error::{Error, Result};
use crate::hodge::{down_dense, project, spectrum, up_dense, weighted_norm};
use crate::matrix::{max_abs_diff, simplex_labels, OperatorMatrix};

fn check_up(complex: &SimplicialComplex, p: f64) -> Result<()> {
    check_laziness(p)?;
    check_range("up walk", complex.dim(), 2, usize::MAX)?;
    if let Some(f) = complex.facets().into_iter().find(|f| f.dim() < complex.dim()) {
        return Err(Error::NotPure(f));
    }
    Ok(())
}

/// Stay with probability `p`; otherwise pick a coface `τ` of `σ` uniformly and move to
/// one of the `N` other faces of `τ`, oriented so both induce the same orientation
/// on their shared `(N-2)`-face. Each move has probability `(1-p)/(N deg σ)`.
pub fn up_walk_matrix(complex: &SimplicialComplex, p: f64) -> Result<Walk> {
    check_up(complex, p)?;
    let n = complex.dim();
    let d = n - 1;
    let count = complex.count(d);
    let mut m = DMatrix::zeros(2 * count, 2 * count);
    for i in 0..count {
        let deg = complex.coface_count(d, i) as f64;
        let move_prob = (1.0 - p) / (n as f64 * deg);
        for (block, sign) in [(0, Sign::Plus), (count, Sign::Minus)] {
            let from = block + i;
            m[(from, from)] += p;
            for &t in complex.cofaces_of(d, i) {
                let faces = complex.faces_of(d + 1, t);
                let a = faces.iter().position(|&x| x == i).expect("face of its coface");
                for (b, &j) in faces.iter().enumerate().filter(|&(b, _)| b != a) {
                    let target = sign * -(Sign::parity(a) * Sign::parity(b));
                    let to = if target == Sign::Plus { j } else { count + j };
                    m[(from, to)] += move_prob;
                }
            }
        }
    }
    let labels = oriented_labels(complex.simplices(d));
    Ok(Walk {
        kind: StateSpaceKind::Oriented { dim: d },
        laziness: p,
        matrix: OperatorMatrix::new(labels.clone(), labels, m),
        reversing_measure: None,
    })
}

fn coefficients(n: usize, p: f64) -> (f64, f64) {
    let n = n as f64;
    ((p * (n - 1.0) + 1.0) / n, (1.0 - p) / n)
}

fn up_operator(complex: &SimplicialComplex, p: f64) -> Result<DMatrix<f64>> {
    let walk = up_walk_matrix(complex, p)?;
    let count = complex.count(complex.dim() - 1);
    let m = &walk.matrix.data;
    Ok(DMatrix::from_fn(count, count, |i, j| m[(i, j)] - m[(i, count + j)]))
}

/// The walk acting on antisymmetric functions, `(Af)(σ) = Σ_s P([σ]→s) f(s)`, with the
/// residual of `A = ((p(N-1)+1)/N) I - ((1-p)/N) L^up_{N-1}` under normalized weights.
pub fn up_transition_operator(complex: &SimplicialComplex, p: f64) -> Result<TransitionOperator> {
    let a = up_operator(complex, p)?;
    let n = complex.dim();
    let weights = WeightFunction::Normalized.resolve(complex)?;
    let (alpha, beta) = coefficients(n, p);
    let closed = DMatrix::identity(a.nrows(), a.nrows()) * alpha - up_dense(complex, n - 1, &weights) * beta;
    let residual = max_abs_diff(&a, &closed);
    let labels = simplex_labels(complex.simplices(n - 1));
    Ok(TransitionOperator { operator: OperatorMatrix::new(labels.clone(), labels, a), residual })
}

struct UpSetup {
    operator: DMatrix<f64>,
    scale: f64,
    weights: Weights,
    kernel: DMatrix<f64>,
    essential_gap: Option<f64>,
}

fn setup(complex: &SimplicialComplex, p: f64) -> Result<UpSetup> {
    let operator = up_operator(complex, p)?;
    let n = complex.dim();
    let weights = WeightFunction::Normalized.resolve(complex)?;
    let spec = spectrum(&up_dense(complex, n - 1, &weights), weights.at(n - 1))?;
    let essential_gap = spec.nonzero_eigenvalues().first().copied();
    Ok(UpSetup { operator, scale: 1.0 / coefficients(n, p).0, kernel: spec.kernel_basis(), weights, essential_gap })
}

fn run_process(
    complex: &SimplicialComplex,
    s: &UpSetup,
    start: &OrientedSimplex,
    p: f64,
    steps: usize,
) -> Result<ExpectationProcess> {
    let n = complex.dim();
    if start.simplex.dim() != n - 1 {
        return Err(Error::DimensionMismatch { expected: n - 1, found: start.simplex.dim() });
    }
    let init = Cochain::indicator(complex, start)?;
    let w = s.weights.at(n - 1);
    let limit = project(&s.kernel, w, &init.values);
    let mut values = vec![init];
    for _ in 0..steps {
        let next = &s.operator * &values.last().expect("nonempty").values * s.scale;
        values.push(Cochain { dim: n - 1, values: next });
    }
    let final_distance = weighted_norm(w, &(&values.last().expect("nonempty").values - &limit));
    let threshold = (n as f64 - 1.0) / (3.0 * n as f64 - 1.0);
    Ok(ExpectationProcess {
        start: start.clone(),
        scale: s.scale,
        values,
        limit: Cochain { dim: n - 1, values: limit },
        final_distance,
        warnings: threshold_warning(p, threshold, "up walk"),
    })
}

/// `Ẽ_t = (N/(p(N-1)+1))^t A^t 1_{[σ_0]}`; the limit is the weighted projection of the
/// start onto `ker L^up_{N-1}`.
pub fn expectation_process_up(
    complex: &SimplicialComplex,
    start: &OrientedSimplex,
    p: f64,
    steps: usize,
) -> Result<ExpectationProcess> {
    run_process(complex, &setup(complex, p)?, start, p, steps)
}

/// Limits from every canonical start, projected onto `ker δ*_{N-2}`. The rank is `β_{N-1}`.
pub fn up_homology_rank(complex: &SimplicialComplex, p: f64) -> Result<HomologyProbe> {
    let s = setup(complex, p)?;
    let n = complex.dim();
    let w = s.weights.at(n - 1);
    let cocycles = spectrum(&down_dense(complex, n - 1, &s.weights), w)?.kernel_basis();
    let mut limits = Vec::new();
    let mut projected = Vec::new();
    for sigma in complex.simplices(n - 1) {
        let init = Cochain::indicator(complex, &OrientedSimplex::positive(sigma.clone()))?;
        let limit = project(&s.kernel, w, &init.values);
        projected.push(Cochain { dim: n - 1, values: project(&cocycles, w, &limit) });
        limits.push(Cochain { dim: n - 1, values: limit });
    }
    Ok(HomologyProbe::new(limits, projected))
}

/// Weighted distance from `Ẽ_t` to its limit against `1 - (1-p) λ̄ / (p(N-1)+1)`, where `λ̄`
/// is the smallest nonzero eigenvalue of `L^up_{N-1}`.
pub fn up_convergence_rate(
    complex: &SimplicialComplex,
    start: &OrientedSimplex,
    p: f64,
    steps: usize,
) -> Result<ConvergenceFit> {
    let s = setup(complex, p)?;
    let n = complex.dim() as f64;
    let process = run_process(complex, &s, start, p, steps)?;
    let w = s.weights.at(complex.dim() - 1);
    let distances: Vec<f64> =
        process.values.iter().map(|e| weighted_norm(w, &(&e.values - &process.limit.values))).collect();
    let lambda = s.essential_gap.unwrap_or(0.0);
    let mut fit = ConvergenceFit::new(distances, 1.0 - (1.0 - p) * lambda / (p * (n - 1.0) + 1.0));
    if p < 0.5 {
        fit.warnings.push(format!("rate bound is stated for laziness at least 1/2, got {p}"));
    }
    fit.warnings.extend(process.warnings);
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Simplex;

    fn filled() -> SimplicialComplex {
        SimplicialComplex::from_facets([[0, 1, 2]]).unwrap()
    }
    fn sphere() -> SimplicialComplex {
        SimplicialComplex::from_facets([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
    }
    fn annulus() -> SimplicialComplex {
        SimplicialComplex::from_facets([[0, 1, 3], [1, 3, 4], [1, 2, 4], [2, 4, 5], [0, 2, 5], [0, 3, 5]]).unwrap()
    }
    fn plus(v: &[usize]) -> OrientedSimplex {
        OrientedSimplex::positive(Simplex::new(v.iter().copied()).unwrap())
    }

    #[test]
    fn sphere_edge_moves() {
        // each edge of ∂Δ³ has two cofaces, each giving two co-neighbours: 4 moves of 1/8
        let w = up_walk_matrix(&sphere(), 0.5).unwrap();
        let row = w.matrix.data.row(0);
        let moves: Vec<f64> = row.iter().copied().filter(|&x| x > 0.0 && x != 0.5).collect();
        assert_eq!(moves, vec![0.125; 4]);
        assert!(w.row_sum_defect() <= 1e-12);
        assert_eq!(w.len(), 12);
    }

    #[test]
    fn moves_preserve_induced_orientation() {
        // from +[0,1] in [0,1,2]: co-neighbours induce the same orientation on the shared vertex
        let w = up_walk_matrix(&filled(), 0.0).unwrap();
        let labels = w.states();
        let targets: Vec<String> =
            (0..6).filter(|&j| w.matrix.data[(0, j)] > 0.0).map(|j| labels[j].to_string()).collect();
        // ∂[0,1] = [1] - [0]: +[0,2] also gives [0] a minus sign, -[1,2] = [2,1] gives [1] a plus sign
        assert_eq!(targets, vec!["+[0,2]", "-[1,2]"]);
    }

    #[test]
    fn operator_identity() {
        for k in [filled(), sphere(), annulus()] {
            for p in [0.0, 0.3, 0.5, 0.9] {
                assert!(up_transition_operator(&k, p).unwrap().residual <= 1e-12);
            }
        }
    }

    #[test]
    fn preconditions() {
        let hollow = SimplicialComplex::from_facets([[0, 1], [1, 2], [0, 2]]).unwrap();
        assert!(matches!(up_walk_matrix(&hollow, 0.5), Err(Error::DimensionOutOfRange { .. })));
        let dangling = SimplicialComplex::from_facets([vec![0, 1, 2], vec![2, 3]]).unwrap();
        assert!(matches!(up_walk_matrix(&dangling, 0.5), Err(Error::NotPure(_))));
        assert!(matches!(up_walk_matrix(&filled(), -0.1), Err(Error::InvalidLaziness(_))));
    }

    #[test]
    fn reversed_start_negates_process() {
        let k = sphere();
        let a = expectation_process_up(&k, &plus(&[0, 1]), 0.5, 10).unwrap();
        let b = expectation_process_up(&k, &plus(&[0, 1]).reversed(), 0.5, 10).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_eq!(x.values, -&y.values);
        }
    }

    #[test]
    fn sphere_limit_is_reached() {
        let e = expectation_process_up(&sphere(), &plus(&[1, 3]), 0.5, 80).unwrap();
        assert!(e.final_distance < 1e-10);
        assert!(e.warnings.is_empty());
        let low = expectation_process_up(&sphere(), &plus(&[1, 3]), 0.1, 3).unwrap();
        assert_eq!(low.warnings.len(), 1);
    }

    #[test]
    fn homology_ranks() {
        assert_eq!(up_homology_rank(&sphere(), 0.5).unwrap().rank, 0);
        assert_eq!(up_homology_rank(&filled(), 0.5).unwrap().rank, 0);
        let probe = up_homology_rank(&annulus(), 0.5).unwrap();
        assert_eq!(probe.rank, 1);
        assert!(probe.trivial_starts().iter().any(|t| !t));
    }

    #[test]
    fn rates() {
        let fit = up_convergence_rate(&sphere(), &plus(&[0, 1]), 0.5, 40).unwrap();
        assert!(fit.within_bound, "{} > {}", fit.fitted_ratio, fit.bound);
        let slow = up_convergence_rate(&sphere(), &plus(&[0, 1]), 0.95, 40).unwrap();
        assert!(slow.fitted_ratio > fit.fitted_ratio);
    }
}

//! Random walks on vertices, oriented simplexes and top simplexes, their
//! operator identities, limits and convergence rates.

mod down;
mod graph;
mod monte_carlo;
mod up;

pub use down::{
    antisymmetrizer, down_convergence_rate, down_homology_rank, down_propagation_matrix, down_walk_matrix,
    expectation_process_down, intertwining_residual, max_lower_degree,
};
pub use graph::{
    graph_type_convergence_rate, graph_type_down_walk, graph_type_identity_residual, graph_walk_convergence_rate,
    graph_walk_identity_residual, graph_walk_matrix, stationary_distribution, BoundaryPolicy, Stationary,
};
pub use monte_carlo::{monte_carlo, MonteCarloConfig, MonteCarloResult};
pub use up::{expectation_process_up, up_convergence_rate, up_homology_rank, up_transition_operator, up_walk_matrix};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::Cochain;
use crate::complex::{OrientedSimplex, Sign, Simplex};
use crate::error::{Error, Result};
use crate::matrix::{Label, OperatorMatrix};

/// Tolerance for row sums of transition matrices.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-12;
/// Slack allowed between a fitted decay ratio and its theoretical bound.
pub const RATE_TOLERANCE: f64 = 1e-6;
/// Singular values above this count towards the rank of a set of limits.
pub const RANK_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpaceKind {
    Vertices,
    /// Both orientations of every `dim`-simplex: all `+` first, then all `-`.
    Oriented { dim: usize },
    /// As `Oriented`, followed by the death state.
    OrientedWithDeath { dim: usize },
    /// Top simplexes carrying a fixed orientation.
    TopSimplices,
}

/// A finite Markov chain. `matrix[(i, j)]` is the probability of moving from state `i` to `j`.
#[derive(Clone, Debug)]
pub struct Walk {
    pub kind: StateSpaceKind,
    pub laziness: f64,
    pub matrix: OperatorMatrix,
    /// A measure `θ` with `θ_i P_ij = θ_j P_ji`, when known.
    pub reversing_measure: Option<Vec<f64>>,
}

impl Walk {
    pub fn states(&self) -> &[Label] {
        &self.matrix.rows
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn state_index(&self, label: &Label) -> Option<usize> {
        self.states().iter().position(|l| l == label)
    }

    /// Index of the state matching `label`, accepting plain simplex names for oriented states.
    pub fn find_state(&self, label: &Label) -> Result<usize> {
        if let Some(i) = self.state_index(label) {
            return Ok(i);
        }
        let positive = match label {
            Label::Simplex(s) => Some(Label::Oriented(OrientedSimplex::positive(s.clone()))),
            Label::Oriented(o) if o.sign == Sign::Plus => Some(Label::Simplex(o.simplex.clone())),
            _ => None,
        };
        if let Some(i) = positive.and_then(|l| self.state_index(&l)) {
            return Ok(i);
        }
        Err(Error::InvalidArgument(format!("{label} is not a state of this walk")))
    }

    pub fn point_mass(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.len());
        v[i] = 1.0;
        v
    }

    /// One step of a distribution: `μ ↦ Pᵀ μ`.
    pub fn step(&self, mu: &DVector<f64>) -> DVector<f64> {
        self.matrix.data.tr_mul(mu)
    }

    pub fn evolve(&self, mu: &DVector<f64>, steps: usize) -> DVector<f64> {
        (0..steps).fold(mu.clone(), |m, _| self.step(&m))
    }

    /// Largest `|row sum - 1|`.
    pub fn row_sum_defect(&self) -> f64 {
        self.matrix.data.row_iter().map(|r| (r.sum() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.matrix.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn check_laziness(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidLaziness(p));
    }
    Ok(())
}

pub(crate) fn oriented_labels(simplices: &[Simplex]) -> Vec<Label> {
    [Sign::Plus, Sign::Minus]
        .into_iter()
        .flat_map(|sign| simplices.iter().map(move |s| Label::Oriented(OrientedSimplex { simplex: s.clone(), sign })))
        .collect()
}

/// An operator derived from a walk together with the residual of its closed-form identity.
#[derive(Clone, Debug)]
pub struct TransitionOperator {
    pub operator: OperatorMatrix,
    /// Largest entrywise deviation from the closed form.
    pub residual: f64,
}

/// `Ẽ_t = scale^t X^t 1_start` for `t = 0..=steps`, and its limit.
#[derive(Clone, Debug)]
pub struct ExpectationProcess {
    pub start: OrientedSimplex,
    pub scale: f64,
    pub values: Vec<Cochain>,
    /// Eigenprojection of the start indicator onto the top eigenspace.
    pub limit: Cochain,
    /// Weighted distance between the last iterate and the limit.
    pub final_distance: f64,
    pub warnings: Vec<String>,
}

/// How many independent directions the walk limits span after projecting onto a
/// complement of the boundaries.
#[derive(Clone, Debug)]
pub struct HomologyProbe {
    pub limits: Vec<Cochain>,
    pub projected: Vec<Cochain>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub tolerance: f64,
}

impl HomologyProbe {
    pub(crate) fn new(limits: Vec<Cochain>, projected: Vec<Cochain>) -> Self {
        let n = projected.first().map_or(0, |c| c.values.len());
        let m = DMatrix::from_fn(n, projected.len(), |r, c| projected[c].values[r]);
        let singular_values: Vec<f64> =
            if m.is_empty() { Vec::new() } else { m.svd(false, false).singular_values.iter().copied().collect() };
        let rank = singular_values.iter().filter(|&&s| s > RANK_TOLERANCE).count();
        HomologyProbe { limits, projected, singular_values, rank, tolerance: RANK_TOLERANCE }
    }

    /// Starts whose limit is a boundary, i.e. whose projection vanishes.
    pub fn trivial_starts(&self) -> Vec<bool> {
        self.projected.iter().map(|c| c.values.amax() <= RANK_TOLERANCE).collect()
    }
}

/// Measured decay of `dist(x_t, x_∞)` against a theoretical geometric rate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceFit {
    pub distances: Vec<f64>,
    /// Total variation distances, for probability vectors.
    pub total_variation: Option<Vec<f64>>,
    pub fitted_ratio: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub within_bound: bool,
    /// `max_t |‖M^t - P‖ - bound^t|`, when checked.
    pub operator_norm_residual: Option<f64>,
    pub warnings: Vec<String>,
}

impl ConvergenceFit {
    pub(crate) fn new(distances: Vec<f64>, bound: f64) -> Self {
        let fitted_ratio = fit_geometric_ratio(&distances);
        ConvergenceFit {
            within_bound: fitted_ratio <= bound + RATE_TOLERANCE,
            distances,
            total_variation: None,
            fitted_ratio,
            bound,
            tolerance: RATE_TOLERANCE,
            operator_norm_residual: None,
            warnings: Vec::new(),
        }
    }

    /// `(t, distance, bound · distance_0)` rows.
    pub fn rows(&self) -> Vec<(usize, f64, f64)> {
        let d0 = self.distances.first().copied().unwrap_or(0.0);
        self.distances.iter().enumerate().map(|(t, &d)| (t, d, d0 * self.bound.powi(t as i32))).collect()
    }
}

/// Least-squares slope of `log d_t`, exponentiated, over the steps still well above round-off.
/// Zero when the sequence starts (or immediately lands) at zero.
pub fn fit_geometric_ratio(distances: &[f64]) -> f64 {
    let Some(&d0) = distances.first() else { return 0.0 };
    if d0.is_nan() || d0 <= 1e-300 {
        return 0.0;
    }
    let floor = d0 * 1e-10;
    let pts: Vec<(f64, f64)> =
        distances.iter().enumerate().take_while(|(_, &d)| d > floor).map(|(t, &d)| (t as f64, d.ln())).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxy / sxx).exp()
}

pub(crate) fn threshold_warning(p: f64, threshold: f64, what: &str) -> Vec<String> {
    let mut w = Vec::new();
    if p <= threshold {
        w.push(format!("laziness {p} is at or below {threshold:.6}, the guaranteed-limit threshold for the {what}"));
    }
    if p >= 1.0 {
        w.push(format!("laziness 1 makes the {what} constant"));
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_fit_recovers_ratio() {
        let d: Vec<f64> = (0..30).map(|t| 3.0 * 0.4f64.powi(t)).collect();
        assert!((fit_geometric_ratio(&d) - 0.4).abs() < 1e-12);
        assert_eq!(fit_geometric_ratio(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(fit_geometric_ratio(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn laziness_range() {
        assert!(check_laziness(0.0).is_ok());
        assert!(check_laziness(1.0).is_ok());
        assert_eq!(check_laziness(1.5), Err(Error::InvalidLaziness(1.5)));
        assert!(check_laziness(f64::NAN).is_err());
    }
}

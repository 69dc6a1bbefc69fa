//! Seeded trajectory sampling of any walk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{StateSpaceKind, Walk};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub steps: usize,
    pub chains: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub config: MonteCarloConfig,
    pub start: usize,
    /// Number of chains ending in each state.
    pub counts: Vec<u64>,
    pub empirical: Vec<f64>,
    /// Row `start` of `P^steps`.
    pub exact: Vec<f64>,
    pub max_deviation: f64,
    /// `4 sqrt(0.25 / chains)`, four binomial standard errors at worst case.
    pub tolerance: f64,
    /// `f(+σ) - f(-σ)` of the empirical and exact marginals, for oriented walks.
    pub antisymmetrized: Option<(Vec<f64>, Vec<f64>)>,
}

impl MonteCarloResult {
    pub fn within_tolerance(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

// Per-row cumulative distributions over the nonzero entries.
fn cumulative_rows(walk: &Walk) -> Vec<Vec<(f64, usize)>> {
    walk.matrix
        .data
        .row_iter()
        .map(|row| {
            let mut acc = 0.0;
            row.iter()
                .enumerate()
                .filter(|(_, &x)| x > 0.0)
                .map(|(j, &x)| {
                    acc += x;
                    (acc, j)
                })
                .collect()
        })
        .collect()
}

fn sample(row: &[(f64, usize)], u: f64) -> usize {
    let total = row.last().map_or(1.0, |r| r.0);
    let k = row.partition_point(|&(c, _)| c <= u * total);
    row[k.min(row.len() - 1)].1
}

/// Runs `chains` independent trajectories of `steps` steps from `start`. Chain `c` draws from
/// a ChaCha8 stream seeded with `seed` on stream `c`, so the result does not depend on how
/// chains are scheduled across threads.
pub fn monte_carlo(walk: &Walk, start: usize, config: MonteCarloConfig) -> Result<MonteCarloResult> {
    if config.chains == 0 {
        return Err(Error::InvalidArgument("at least one chain is required".into()));
    }
    if start >= walk.len() {
        return Err(Error::InvalidArgument(format!("start state {start} out of range")));
    }
    let rows = cumulative_rows(walk);
    let n = walk.len();
    let counts = (0..config.chains)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, chain| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(chain as u64);
                let mut state = start;
                for _ in 0..config.steps {
                    state = sample(&rows[state], rng.random::<f64>());
                }
                acc[state] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / config.chains as f64).collect();
    let exact: Vec<f64> = walk.evolve(&walk.point_mass(start), config.steps).iter().copied().collect();
    let max_deviation = empirical.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let antisymmetrized = match walk.kind {
        StateSpaceKind::Oriented { .. } | StateSpaceKind::OrientedWithDeath { .. } => {
            let half = n / 2;
            let diff = |v: &[f64]| -> Vec<f64> { (0..half).map(|i| v[i] - v[half + i]).collect() };
            Some((diff(&empirical), diff(&exact)))
        }
        _ => None,
    };
    Ok(MonteCarloResult {
        config,
        start,
        counts,
        empirical,
        exact,
        max_deviation,
        tolerance: 4.0 * (0.25 / config.chains as f64).sqrt(),
        antisymmetrized,
    })
}

//! Exact Monte Carlo sampling of the disk counts.
//!
//! The squared-and-powered moduli `V_j = |z_j|^{2b}` of a rotation-invariant
//! ensemble are independent with `V_j ~ Gamma(shape (j+alpha)/b, rate n)`, so
//! `N(r) = #{j : V_j < r^{2b}}` can be drawn without any angular sampling.
//!
//! Replica `i` uses ChaCha8 seeded from `seed` on stream `i`. Replicas never
//! share a generator, so the output does not depend on the thread count.

mod law;
mod standardize;
mod stats;

pub use law::{count_pmf, ks_critical_value, ks_distance, poisson_binomial_pmf};
pub use standardize::{standardize, standardize_centered};
pub use stats::{
    column_cumulants, empirical_correlation, empirical_cumulants, CumulantEstimate, MAX_SAMPLE_ORDER, MIN_REPLICAS,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::ensemble::EnsembleParams;
use crate::error::{Error, Result};

/// Default cap on `replicas * n` gamma draws per batch.
pub const DEFAULT_DRAW_BUDGET: u64 = 1 << 34;

/// Joint counts for a batch of independent replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    /// `counts[i][l]` is `N(r_l)` in replica `i`.
    pub counts: Vec<Vec<u32>>,
    pub seed: u64,
    pub params: EnsembleParams,
    pub radii: Vec<f64>,
}

impl SampleBatch {
    pub fn replicas(&self) -> usize {
        self.counts.len()
    }

    pub fn m(&self) -> usize {
        self.radii.len()
    }

    pub fn column(&self, l: usize) -> Vec<f64> {
        self.counts.iter().map(|row| f64::from(row[l])).collect()
    }
}

fn check_sampling_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::param("radii", "need at least one radius"));
    }
    // +inf is allowed: the disk then holds every point
    if radii.iter().any(|r| r.is_nan() || *r <= 0.0) {
        return Err(Error::param("radii", "must be positive"));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("radii", "must be strictly increasing"));
    }
    Ok(())
}

/// [`sample_counts_with_budget`] with [`DEFAULT_DRAW_BUDGET`].
pub fn sample_counts(params: &EnsembleParams, radii: &[f64], replicas: usize, seed: u64) -> Result<SampleBatch> {
    sample_counts_with_budget(params, radii, replicas, seed, DEFAULT_DRAW_BUDGET)
}

/// Draws `replicas` independent copies of `(N(r_1), .., N(r_m))`.
pub fn sample_counts_with_budget(
    params: &EnsembleParams,
    radii: &[f64],
    replicas: usize,
    seed: u64,
    budget: u64,
) -> Result<SampleBatch> {
    if replicas == 0 {
        return Err(Error::param("replicas", "must be at least 1"));
    }
    check_sampling_radii(radii)?;
    let n = params.n();
    let requested = replicas as u128 * n as u128;
    if requested > u128::from(budget) {
        return Err(Error::BudgetExceeded { requested, cap: budget });
    }
    let b = params.b();
    let thresholds: Vec<f64> = radii.iter().map(|r| r.powf(2.0 * b)).collect();
    let laws = (1..=n)
        .map(|j| {
            Gamma::new(params.shape(j), 1.0 / n as f64)
                .map_err(|e| Error::Numerical(format!("gamma law for row {j}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = radii.len();

    let counts = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            // hist[l]: points whose smallest enclosing disk is r_l
            let mut hist = vec![0u32; m + 1];
            for law in &laws {
                let v: f64 = law.sample(&mut rng);
                hist[thresholds.partition_point(|&t| t <= v)] += 1;
            }
            let mut row = Vec::with_capacity(m);
            let mut acc = 0;
            for h in &hist[..m] {
                acc += h;
                row.push(acc);
            }
            row
        })
        .collect();

    Ok(SampleBatch {
        counts,
        seed,
        params: *params,
        radii: radii.to_vec(),
    })
}

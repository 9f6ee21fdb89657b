//! The exact Poisson-binomial law of a single count and the
//! Kolmogorov-Smirnov distance to it.

use crate::ensemble::EnsembleParams;
use crate::error::{Error, Result};
use crate::special::reg_lower_gamma;

/// Law of a sum of independent Bernoulli(`p_j`) variables, by convolution.
pub fn poisson_binomial_pmf(probs: &[f64]) -> Result<Vec<f64>> {
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::param("probs", "success probabilities must lie in [0, 1]"));
    }
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (j, &p) in probs.iter().enumerate() {
        for k in (1..=j + 1).rev() {
            pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    Ok(pmf)
}

/// Exact law of `N(r)`: success probabilities `P((j+alpha)/b, n r^{2b})`.
pub fn count_pmf(params: &EnsembleParams, r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be positive and finite, got {r}")));
    }
    let z = params.gamma_argument(r);
    let probs = (1..=params.n())
        .map(|j| reg_lower_gamma(params.shape(j), z))
        .collect::<Result<Vec<_>>>()?;
    poisson_binomial_pmf(&probs)
}

/// `sup_k |F_emp(k) - F(k)|` for integer samples against the pmf `pmf`.
pub fn ks_distance(sample: &[u32], pmf: &[f64]) -> f64 {
    let mut freq = vec![0usize; pmf.len()];
    let mut outside = 0usize;
    for &x in sample {
        match freq.get_mut(x as usize) {
            Some(f) => *f += 1,
            None => outside += 1,
        }
    }
    let total = sample.len() as f64;
    let (mut emp, mut cdf, mut d) = (0.0, 0.0, 0.0f64);
    for (f, p) in freq.iter().zip(pmf) {
        emp += *f as f64 / total;
        cdf += p;
        d = d.max((emp - cdf).abs());
    }
    if outside > 0 {
        d = d.max(1.0);
    }
    d
}

/// Asymptotic Kolmogorov critical value `sqrt(-ln(level/2)/2) / sqrt(size)`.
///
/// Conservative for discrete laws.
pub fn ks_critical_value(level: f64, size: usize) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt() / (size as f64).sqrt()
}

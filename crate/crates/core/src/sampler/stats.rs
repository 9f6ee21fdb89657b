//! Unbiased joint cumulant estimates (k-statistics) with jackknife errors.
//!
//! A joint cumulant of `X_1..X_p` is `sum_pi (-1)^{|pi|-1} (|pi|-1)! prod_B E[X_B]`.
//! Each product of moments over distinct blocks is estimated without bias by
//! a sum over distinct replica indices divided by the falling factorial
//! `(N)_|pi|`. Those sums reduce to power sums `s_B = sum_i prod_{j in B} X_ij`
//! by Moebius inversion on the partition lattice. Power sums of a leave-one-out
//! sample are `s_B - x_i^B`, which makes the jackknife O(N).

use super::SampleBatch;
use crate::error::{Error, Result};

/// Largest total order accepted by [`empirical_cumulants`].
pub const MAX_SAMPLE_ORDER: u32 = 4;

/// Fewest replicas accepted by [`empirical_cumulants`].
pub const MIN_REPLICAS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// All set partitions of `{0..p-1}`, each as a list of bit masks.
fn set_partitions(p: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for i in 0..p {
        let bit = 1u32 << i;
        let mut next = Vec::new();
        for part in &out {
            for b in 0..part.len() {
                let mut q = part.clone();
                q[b] |= bit;
                next.push(q);
            }
            let mut q = part.clone();
            q.push(bit);
            next.push(q);
        }
        out = next;
    }
    out
}

fn mobius(k: usize) -> f64 {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * (1..k).map(|i| i as f64).product::<f64>()
}

/// `(weight, masks)`: the cumulant estimator is
/// `sum_terms weight / (N)_nu * prod s[mask]`, grouped by `nu`.
struct Estimator {
    terms: Vec<(usize, f64, Vec<u32>)>,
}

impl Estimator {
    fn new(p: usize) -> Self {
        let mut terms = Vec::new();
        for pi in set_partitions(p) {
            let nu = pi.len();
            let outer = mobius(nu);
            for rho in set_partitions(nu) {
                let mut weight = outer;
                let mut masks = Vec::with_capacity(rho.len());
                for group in rho {
                    weight *= mobius(group.count_ones() as usize);
                    masks.push((0..nu).filter(|b| group >> b & 1 == 1).fold(0, |acc, b| acc | pi[b]));
                }
                terms.push((nu, weight, masks));
            }
        }
        Self { terms }
    }

    fn eval(&self, sums: &[f64], count: f64) -> f64 {
        self.terms
            .iter()
            .map(|(nu, w, masks)| {
                let falling: f64 = (0..*nu).map(|i| count - i as f64).product();
                w / falling * masks.iter().map(|&m| sums[m as usize]).product::<f64>()
            })
            .sum()
    }
}

fn jackknife(full: f64, leave_one_out: impl Iterator<Item = f64>, count: usize) -> CumulantEstimate {
    let loo: Vec<f64> = leave_one_out.collect();
    let mean = loo.iter().sum::<f64>() / count as f64;
    let ss: f64 = loo.iter().map(|x| (x - mean) * (x - mean)).sum();
    CumulantEstimate {
        estimate: full,
        stderr: ((count - 1) as f64 / count as f64 * ss).sqrt(),
    }
}

/// Joint k-statistic of `columns[vars[0]], .., columns[vars[p-1]]`.
fn k_statistic(columns: &[Vec<f64>], vars: &[usize]) -> CumulantEstimate {
    let p = vars.len();
    let count = columns[vars[0]].len();
    // cumulants of order >= 2 do not see the shift; centering avoids cancellation
    let shifts: Vec<f64> = vars
        .iter()
        .map(|&v| columns[v].iter().sum::<f64>() / count as f64)
        .collect();
    let nmask = 1usize << p;
    let mut per_row = vec![0.0; count * nmask];
    let mut sums = vec![0.0; nmask];
    for i in 0..count {
        let row = &mut per_row[i * nmask..(i + 1) * nmask];
        row[0] = 1.0;
        for mask in 1..nmask {
            let low = mask.trailing_zeros() as usize;
            row[mask] = row[mask & (mask - 1)] * (columns[vars[low]][i] - shifts[low]);
            sums[mask] += row[mask];
        }
    }
    let est = Estimator::new(p);
    let offset = if p == 1 { shifts[0] } else { 0.0 };
    let full = est.eval(&sums, count as f64) + offset;
    let mut loo_sums = vec![0.0; nmask];
    let loo = (0..count).map(|i| {
        let row = &per_row[i * nmask..(i + 1) * nmask];
        for mask in 1..nmask {
            loo_sums[mask] = sums[mask] - row[mask];
        }
        est.eval(&loo_sums, (count - 1) as f64) + offset
    });
    jackknife(full, loo, count)
}

/// k-statistic for the multi-index `jvec` over the columns of `batch`.
pub fn empirical_cumulants(batch: &SampleBatch, jvec: &[u32]) -> Result<CumulantEstimate> {
    let columns: Vec<Vec<f64>> = (0..batch.m()).map(|l| batch.column(l)).collect();
    column_cumulants(&columns, jvec)
}

/// k-statistic for the multi-index `jvec` over equally long real columns.
pub fn column_cumulants(columns: &[Vec<f64>], jvec: &[u32]) -> Result<CumulantEstimate> {
    if jvec.len() != columns.len() {
        return Err(Error::param(
            "jvec",
            format!("multi-index has {} entries for {} columns", jvec.len(), columns.len()),
        ));
    }
    let order: u32 = jvec.iter().sum();
    if order == 0 || order > MAX_SAMPLE_ORDER {
        return Err(Error::Unsupported(format!(
            "sample cumulants need total order 1..={MAX_SAMPLE_ORDER}, got {order}"
        )));
    }
    let count = columns[0].len();
    if columns.iter().any(|c| c.len() != count) {
        return Err(Error::param("columns", "columns differ in length"));
    }
    if count < MIN_REPLICAS {
        return Err(Error::InsufficientData(format!(
            "{count} replicas, at least {MIN_REPLICAS} needed"
        )));
    }
    let vars: Vec<usize> = jvec
        .iter()
        .enumerate()
        .flat_map(|(l, &k)| std::iter::repeat_n(l, k as usize))
        .collect();
    Ok(k_statistic(columns, &vars))
}

/// Pearson correlation of columns `l` and `k` of `data` (rows are replicas).
pub fn empirical_correlation(data: &[Vec<f64>], l: usize, k: usize) -> Result<CumulantEstimate> {
    let count = data.len();
    if count < MIN_REPLICAS {
        return Err(Error::InsufficientData(format!(
            "{count} rows, at least {MIN_REPLICAS} needed"
        )));
    }
    if data.iter().any(|row| row.len() <= l.max(k)) {
        return Err(Error::param("columns", "column index out of range"));
    }
    let mx = data.iter().map(|r| r[l]).sum::<f64>() / count as f64;
    let my = data.iter().map(|r| r[k]).sum::<f64>() / count as f64;
    let mut s = [0.0f64; 5];
    for r in data {
        let (x, y) = (r[l] - mx, r[k] - my);
        for (acc, v) in s.iter_mut().zip([x, y, x * x, y * y, x * y]) {
            *acc += v;
        }
    }
    let corr = |s: &[f64; 5], c: f64| {
        let cxy = s[4] - s[0] * s[1] / c;
        let cxx = s[2] - s[0] * s[0] / c;
        let cyy = s[3] - s[1] * s[1] / c;
        cxy / (cxx * cyy).sqrt()
    };
    let full = corr(&s, count as f64);
    if !full.is_finite() {
        return Err(Error::InsufficientData("a column has zero variance".into()));
    }
    let loo = data.iter().map(|r| {
        let (x, y) = (r[l] - mx, r[k] - my);
        let t = [s[0] - x, s[1] - y, s[2] - x * x, s[3] - y * y, s[4] - x * y];
        corr(&t, (count - 1) as f64)
    });
    Ok(jackknife(full, loo, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Vec<f64> {
        // deterministic, skewed, non-degenerate
        (0..n)
            .map(|i| ((i * 7919) % 101) as f64 * 0.1 + ((i % 7) as f64).powi(2))
            .collect()
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        let bell: Vec<usize> = (1..=4).map(|p| set_partitions(p).len()).collect();
        assert_eq!(bell, [1, 2, 5, 15]);
    }

    #[test]
    fn univariate_k_statistics_match_textbook_formulas() {
        let x = sample(257);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let m = |k: i32| x.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / n;
        let (m2, m3, m4) = (m(2), m(3), m(4));
        let k2 = n / (n - 1.0) * m2;
        let k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
        let k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
        let cols = vec![x.clone()];
        for (p, want) in [(1, mean), (2, k2), (3, k3), (4, k4)] {
            let got = k_statistic(&cols, &vec![0; p]).estimate;
            assert!(
                (got - want).abs() < 1e-10 * want.abs().max(1.0),
                "order {p}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn bivariate_order_two_is_sample_covariance() {
        let x = sample(300);
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * 0.5 + (i % 5) as f64).collect();
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let cov = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
        let got = k_statistic(&[x, y], &[0, 1]).estimate;
        assert!((got - cov).abs() < 1e-12 * cov.abs());
    }

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let x = sample(400);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let got = k_statistic(&[x], &[0]);
        assert!((got.stderr - (var / n).sqrt()).abs() < 1e-12);
    }
}

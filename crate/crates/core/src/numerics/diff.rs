//! Mixed partial derivatives by central finite differences with Richardson
//! extrapolation.
//!
//! For a multi-index `k = (k_1, .., k_m)` the stencil is the tensor product of
//! one-dimensional central stencils `sum_q (-1)^q C(k_i, q) f(x + (k_i/2 - q) h)`.
//! Every stencil is symmetric, so the truncation error is a series in `h^2`
//! and each Richardson level removes one more even power.

use crate::error::{Error, Result};

/// Step schedule for finite-difference derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSchedule {
    /// Coarsest step; level `i` uses `h / 2^i`.
    pub step: f64,
    /// Number of step sizes combined by Richardson extrapolation.
    pub levels: usize,
}

impl Default for FdSchedule {
    fn default() -> Self {
        Self { step: 0.05, levels: 3 }
    }
}

/// Derivative estimate with the size of the last extrapolation increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Offsets (in units of h) and weights of the 1-D central stencil of order `k`.
fn stencil(k: u32) -> Vec<(f64, f64)> {
    (0..=k)
        .map(|q| {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            (f64::from(k) / 2.0 - f64::from(q), sign * binomial(k, q))
        })
        .collect()
}

/// Raw (non-extrapolated) tensor-stencil estimate at step `h`.
fn raw_estimate<F>(f: &F, point: &[f64], orders: &[u32], h: f64, width: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let stencils: Vec<Vec<(f64, f64)>> = orders.iter().map(|&k| stencil(k)).collect();
    let total: u32 = orders.iter().sum();
    let mut acc = vec![0.0; width];
    let mut idx = vec![0usize; orders.len()];
    let mut x = point.to_vec();
    loop {
        let mut weight = 1.0;
        for (d, st) in stencils.iter().enumerate() {
            let (off, w) = st[idx[d]];
            x[d] = point[d] + off * h;
            weight *= w;
        }
        let values = f(&x)?;
        if values.len() != width {
            return Err(Error::Numerical(format!(
                "finite-difference target returned {} values, expected {width}",
                values.len()
            )));
        }
        for (a, v) in acc.iter_mut().zip(&values) {
            *a += weight * v;
        }
        // odometer over the tensor grid
        let mut d = 0;
        loop {
            if d == idx.len() {
                let scale = h.powi(total as i32);
                return Ok(acc.into_iter().map(|a| a / scale).collect());
            }
            idx[d] += 1;
            if idx[d] < stencils[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Mixed partial `∂^orders` of a vector-valued `f` at `point`, one
/// [`Derivative`] per output component.
///
/// `width` is the number of components `f` returns.
pub fn mixed_partial_vec<F>(
    f: F,
    point: &[f64],
    orders: &[u32],
    width: usize,
    schedule: FdSchedule,
) -> Result<Vec<Derivative>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if orders.len() != point.len() {
        return Err(Error::param(
            "jvec",
            format!("multi-index has {} entries for {} variables", orders.len(), point.len()),
        ));
    }
    if orders.iter().sum::<u32>() == 0 {
        return Err(Error::param("jvec", "total order must be at least 1"));
    }
    if schedule.levels == 0 || !(schedule.step > 0.0) {
        return Err(Error::param(
            "fd_schedule",
            "need a positive step and at least one level",
        ));
    }

    // table[level] holds raw estimates at h / 2^level
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(schedule.levels);
    let mut h = schedule.step;
    for _ in 0..schedule.levels {
        table.push(raw_estimate(&f, point, orders, h, width)?);
        h /= 2.0;
    }

    let mut out = Vec::with_capacity(width);
    for c in 0..width {
        let mut row: Vec<f64> = table.iter().map(|t| t[c]).collect();
        let mut error = f64::NAN;
        let mut factor = 4.0;
        while row.len() > 1 {
            let next: Vec<f64> = row
                .windows(2)
                .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
                .collect();
            error = (next[next.len() - 1] - row[row.len() - 1]).abs();
            row = next;
            factor *= 4.0;
        }
        if schedule.levels == 1 {
            error = f64::INFINITY;
        }
        out.push(Derivative { value: row[0], error });
    }
    Ok(out)
}

/// Scalar convenience wrapper around [`mixed_partial_vec`].
pub fn mixed_partial<F>(f: F, point: &[f64], orders: &[u32], schedule: FdSchedule) -> Result<Derivative>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let d = mixed_partial_vec(|x| f(x).map(|v| vec![v]), point, orders, 1, schedule)?;
    Ok(d[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_weights_sum_to_zero() {
        for k in 1..=6 {
            let s: f64 = stencil(k).iter().map(|(_, w)| w).sum();
            assert!(s.abs() < 1e-12, "order {k}");
        }
    }

    #[test]
    fn exponential_derivatives() {
        let sched = FdSchedule::default();
        for k in 1..=6u32 {
            let d = mixed_partial(|x| Ok((0.7 * x[0]).exp()), &[0.2], &[k], sched).unwrap();
            let exact = 0.7f64.powi(k as i32) * (0.14f64).exp();
            // rounding noise grows like eps 2^k / h_min^k
            let h_min = sched.step / 4.0;
            let tol = 1e-8 + 64.0 * f64::EPSILON * 2f64.powi(k as i32) / h_min.powi(k as i32);
            assert!((d.value - exact).abs() < tol, "k={k}: {} vs {exact}", d.value);
        }
    }

    #[test]
    fn mixed_partial_of_product() {
        // f = exp(a x + b y) sin(x)
        let f = |v: &[f64]| Ok((0.3 * v[0] + 0.5 * v[1]).exp() * v[0].sin());
        let d = mixed_partial(f, &[0.1, -0.2], &[1, 2], FdSchedule::default()).unwrap();
        let (x, y) = (0.1f64, -0.2f64);
        let e = (0.3 * x + 0.5 * y).exp();
        let exact = 0.25 * e * (0.3 * x.sin() + x.cos());
        assert!((d.value - exact).abs() < 1e-10, "{} vs {exact}", d.value);
        assert!(d.error < 1e-8);
    }

    #[test]
    fn rejects_bad_requests() {
        let f = |_: &[f64]| Ok(1.0);
        assert!(mixed_partial(f, &[0.0, 0.0], &[1], FdSchedule::default()).is_err());
        assert!(mixed_partial(f, &[0.0], &[0], FdSchedule::default()).is_err());
    }
}

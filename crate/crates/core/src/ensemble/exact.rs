//! Exact log-MGF of the joint disk counts.
//!
//! For radii `r_1 < .. < r_m` the counts are sums of independent indicators
//! `1{V_j < r_l^{2b}}` with `V_j ~ Gamma(a_j, rate n)`, so
//!
//! ```text
//! ln E[exp(sum_l u_l N(r_l))] = sum_j ln( sum_{l=1}^{m+1} Omega_l (P_{j,l} - P_{j,l-1}) )
//! ```
//!
//! with `P_{j,l} = P(a_j, n r_l^{2b})`, `P_{j,0} = 0`, `P_{j,m+1} = 1`. Every
//! summand is evaluated relative to its largest increment `D_{j,k}`:
//! `U_k + ln_1p(sum_{l != k} expm1(U_l - U_k) D_{j,l})`, where
//! `U_l = u_l + .. + u_m`. The linear part `sum_j U_{k_j}` is kept apart so
//! that derivatives of it are exact and finite differences only see the
//! small nonlinear remainder.

use rayon::prelude::*;

use super::{check_radii, suffix_sums, EnsembleParams, Fugacities};
use crate::error::{Error, Result};
use crate::numerics::{mixed_partial, CompensatedSum, Derivative, FdSchedule};
use crate::special::{reg_gamma_pair, GammaPair};

/// Highest total cumulant order available from [`joint_cumulant_exact`].
pub const MAX_EXACT_ORDER: u32 = 6;

/// Rows whose off-reference mass is below this are treated as deterministic.
///
/// Such a row shifts the log-MGF by at most `PRUNE_MASS * e^{2 max|U|}`,
/// far below rounding of the total for any moderate fugacity.
const PRUNE_MASS: f64 = 1e-30;

/// Precomputed increments `D_{j,l}` for one ensemble and one set of radii.
///
/// Building the table costs `n * m` incomplete gamma evaluations; each
/// log-MGF evaluation afterwards is a pass over the rows that are not
/// deterministic to within [`PRUNE_MASS`].
#[derive(Debug, Clone)]
pub struct ExactEngine {
    n: usize,
    m: usize,
    // Nontrivial rows only, `m + 1` increments each, row-major.
    deltas: Vec<f64>,
    reference: Vec<usize>,
    // linear[i] = #{j : k_j <= i}, the coefficient of u_i in sum_j U_{k_j}.
    linear: Vec<f64>,
}

fn per_shape<T, F>(params: &EnsembleParams, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    (1..=params.n()).into_par_iter().map(|j| f(params.shape(j))).collect()
}

fn increments(pairs: &[GammaPair]) -> Vec<f64> {
    let m = pairs.len();
    let mut out = Vec::with_capacity(m + 1);
    let mut prev = GammaPair { p: 0.0, q: 1.0 };
    for pair in pairs {
        // difference the smaller tail so neither side has lost digits
        let d = if pair.p <= 0.5 {
            pair.p - prev.p
        } else {
            prev.q - pair.q
        };
        out.push(d.max(0.0));
        prev = *pair;
    }
    out.push(prev.q.max(0.0));
    out
}

/// `ln sum_l e^{U_l - shift} D_l` over the nonzero increments.
fn log_sum_exp(row: &[f64], tail: &[f64], shift: f64) -> f64 {
    let exps: Vec<f64> = row
        .iter()
        .zip(tail)
        .filter(|(d, _)| **d > 0.0)
        .map(|(d, u)| u - shift + d.ln())
        .collect();
    let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + exps.iter().map(|e| (e - top).exp()).sum::<f64>().ln()
}

impl ExactEngine {
    pub fn new(params: &EnsembleParams, radii: &[f64]) -> Result<Self> {
        check_radii(radii)?;
        let m = radii.len();
        let zs: Vec<f64> = radii.iter().map(|&r| params.gamma_argument(r)).collect();
        let rows = per_shape(params, |a| {
            let pairs = zs.iter().map(|&z| reg_gamma_pair(a, z)).collect::<Result<Vec<_>>>()?;
            Ok(increments(&pairs))
        })?;

        let mut deltas = Vec::new();
        let mut reference = Vec::new();
        let mut counts = vec![0usize; m + 1];
        for row in rows {
            let k = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .expect("row has m + 1 entries");
            counts[k] += 1;
            let off_reference: f64 = row.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, d)| d).sum();
            if off_reference >= PRUNE_MASS {
                deltas.extend_from_slice(&row);
                reference.push(k);
            }
        }
        let mut linear = Vec::with_capacity(m);
        let mut running = 0usize;
        for c in &counts[..m] {
            running += c;
            linear.push(running as f64);
        }
        Ok(Self {
            n: params.n(),
            m,
            deltas,
            reference,
            linear,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of rows whose summand depends nonlinearly on `u`.
    pub fn active_rows(&self) -> usize {
        self.reference.len()
    }

    fn check_u(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.m {
            return Err(Error::param(
                "u",
                format!("{} fugacities given for {} radii", u.len(), self.m),
            ));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("u", "entries must be finite"));
        }
        Ok(())
    }

    /// `sum_j U_{k_j}`, exactly linear in `u`.
    pub fn linear_part(&self, u: &[f64]) -> Result<f64> {
        self.check_u(u)?;
        Ok(self
            .linear
            .iter()
            .zip(u)
            .map(|(c, x)| c * x)
            .collect::<CompensatedSum>()
            .value())
    }

    /// `sum_j ln_1p(sum_{l != k_j} expm1(U_l - U_{k_j}) D_{j,l})`.
    pub fn nonlinear_part(&self, u: &[f64]) -> Result<f64> {
        self.check_u(u)?;
        let tail = suffix_sums(u);
        let width = self.m + 1;
        let mut sum = CompensatedSum::new();
        for (row, &k) in self.deltas.chunks_exact(width).zip(&self.reference) {
            let mut s = 0.0;
            for (l, d) in row.iter().enumerate() {
                if l != k && *d != 0.0 {
                    s += (tail[l] - tail[k]).exp_m1() * d;
                }
            }
            if s.is_infinite() {
                // expm1 overflowed: a far heavier level than k dominates
                sum.add(log_sum_exp(row, &tail, tail[k]));
                continue;
            }
            if !(s > -1.0) {
                return Err(Error::Numerical(format!(
                    "mixture argument {} is not positive; increments are inconsistent",
                    1.0 + s
                )));
            }
            sum.add(s.ln_1p());
        }
        Ok(sum.value())
    }

    pub fn log_mgf(&self, u: &[f64]) -> Result<f64> {
        let value = self.linear_part(u)? + self.nonlinear_part(u)?;
        if !value.is_finite() {
            return Err(Error::Numerical(format!("log-MGF is not finite ({value})")));
        }
        Ok(value)
    }

    /// `d^jvec ln E` at `u = 0` with an error estimate.
    ///
    /// The linear part is differentiated exactly; finite differences with
    /// Richardson extrapolation handle the rest.
    pub fn cumulant(&self, jvec: &[u32], schedule: FdSchedule) -> Result<Derivative> {
        if jvec.len() != self.m {
            return Err(Error::param(
                "jvec",
                format!("multi-index has {} entries for {} radii", jvec.len(), self.m),
            ));
        }
        let order: u32 = jvec.iter().sum();
        if order == 0 {
            return Err(Error::param("jvec", "total order must be at least 1"));
        }
        if order > MAX_EXACT_ORDER {
            return Err(Error::Unsupported(format!(
                "exact cumulants are limited to order {MAX_EXACT_ORDER}, requested {order}"
            )));
        }
        let linear = if order == 1 {
            let i = jvec.iter().position(|&k| k == 1).expect("order one");
            self.linear[i]
        } else {
            0.0
        };
        let zero = vec![0.0; self.m];
        let d = mixed_partial(|u| self.nonlinear_part(u), &zero, jvec, schedule)?;
        Ok(Derivative {
            value: linear + d.value,
            error: d.error,
        })
    }
}

/// Exact `ln E[exp(sum_l u_l N(r_l))]`.
pub fn log_mgf_exact(params: &EnsembleParams, radii: &[f64], u: &Fugacities) -> Result<f64> {
    ExactEngine::new(params, radii)?.log_mgf(u.as_slice())
}

/// Joint cumulant `d^jvec ln E` at `u = 0` with the default step schedule.
pub fn joint_cumulant_exact(params: &EnsembleParams, radii: &[f64], jvec: &[u32]) -> Result<Derivative> {
    joint_cumulant_exact_with(params, radii, jvec, FdSchedule::default())
}

pub fn joint_cumulant_exact_with(
    params: &EnsembleParams,
    radii: &[f64],
    jvec: &[u32],
    schedule: FdSchedule,
) -> Result<Derivative> {
    ExactEngine::new(params, radii)?.cumulant(jvec, schedule)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("radius", format!("must be positive and finite, got {r}")));
    }
    Ok(())
}

/// `E N(r) = sum_j P_j(r)`.
pub fn mean_exact(params: &EnsembleParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    let z = params.gamma_argument(r);
    let ps = per_shape(params, |a| Ok(reg_gamma_pair(a, z)?.p))?;
    Ok(ps.into_iter().collect::<CompensatedSum>().value())
}

/// `Var N(r) = sum_j P_j(r) Q_j(r)`.
pub fn variance_exact(params: &EnsembleParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    let z = params.gamma_argument(r);
    let terms = per_shape(params, |a| {
        let g = reg_gamma_pair(a, z)?;
        Ok(g.p * g.q)
    })?;
    Ok(terms.into_iter().collect::<CompensatedSum>().value())
}

/// `Cov(N(r1), N(r2)) = sum_j P_j(r1) Q_j(r2)` for `r1 < r2`.
pub fn covariance_exact(params: &EnsembleParams, r1: f64, r2: f64) -> Result<f64> {
    check_radii(&[r1, r2])?;
    let (z1, z2) = (params.gamma_argument(r1), params.gamma_argument(r2));
    let terms = per_shape(params, |a| Ok(reg_gamma_pair(a, z1)?.p * reg_gamma_pair(a, z2)?.q))?;
    Ok(terms.into_iter().collect::<CompensatedSum>().value())
}

/// `ln E[prod_l e^{u_l N(r_l)}] - sum_l ln E[e^{u_l N(r_l)}]`.
///
/// For fixed, separated radii this is exponentially small in `n`.
pub fn decoupling_residual(params: &EnsembleParams, radii: &[f64], u: &Fugacities) -> Result<f64> {
    let joint = log_mgf_exact(params, radii, u)?;
    if radii.len() != u.len() {
        return Err(Error::param("u", "one fugacity per radius is required"));
    }
    let mut singles = CompensatedSum::new();
    for (&r, &x) in radii.iter().zip(u.as_slice()) {
        singles.add(ExactEngine::new(params, &[r])?.log_mgf(&[x])?);
    }
    Ok(joint - singles.value())
}

//! The four coefficients of
//! `ln E[prod e^{u_l N(r_l)}] = C1 n + C2 sqrt(n) + C3 + C4/sqrt(n) + O((ln n)^2/n)`.

use std::f64::consts::SQRT_2;

use super::kernels::Kernels;
use crate::ensemble::{MergeConfig, Regime};
use crate::error::{Error, Result};
use crate::numerics::{integrate, mixed_partial_vec, Derivative, FdSchedule, QuadratureSpec};

/// Regime tag carried by [`ExpansionCoeffs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    Bulk,
    Edge,
}

impl From<Regime> for RegimeKind {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Bulk { .. } => RegimeKind::Bulk,
            Regime::Edge => RegimeKind::Edge,
        }
    }
}

/// One truncated integral entering a coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralReport {
    pub name: &'static str,
    pub value: f64,
    pub error: f64,
}

/// `C1..C4` with the summed quadrature error of each.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoeffs {
    pub regime: RegimeKind,
    pub c: [f64; 4],
    pub errors: [f64; 4],
    pub integrals: Vec<IntegralReport>,
}

impl ExpansionCoeffs {
    /// `C1 n + C2 sqrt(n) + C3 + C4 / sqrt(n)`.
    pub fn evaluate(&self, n: f64) -> f64 {
        let rn = n.sqrt();
        self.c[0] * n + self.c[1] * rn + self.c[2] + self.c[3] / rn
    }
}

struct Integrator<'a> {
    quad: &'a QuadratureSpec,
    breaks: Vec<f64>,
    reach: f64,
    reports: Vec<IntegralReport>,
}

impl<'a> Integrator<'a> {
    fn new(quad: &'a QuadratureSpec, s: &[f64]) -> Result<Self> {
        quad.validate()?;
        let reach = s.iter().fold(0.0f64, |acc, x| acc.max(x.abs())) + quad.truncation_margin;
        let mut breaks = vec![0.0];
        for &x in s {
            breaks.push(x);
            breaks.push(-x);
        }
        Ok(Self {
            quad,
            breaks,
            reach,
            reports: Vec::new(),
        })
    }

    fn run(&mut self, name: &'static str, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let r = integrate(name, f, lo, hi, &self.breaks, self.quad.rel_tol, self.quad.abs_tol)?;
        self.reports.push(IntegralReport {
            name,
            value: r.value,
            error: r.error,
        });
        Ok((r.value, r.error))
    }

    /// Over `[0, T]`.
    fn half(&mut self, name: &'static str, f: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        let t = self.reach;
        self.run(name, f, 0.0, t)
    }

    /// Over `[-T, 0]`.
    fn negative_half(&mut self, name: &'static str, f: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        let t = self.reach;
        self.run(name, f, -t, 0.0)
    }

    /// Over `[-T, T]`.
    fn full(&mut self, name: &'static str, f: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        let t = self.reach;
        self.run(name, f, -t, t)
    }
}

fn check_b(b: f64, alpha: f64) -> Result<()> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::param("b", format!("must be positive and finite, got {b}")));
    }
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("must be finite and > -1, got {alpha}")));
    }
    Ok(())
}

/// Bulk coefficients for base radius `r`.
pub fn bulk_coeffs(b: f64, alpha: f64, r: f64, s: &[f64], u: &[f64], quad: &QuadratureSpec) -> Result<ExpansionCoeffs> {
    check_b(b, alpha)?;
    MergeConfig::new(Regime::Bulk { r }, s.to_vec())?.validate_for(b)?;
    let k = Kernels::new(u, s)?;
    let mut q = Integrator::new(quad, s)?;
    let rb = r.powf(b);
    let sum_u = k.total();

    let (i0, e0) = q.half("int_0^inf (ln H1 + ln H2)", |t| k.ln_h1(t) + k.ln_h2(t))?;
    let (j1, ej1) = q.half("int_0^inf t (ln H1 - ln H2)", |t| t * (k.ln_h1(t) - k.ln_h2(t)))?;
    let (g1, eg1) = q.full("int_R G1", |t| k.g1(t))?;
    let (i2, e2) = q.half("int_0^inf t^2 (ln H1 + ln H2)", |t| t * t * (k.ln_h1(t) + k.ln_h2(t)))?;
    let (gg, egg) = q.full("int_R (4t G1 - G1^2/sqrt2 + G2)", |t| {
        let g = k.g1(t);
        4.0 * t * g - g * g / SQRT_2 + k.g2(t)
    })?;

    let c = [
        b * r.powf(2.0 * b) * sum_u,
        SQRT_2 * b * rb * i0,
        -(0.5 + alpha) * sum_u + 4.0 * b * j1 + SQRT_2 * b * g1,
        6.0 * SQRT_2 * b / rb * i2 + b / rb * gg,
    ];
    let errors = [
        0.0,
        SQRT_2 * b * rb * e0,
        4.0 * b * ej1 + SQRT_2 * b * eg1,
        6.0 * SQRT_2 * b / rb * e2 + b / rb * egg,
    ];
    Ok(ExpansionCoeffs {
        regime: RegimeKind::Bulk,
        c,
        errors,
        integrals: q.reports,
    })
}

/// Edge coefficients.
pub fn edge_coeffs(b: f64, alpha: f64, s: &[f64], u: &[f64], quad: &QuadratureSpec) -> Result<ExpansionCoeffs> {
    check_b(b, alpha)?;
    MergeConfig::new(Regime::Edge, s.to_vec())?;
    let k = Kernels::new(u, s)?;
    let mut q = Integrator::new(quad, s)?;
    let sb = b.sqrt();
    let b32 = b * sb;

    let (i0, e0) = q.half("int_0^inf ln H2", |t| k.ln_h2(t))?;
    let (i1, e1) = q.half("int_0^inf t ln H2", |t| t * k.ln_h2(t))?;
    let (g1, eg1) = q.negative_half("int_-inf^0 G1", |t| k.g1(t))?;
    let (i2, e2) = q.half("int_0^inf t^2 ln H2", |t| t * t * k.ln_h2(t))?;
    let (gg, egg) = q.negative_half("int_-inf^0 (4t G1 - G1^2/sqrt2 + G2)", |t| {
        let g = k.g1(t);
        4.0 * t * g - g * g / SQRT_2 + k.g2(t)
    })?;

    let ln_h2_0 = k.ln_h2(0.0);
    let h2_0 = ln_h2_0.exp();
    let boundary = -(1.0 + 6.0 * alpha + 6.0 * alpha * alpha) / (12.0 * (2.0 * b).sqrt()) * k.h2_prime_at_zero() / h2_0
        + (0.5 + alpha) * sb * k.g1(0.0);

    let c = [
        k.total(),
        (2.0 * b).sqrt() * i0,
        (0.5 + alpha) * ln_h2_0 - 4.0 * b * i1 + SQRT_2 * b * g1,
        6.0 * SQRT_2 * b32 * i2 + b32 * gg + boundary,
    ];
    let errors = [
        0.0,
        (2.0 * b).sqrt() * e0,
        4.0 * b * e1 + SQRT_2 * b * eg1,
        6.0 * SQRT_2 * b32 * e2 + b32 * egg,
    ];
    Ok(ExpansionCoeffs {
        regime: RegimeKind::Edge,
        c,
        errors,
        integrals: q.reports,
    })
}

/// Coefficients for the regime in `cfg`.
pub fn expansion_coeffs(
    b: f64,
    alpha: f64,
    cfg: &MergeConfig,
    u: &[f64],
    quad: &QuadratureSpec,
) -> Result<ExpansionCoeffs> {
    match cfg.regime() {
        Regime::Bulk { r } => bulk_coeffs(b, alpha, r, cfg.offsets(), u, quad),
        Regime::Edge => edge_coeffs(b, alpha, cfg.offsets(), u, quad),
    }
}

/// Highest order accepted by [`cumulant_asymptotics`].
pub const MAX_ASYMPTOTIC_ORDER: u32 = 4;

/// `d^jvec (C1, C2, C3, C4)` at `u = 0`: the coefficients of `n`, `sqrt(n)`,
/// `1` and `n^{-1/2}` in the cumulant `kappa_jvec`.
pub fn cumulant_asymptotics(
    b: f64,
    alpha: f64,
    cfg: &MergeConfig,
    jvec: &[u32],
    quad: &QuadratureSpec,
) -> Result<[Derivative; 4]> {
    cumulant_asymptotics_with(b, alpha, cfg, jvec, quad, FdSchedule::default())
}

pub fn cumulant_asymptotics_with(
    b: f64,
    alpha: f64,
    cfg: &MergeConfig,
    jvec: &[u32],
    quad: &QuadratureSpec,
    schedule: FdSchedule,
) -> Result<[Derivative; 4]> {
    if jvec.len() != cfg.m() {
        return Err(Error::param(
            "jvec",
            format!("multi-index has {} entries for {} offsets", jvec.len(), cfg.m()),
        ));
    }
    let order: u32 = jvec.iter().sum();
    if order > MAX_ASYMPTOTIC_ORDER {
        return Err(Error::Unsupported(format!(
            "asymptotic cumulants are limited to order {MAX_ASYMPTOTIC_ORDER}, requested {order}"
        )));
    }
    let zero = vec![0.0; cfg.m()];
    let d = mixed_partial_vec(
        |u| expansion_coeffs(b, alpha, cfg, u, quad).map(|c| c.c.to_vec()),
        &zero,
        jvec,
        4,
        schedule,
    )?;
    Ok([d[0], d[1], d[2], d[3]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanish_at_zero_fugacity() {
        let quad = QuadratureSpec::default();
        let bulk = bulk_coeffs(1.2, 0.3, 0.5, &[-0.4, 0.6], &[0.0, 0.0], &quad).unwrap();
        let edge = edge_coeffs(1.2, 0.3, &[-0.4, 0.6], &[0.0, 0.0], &quad).unwrap();
        assert_eq!(bulk.c, [0.0; 4]);
        assert_eq!(edge.c, [0.0; 4]);
    }

    #[test]
    fn leading_coefficients() {
        let quad = QuadratureSpec::default();
        let bulk = bulk_coeffs(1.0, 0.0, 0.5, &[0.0], &[0.2], &quad).unwrap();
        assert!((bulk.c[0] - 0.05).abs() < 1e-16);
        let edge = edge_coeffs(1.7, 0.2, &[-0.3, 0.2], &[0.25, -0.4], &quad).unwrap();
        assert!((edge.c[0] - (-0.15)).abs() < 1e-16);
    }

    #[test]
    fn bulk_variance_leading_term() {
        let quad = QuadratureSpec::default();
        let (b, r) = (1.4, 0.6);
        let cfg = MergeConfig::new(Regime::Bulk { r }, vec![0.0]).unwrap();
        let d = cumulant_asymptotics(b, 0.0, &cfg, &[2], &quad).unwrap();
        let want = b * r.powf(b) / std::f64::consts::PI.sqrt();
        assert!((d[1].value - want).abs() < 1e-8 * want, "{} vs {want}", d[1].value);
        assert!(d[0].value.abs() < 1e-9);
    }

    #[test]
    fn edge_mean_sqrt_term() {
        let quad = QuadratureSpec::default();
        let b = 0.8;
        let cfg = MergeConfig::new(Regime::Edge, vec![0.0]).unwrap();
        let d = cumulant_asymptotics(b, 0.5, &cfg, &[1], &quad).unwrap();
        let want = -(b / (2.0 * std::f64::consts::PI)).sqrt();
        assert!((d[1].value - want).abs() < 1e-8 * want.abs());
        assert!((d[0].value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn order_limit() {
        let cfg = MergeConfig::new(Regime::Edge, vec![0.0]).unwrap();
        assert!(cumulant_asymptotics(1.0, 0.0, &cfg, &[5], &QuadratureSpec::default()).is_err());
        assert!(cumulant_asymptotics(1.0, 0.0, &cfg, &[1, 1], &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn rejects_bulk_radius_outside_droplet() {
        let quad = QuadratureSpec::default();
        assert!(bulk_coeffs(1.0, 0.0, 1.0, &[0.0], &[0.1], &quad).is_err());
    }
}

//! Closed-form large-n expansions of means, variances and covariances, and
//! the limiting correlation matrix of the standardized counts.
//!
//! Expressions of the form `2 - erfc(x)` are evaluated as `erfc(-x)`.

use std::f64::consts::{PI, SQRT_2};

use super::coeffs::RegimeKind;
use crate::ensemble::{MergeConfig, Regime};
use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::special::erfc;

/// Coefficients of `n`, `sqrt(n)`, `1` and `n^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Expansion {
    pub n: f64,
    pub sqrt_n: f64,
    pub constant: f64,
    pub inv_sqrt_n: f64,
}

impl Expansion {
    pub fn evaluate(&self, n: f64) -> f64 {
        let rn = n.sqrt();
        self.n * n + self.sqrt_n * rn + self.constant + self.inv_sqrt_n / rn
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.n, self.sqrt_n, self.constant, self.inv_sqrt_n]
    }
}

/// Covariance expansion of the pair `(l, k)`, `l < k`, zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairExpansion {
    pub l: usize,
    pub k: usize,
    pub covariance: Expansion,
}

/// Mean and variance per offset, covariance per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormMoments {
    pub regime: RegimeKind,
    pub offsets: Vec<f64>,
    pub mean: Vec<Expansion>,
    pub variance: Vec<Expansion>,
    pub covariance: Vec<PairExpansion>,
}

/// The degree-5 polynomial `p(t, s)` of the `n^{-1/2}` covariance terms.
pub fn p_poly(t: f64, s: f64) -> f64 {
    let s2 = s * s;
    let t2 = t * t;
    -3.0 * s + 22.0 * s2 * s - 8.0 * s2 * s2 * s
        + t * (21.0 - 66.0 * s2 + 16.0 * s2 * s2)
        + t2 * (57.0 * s - 50.0 * s2 * s)
        + t2 * t * (-193.0 + 62.0 * s2)
        - 70.0 * t2 * t2 * s
        + 50.0 * t2 * t2 * t
}

/// `(1 - 5t^2 + t s - 2 s^2) / 3`.
fn cubic_weight(t: f64, s: f64) -> f64 {
    (1.0 - 5.0 * t * t + t * s - 2.0 * s * s) / 3.0
}

fn poly288(sl: f64, sk: f64) -> f64 {
    let (l2, k2) = (sl * sl, sk * sk);
    51.0 + 55.0 * l2 * l2
        + 55.0 * k2 * k2
        + 96.0 * l2
        + 96.0 * k2
        + 128.0 * l2 * sl * sk
        + 128.0 * sl * k2 * sk
        + 180.0 * sl * sk
        + 210.0 * l2 * k2
}

struct PairQuad<'a> {
    quad: &'a QuadratureSpec,
    reach: f64,
    breaks: [f64; 5],
}

impl<'a> PairQuad<'a> {
    fn new(quad: &'a QuadratureSpec, sl: f64, sk: f64) -> Result<Self> {
        quad.validate()?;
        Ok(Self {
            quad,
            reach: sl.abs().max(sk.abs()) + quad.truncation_margin,
            breaks: [0.0, sl, -sl, sk, -sk],
        })
    }

    fn over(&self, name: &str, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        Ok(integrate(name, f, lo, hi, &self.breaks, self.quad.rel_tol, self.quad.abs_tol)?.value)
    }

    fn half(&self, name: &str, f: impl Fn(f64) -> f64) -> Result<f64> {
        self.over(name, f, 0.0, self.reach)
    }

    fn negative_half(&self, name: &str, f: impl Fn(f64) -> f64) -> Result<f64> {
        self.over(name, f, -self.reach, 0.0)
    }

    fn full(&self, name: &str, f: impl Fn(f64) -> f64) -> Result<f64> {
        self.over(name, f, -self.reach, self.reach)
    }
}

fn check_pair(sl: f64, sk: f64) -> Result<()> {
    if !(sl.is_finite() && sk.is_finite() && sl < sk) {
        return Err(Error::param(
            "offsets",
            format!("pair ({sl}, {sk}) must be finite with s_l < s_k"),
        ));
    }
    Ok(())
}

/// Bulk `c_(1,1)(s_l, s_k)`.
pub fn bulk_c11(b: f64, r: f64, sl: f64, sk: f64, quad: &QuadratureSpec) -> Result<f64> {
    // s_l = s_k is allowed here: it gives the variance leading term
    if !(sl <= sk) {
        return Err(Error::param("offsets", "need s_l <= s_k"));
    }
    let q = PairQuad::new(quad, sl, sk)?;
    let int = q.half("c11 (bulk)", |t| {
        erfc(t - sl) * 0.5 * erfc(sk - t) + erfc(t + sk) * 0.5 * erfc(-t - sl)
    })?;
    Ok(b * r.powf(b) / SQRT_2 * int)
}

/// Bulk `d_(1,1)(s_l, s_k)`.
pub fn bulk_d11(b: f64, sl: f64, sk: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_pair(sl, sk)?;
    let q = PairQuad::new(quad, sl, sk)?;
    let first = q.half("d11 (bulk) linear", |t| {
        t * (erfc(t - sl) * erfc(sk - t) - erfc(t + sk) * erfc(-t - sl))
    })?;
    let second = q.full("d11 (bulk) gaussian", |t| {
        let norm = 2.0 * PI.sqrt();
        erfc(sk - t) * (-(t - sl) * (t - sl)).exp() / norm * cubic_weight(t, sl)
            - erfc(t - sl) * (-(t - sk) * (t - sk)).exp() / norm * cubic_weight(t, sk)
    })?;
    Ok(b * first + b * second)
}

/// Bulk `e_(1,1)(s_l, s_k)`.
pub fn bulk_e11(b: f64, r: f64, sl: f64, sk: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_pair(sl, sk)?;
    let q = PairQuad::new(quad, sl, sk)?;
    let rmb = r.powf(-b);
    let algebraic = -b * rmb * (-(sl - sk) * (sl - sk) / 2.0).exp() / (288.0 * PI.sqrt()) * poly288(sl, sk);
    let quadratic = q.half("e11 (bulk) quadratic", |t| {
        t * t * (erfc(t - sl) * erfc(sk - t) + erfc(-t - sl) * erfc(t + sk))
    })?;
    let poly = q.full("e11 (bulk) polynomial", |t| {
        erfc(sk - t) * (-(t - sl) * (t - sl)).exp() * p_poly(t, sl)
            - erfc(t - sl) * (-(t - sk) * (t - sk)).exp() * p_poly(t, sk)
    })?;
    Ok(algebraic + 3.0 * b * rmb / SQRT_2 * quadratic + b * rmb / (36.0 * (2.0 * PI).sqrt()) * poly)
}

/// Edge mean coefficient `c_1(s)`.
pub fn edge_c1(b: f64, s: f64) -> f64 {
    b.sqrt() * s / SQRT_2 * erfc(s) - b.sqrt() / (2.0 * PI).sqrt() * (-s * s).exp()
}

/// Edge mean coefficient `d_1(s)`.
pub fn edge_d1(b: f64, alpha: f64, s: f64) -> f64 {
    -0.5 * (0.5 + alpha - b / 2.0) * erfc(s) - b * s / (3.0 * PI.sqrt()) * (-s * s).exp()
}

/// Edge mean coefficient `e_1(s)`.
pub fn edge_e1(b: f64, alpha: f64, s: f64) -> f64 {
    let sb = b.sqrt();
    let s2 = s * s;
    (-s2).exp() / (2.0 * PI).sqrt()
        * ((b * (2.0 + 4.0 * alpha) - 1.0 - 6.0 * alpha - 6.0 * alpha * alpha) / (12.0 * sb)
            + (3.0 * b - 2.0 - 4.0 * alpha) * s2 / 6.0 * sb
            - 2.0 * s2 * s2 / 9.0 * b * sb)
}

/// Edge variance coefficient `c_2(s)`.
pub fn edge_c2(b: f64, s: f64) -> f64 {
    let sb = b.sqrt();
    let e = erfc(s);
    sb / (2.0 * PI.sqrt()) * erfc(SQRT_2 * s)
        + sb * (-s * s).exp() / (2.0 * PI).sqrt() * (1.0 - e)
        + sb * s / SQRT_2 * e * (0.5 * e - 1.0)
}

/// Edge variance coefficient `d_2(s)`.
pub fn edge_d2(b: f64, alpha: f64, s: f64) -> f64 {
    let e = erfc(s);
    -b / (12.0 * PI) * (-2.0 * s * s).exp()
        + b * s / (2.0 * (2.0 * PI).sqrt()) * erfc(SQRT_2 * s)
        + b * s / (3.0 * PI.sqrt()) * (-s * s).exp() * (1.0 - e)
        + (b - 1.0 - 2.0 * alpha) / 4.0 * e * (0.5 * e - 1.0)
}

/// Edge variance coefficient `e_2(s)`.
pub fn edge_e2(b: f64, alpha: f64, s: f64) -> f64 {
    let s2 = s * s;
    let b32 = b * b.sqrt();
    let bracket = 1.0 - 2.0 * b + 6.0 * alpha - 4.0 * b * alpha
        + 6.0 * alpha * alpha
        + 2.0 * (2.0 - 3.0 * b + 4.0 * alpha) * b * s2
        + 8.0 * b * b / 3.0 * s2 * s2;
    (-s2).exp() / (12.0 * (2.0 * PI * b).sqrt()) * bracket * (1.0 - erfc(s))
        - b32 * s / (72.0 * SQRT_2 * PI) * (-2.0 * s2).exp()
        - b32 * (1.0 + 4.0 * s2) / (32.0 * PI.sqrt()) * erfc(SQRT_2 * s)
}

/// Edge `c_(1,1)(s_l, s_k)`.
pub fn edge_c11(b: f64, sl: f64, sk: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(sl <= sk) {
        return Err(Error::param("offsets", "need s_l <= s_k"));
    }
    let q = PairQuad::new(quad, sl, sk)?;
    let int = q.half("c11 (edge)", |t| erfc(t + sk) * erfc(-t - sl))?;
    Ok(b.sqrt() / (2.0 * SQRT_2) * int)
}

/// Edge `d_(1,1)(s_l, s_k)`.
pub fn edge_d11(b: f64, alpha: f64, sl: f64, sk: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_pair(sl, sk)?;
    let q = PairQuad::new(quad, sl, sk)?;
    let linear = q.half("d11 (edge) linear", |t| t * erfc(t + sk) * erfc(-t - sl))?;
    let gaussian = q.negative_half("d11 (edge) gaussian", |t| {
        let norm = 2.0 * PI.sqrt();
        erfc(sk - t) * (-(t - sl) * (t - sl)).exp() / norm * cubic_weight(t, sl)
            - erfc(t - sl) * (-(t - sk) * (t - sk)).exp() / norm * cubic_weight(t, sk)
    })?;
    Ok((1.0 + 2.0 * alpha) / 8.0 * erfc(-sl) * erfc(sk) - b * linear + b * gaussian)
}

/// Edge `e_(1,1)(s_l, s_k)`.
pub fn edge_e11(b: f64, alpha: f64, sl: f64, sk: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_pair(sl, sk)?;
    let q = PairQuad::new(quad, sl, sk)?;
    let sb = b.sqrt();
    let b32 = b * sb;
    let a_poly = |s: f64| 1.0 + 6.0 * alpha + 6.0 * alpha * alpha + 2.0 * b * (1.0 + 2.0 * alpha) * (2.0 * s * s - 1.0);
    let root = (2.0 * PI).sqrt();
    let mut value = erfc(-sl) * (-sk * sk).exp() / root * a_poly(sk) / (24.0 * sb)
        - erfc(sk) * (-sl * sl).exp() / root * a_poly(sl) / (24.0 * sb);
    value -= b32 * (-(sl - sk) * (sl - sk) / 2.0).exp() / (288.0 * PI.sqrt())
        * 0.5
        * erfc((sl + sk) / SQRT_2)
        * poly288(sl, sk);
    value += b32 / (144.0 * SQRT_2) * (-sl * sl - sk * sk).exp() / (2.0 * PI)
        * (55.0 * (sl * sl * sl + sk * sk * sk) + 73.0 * (sl + sk + sl * sl * sk + sl * sk * sk));
    let quadratic = q.half("e11 (edge) quadratic", |t| t * t * erfc(-t - sl) * erfc(t + sk))?;
    let poly = q.negative_half("e11 (edge) polynomial", |t| {
        erfc(sk - t) * (-(t - sl) * (t - sl)).exp() * p_poly(t, sl)
            - erfc(t - sl) * (-(t - sk) * (t - sk)).exp() * p_poly(t, sk)
    })?;
    value += 3.0 * b32 / SQRT_2 * quadratic + b32 / (36.0 * root) * poly;
    Ok(value)
}

fn check_exponents(b: f64, alpha: f64) -> Result<()> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::param("b", format!("must be positive and finite, got {b}")));
    }
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("must be finite and > -1, got {alpha}")));
    }
    Ok(())
}

/// Every closed-form coefficient for the configuration `cfg`.
pub fn closed_form_moments(b: f64, alpha: f64, cfg: &MergeConfig, quad: &QuadratureSpec) -> Result<ClosedFormMoments> {
    check_exponents(b, alpha)?;
    cfg.validate_for(b)?;
    let s = cfg.offsets();
    let m = s.len();
    let mut mean = Vec::with_capacity(m);
    let mut variance = Vec::with_capacity(m);
    let mut covariance = Vec::new();
    match cfg.regime() {
        Regime::Bulk { r } => {
            let rb = r.powf(b);
            for &sl in s {
                mean.push(Expansion {
                    n: b * rb * rb,
                    sqrt_n: SQRT_2 * b * rb * sl,
                    constant: (b - 1.0 - 2.0 * alpha) / 2.0,
                    inv_sqrt_n: 0.0,
                });
                variance.push(Expansion {
                    n: 0.0,
                    sqrt_n: b * rb / PI.sqrt(),
                    constant: b * sl / (2.0 * PI).sqrt(),
                    inv_sqrt_n: -b * (1.0 + 4.0 * sl * sl) / (16.0 * PI.sqrt() * rb),
                });
            }
            for l in 0..m {
                for k in l + 1..m {
                    covariance.push(PairExpansion {
                        l,
                        k,
                        covariance: Expansion {
                            n: 0.0,
                            sqrt_n: bulk_c11(b, r, s[l], s[k], quad)?,
                            constant: bulk_d11(b, s[l], s[k], quad)?,
                            inv_sqrt_n: bulk_e11(b, r, s[l], s[k], quad)?,
                        },
                    });
                }
            }
        }
        Regime::Edge => {
            for &sl in s {
                mean.push(Expansion {
                    n: 1.0,
                    sqrt_n: edge_c1(b, sl),
                    constant: edge_d1(b, alpha, sl),
                    inv_sqrt_n: edge_e1(b, alpha, sl),
                });
                variance.push(Expansion {
                    n: 0.0,
                    sqrt_n: edge_c2(b, sl),
                    constant: edge_d2(b, alpha, sl),
                    inv_sqrt_n: edge_e2(b, alpha, sl),
                });
            }
            for l in 0..m {
                for k in l + 1..m {
                    covariance.push(PairExpansion {
                        l,
                        k,
                        covariance: Expansion {
                            n: 0.0,
                            sqrt_n: edge_c11(b, s[l], s[k], quad)?,
                            constant: edge_d11(b, alpha, s[l], s[k], quad)?,
                            inv_sqrt_n: edge_e11(b, alpha, s[l], s[k], quad)?,
                        },
                    });
                }
            }
        }
    }
    Ok(ClosedFormMoments {
        regime: cfg.regime().into(),
        offsets: s.to_vec(),
        mean,
        variance,
        covariance,
    })
}

/// Limiting correlation matrix of the standardized counts.
///
/// Bulk: `Sigma_lk = c_(1,1)(s_l, s_k) / (b r^b / sqrt(pi))`.
/// Edge: `Sigma_lk = c_(1,1)(s_l, s_k) / sqrt(c_2(s_l) c_2(s_k))`, with the
/// edge form of `c_(1,1)`.
pub fn clt_covariance(b: f64, alpha: f64, cfg: &MergeConfig, quad: &QuadratureSpec) -> Result<Vec<Vec<f64>>> {
    check_exponents(b, alpha)?;
    cfg.validate_for(b)?;
    let s = cfg.offsets();
    let m = s.len();
    let mut sigma = vec![vec![0.0; m]; m];
    for l in 0..m {
        sigma[l][l] = 1.0;
        for k in l + 1..m {
            let v = match cfg.regime() {
                Regime::Bulk { r } => bulk_c11(b, r, s[l], s[k], quad)? / (b * r.powf(b) / PI.sqrt()),
                Regime::Edge => edge_c11(b, s[l], s[k], quad)? / (edge_c2(b, s[l]) * edge_c2(b, s[k])).sqrt(),
            };
            sigma[l][k] = v;
            sigma[k][l] = v;
        }
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bulk_c11_on_the_diagonal_is_the_variance_term() {
        let quad = QuadratureSpec::default();
        for (b, r, s) in [(1.0, 0.6, 0.0), (1.5, 0.4, -0.7), (0.7, 0.9, 1.3)] {
            let want = b * f64::powf(r, b) / PI.sqrt();
            let got = bulk_c11(b, r, s, s, &quad).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn edge_d1_vanishes_for_ginibre_at_zero() {
        assert!(edge_d1(1.0, 0.0, 0.0).abs() < 1e-16);
    }

    #[test]
    fn edge_c2_positive_and_decaying() {
        for b in [0.5, 1.0, 2.5] {
            let mut prev = f64::INFINITY;
            for i in -60..=60 {
                let s = 0.1 * i as f64;
                let c = edge_c2(b, s);
                assert!(c > 0.0, "b={b} s={s}");
                // flat to rounding level on the far left
                if s > -3.0 {
                    assert!(c < prev, "c2 must decrease, b={b} s={s}");
                }
                prev = c;
            }
            assert!(edge_c2(b, 8.0) < 1e-25);
        }
    }

    #[test]
    fn correlations_die_with_separation() {
        let quad = QuadratureSpec::default();
        let bulk = MergeConfig::new(Regime::Bulk { r: 0.6 }, vec![-6.0, 6.0]).unwrap();
        let sig = clt_covariance(1.0, 0.0, &bulk, &quad).unwrap();
        assert!(sig[0][1].abs() < 1e-10);
        let one = MergeConfig::new(Regime::Edge, vec![0.3]).unwrap();
        assert_eq!(clt_covariance(1.0, 0.0, &one, &quad).unwrap(), vec![vec![1.0]]);
    }

    #[test]
    fn bulk_correlation_tends_to_one_when_merging() {
        let quad = QuadratureSpec::default();
        let cfg = MergeConfig::new(Regime::Bulk { r: 0.5 }, vec![0.2, 0.2 + 1e-7]).unwrap();
        let sig = clt_covariance(1.3, 0.0, &cfg, &quad).unwrap();
        assert!((sig[0][1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bulk_mean_constant_vanishes_for_ginibre() {
        let cfg = MergeConfig::new(Regime::Bulk { r: 0.6 }, vec![0.3]).unwrap();
        let m = closed_form_moments(1.0, 0.0, &cfg, &QuadratureSpec::default()).unwrap();
        assert_eq!(m.mean[0].constant, 0.0);
    }
}

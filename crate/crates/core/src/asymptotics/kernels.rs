//! The kernels `H1`, `H2`, `G1`, `G2` of the merging-radii expansions.
//!
//! ```text
//! H1(t) = 1 + sum_l (e^{u_l} - 1)/2 exp(u_{l+1} + .. + u_m) erfc(t - s_l)
//! H2(t) = 1 + sum_l (e^{-u_l} - 1)/2 exp(-(u_1 + .. + u_{l-1})) erfc(t + s_l)
//! ```
//!
//! Summing by parts turns both into positive mixtures with weights that add
//! up to one, e.g. `H1 = sum_{l=1}^{m+1} e^{U_l} w_l(t)` with
//! `w_l = (erfc(t - s_l) - erfc(t - s_{l-1}))/2`. The logarithm is then taken
//! relative to the heaviest weight, which keeps `ln H` accurate both where
//! `H` is close to 1 and where it is close to 0.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::erfc;

/// `erfc(a) - erfc(b)` for `a <= b`, differencing whichever tail is small.
fn erfc_gap(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        erfc(a) - erfc(b)
    } else if b <= 0.0 {
        erfc(-b) - erfc(-a)
    } else {
        // opposite sides of 1; nothing cancels
        erfc(a) - erfc(b)
    }
}

/// `E_k + ln_1p(sum_{l != k} expm1(E_l - E_k) w_l)` with `k = argmax w`,
/// which equals `ln(sum_l e^{E_l} w_l)` when `sum_l w_l = 1`.
fn log_mixture(exponents: &[f64], weights: &[f64]) -> f64 {
    let k = weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut s = 0.0;
    for (l, (e, w)) in exponents.iter().zip(weights).enumerate() {
        if l != k && *w != 0.0 {
            s += (e - exponents[k]).exp_m1() * w;
        }
    }
    if s.is_infinite() {
        // expm1 overflowed; fall back to log-sum-exp over the positive weights
        let top = exponents
            .iter()
            .zip(weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(e, w)| e + w.ln())
            .fold(f64::NEG_INFINITY, f64::max);
        let rest: f64 = exponents
            .iter()
            .zip(weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(e, w)| (e + w.ln() - top).exp())
            .sum();
        return top + rest.ln();
    }
    exponents[k] + s.ln_1p()
}

/// The kernels for one fixed pair of fugacities and offsets.
#[derive(Debug, Clone)]
pub struct Kernels {
    u: Vec<f64>,
    s: Vec<f64>,
    // U_l = u_l + .. + u_m, l = 1..=m+1
    suffix: Vec<f64>,
    // V_l = u_1 + .. + u_{l-1}, l = 1..=m+1
    prefix: Vec<f64>,
}

impl Kernels {
    pub fn new(u: &[f64], s: &[f64]) -> Result<Self> {
        if u.is_empty() || u.len() != s.len() {
            return Err(Error::param(
                "u",
                format!("{} fugacities for {} offsets", u.len(), s.len()),
            ));
        }
        if u.iter().chain(s).any(|x| !x.is_finite()) {
            return Err(Error::param("u", "fugacities and offsets must be finite"));
        }
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("offsets", "must be strictly increasing"));
        }
        let m = u.len();
        let suffix = crate::ensemble::suffix_sums(u);
        let mut prefix = vec![0.0; m + 1];
        for l in 0..m {
            prefix[l + 1] = prefix[l] + u[l];
        }
        Ok(Self {
            u: u.to_vec(),
            s: s.to_vec(),
            suffix,
            prefix,
        })
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.s
    }

    pub fn fugacities(&self) -> &[f64] {
        &self.u
    }

    pub fn total(&self) -> f64 {
        self.suffix[0]
    }

    fn h1_weights(&self, t: f64) -> Vec<f64> {
        let m = self.m();
        let mut w = Vec::with_capacity(m + 1);
        w.push(0.5 * erfc(t - self.s[0]));
        for l in 1..m {
            w.push(0.5 * erfc_gap(t - self.s[l], t - self.s[l - 1]));
        }
        w.push(0.5 * erfc(self.s[m - 1] - t));
        w
    }

    fn h2_weights(&self, t: f64) -> Vec<f64> {
        let m = self.m();
        let mut w = Vec::with_capacity(m + 1);
        w.push(0.5 * erfc(-(t + self.s[0])));
        for l in 1..m {
            w.push(0.5 * erfc_gap(t + self.s[l - 1], t + self.s[l]));
        }
        w.push(0.5 * erfc(t + self.s[m - 1]));
        w
    }

    pub fn ln_h1(&self, t: f64) -> f64 {
        log_mixture(&self.suffix, &self.h1_weights(t))
    }

    pub fn ln_h2(&self, t: f64) -> f64 {
        let neg: Vec<f64> = self.prefix.iter().map(|v| -v).collect();
        log_mixture(&neg, &self.h2_weights(t))
    }

    pub fn h1(&self, t: f64) -> f64 {
        self.ln_h1(t).exp()
    }

    pub fn h2(&self, t: f64) -> f64 {
        self.ln_h2(t).exp()
    }

    /// `sum_l (e^{u_l}-1) e^{U_{l+1}} e^{-(t-s_l)^2} poly(t, s_l) / H1(t)`.
    ///
    /// Each jump is divided by `H1` in log space, so huge fugacities do not
    /// overflow.
    fn gaussian_sum(&self, t: f64, poly: impl Fn(f64, f64) -> f64) -> f64 {
        let ln_h1 = self.ln_h1(t);
        (0..self.m())
            .map(|l| {
                let u = self.u[l];
                let scaled_jump = if u > 0.0 {
                    -(-u).exp_m1() * (self.suffix[l] - ln_h1).exp()
                } else {
                    u.exp_m1() * (self.suffix[l + 1] - ln_h1).exp()
                };
                let s = self.s[l];
                scaled_jump * (-(t - s) * (t - s)).exp() * poly(t, s)
            })
            .sum()
    }

    pub fn g1(&self, t: f64) -> f64 {
        let sum = self.gaussian_sum(t, |t, s| (1.0 - 2.0 * s * s + t * s - 5.0 * t * t) / 3.0);
        sum / (2.0 * PI).sqrt()
    }

    pub fn g2(&self, t: f64) -> f64 {
        let sum = self.gaussian_sum(t, |t, s| {
            let s2 = s * s;
            let s4 = s2 * s2;
            let t2 = t * t;
            50.0 * t2 * t2 * t - 70.0 * t2 * t2 * s - t2 * t * (73.0 - 62.0 * s2) + t2 * s * (33.0 - 50.0 * s2)
                - t * (3.0 + 18.0 * s2 - 16.0 * s4)
                - s * (3.0 - 22.0 * s2 + 8.0 * s4)
        });
        sum / (18.0 * (2.0 * PI).sqrt())
    }

    /// `H2'(0)` from `d/dt erfc(t + s) = -(2/sqrt(pi)) e^{-(t+s)^2}`.
    pub fn h2_prime_at_zero(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.s)
            .zip(&self.prefix)
            .map(|((u, s), v)| 0.5 * (-u).exp_m1() * (-v).exp() * (-2.0 / PI.sqrt()) * (-s * s).exp())
            .sum()
    }
}

/// `H1(t; u, s)`.
pub fn h1(t: f64, u: &[f64], s: &[f64]) -> Result<f64> {
    Ok(Kernels::new(u, s)?.h1(t))
}

/// `H2(t; u, s)`.
pub fn h2(t: f64, u: &[f64], s: &[f64]) -> Result<f64> {
    Ok(Kernels::new(u, s)?.h2(t))
}

/// `G1(t; u, s)`.
pub fn g1(t: f64, u: &[f64], s: &[f64]) -> Result<f64> {
    Ok(Kernels::new(u, s)?.g1(t))
}

/// `G2(t; u, s)`.
pub fn g2(t: f64, u: &[f64], s: &[f64]) -> Result<f64> {
    Ok(Kernels::new(u, s)?.g2(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// H1 and H2 summed term by term exactly as defined.
    fn h1_direct(t: f64, u: &[f64], s: &[f64]) -> f64 {
        let m = u.len();
        let mut h = 1.0;
        for l in 0..m {
            let tail: f64 = u[l + 1..].iter().sum();
            h += 0.5 * u[l].exp_m1() * tail.exp() * erfc(t - s[l]);
        }
        h
    }

    fn h2_direct(t: f64, u: &[f64], s: &[f64]) -> f64 {
        let mut h = 1.0;
        for l in 0..u.len() {
            let head: f64 = u[..l].iter().sum();
            h += 0.5 * (-u[l]).exp_m1() * (-head).exp() * erfc(t + s[l]);
        }
        h
    }

    #[test]
    fn mixture_matches_definition() {
        let u = [0.4, -0.9, 1.3];
        let s = [-0.7, 0.1, 1.2];
        let k = Kernels::new(&u, &s).unwrap();
        for i in -40..=40 {
            let t = 0.1 * i as f64;
            assert!((k.h1(t) - h1_direct(t, &u, &s)).abs() < 1e-14 * k.h1(t));
            assert!((k.h2(t) - h2_direct(t, &u, &s)).abs() < 1e-14 * k.h2(t));
        }
    }

    #[test]
    fn trivial_at_zero_fugacity() {
        let k = Kernels::new(&[0.0, 0.0], &[-0.3, 0.5]).unwrap();
        for t in [-3.0, -0.2, 0.0, 0.4, 5.0] {
            assert_eq!(k.ln_h1(t), 0.0);
            assert_eq!(k.ln_h2(t), 0.0);
            assert_eq!(k.g1(t), 0.0);
            assert_eq!(k.g2(t), 0.0);
        }
    }

    #[test]
    fn g1_reference_point() {
        // H1(0) = 1.5, so G1 = (1/1.5) (1/sqrt(2 pi)) (1/3)
        let g = g1(0.0, &[2f64.ln()], &[0.0]).unwrap();
        let oracle = 1.0 / 1.5 / (2.0 * PI).sqrt() / 3.0;
        assert!((g - oracle).abs() < 1e-16);
        assert!((g - 0.088_653_840_1).abs() < 1e-10);
    }

    #[test]
    fn limits_at_infinity() {
        let k = Kernels::new(&[0.8, -0.4], &[-1.0, 0.6]).unwrap();
        assert!(k.ln_h1(12.0).abs() < 1e-40);
        assert!(k.ln_h2(12.0).abs() < 1e-40);
        assert!((k.ln_h1(-12.0) - 0.4).abs() < 1e-15);
        assert!(k.g1(15.0).abs() < 1e-80 && k.g1(-15.0).abs() < 1e-80);
        assert!(k.g2(15.0).abs() < 1e-70);
    }

    #[test]
    fn ln_h_stays_accurate_near_zero_of_h() {
        // large negative u_1 drives H1 toward its positive lower envelope
        let k = Kernels::new(&[-40.0], &[0.0]).unwrap();
        let t = 3.0;
        // H1 = e^{-40} erfc(t)/2 + erfc(-t)/2
        let direct = ((-40f64).exp() * 0.5 * erfc(t) + 0.5 * erfc(-t)).ln();
        assert!((k.ln_h1(t) - direct).abs() < 1e-15);
        let t = -6.0;
        let direct = ((-40f64).exp() * 0.5 * erfc(t) + 0.5 * erfc(-t)).ln();
        assert!((k.ln_h1(t) - direct).abs() < 1e-13 * direct.abs());
    }

    #[test]
    fn huge_fugacity_does_not_overflow() {
        let k = Kernels::new(&[800.0], &[0.0]).unwrap();
        let t = 2.0;
        let direct = 800.0 + (0.5 * erfc(t)).ln() + (1.0 + (-800f64).exp() * erfc(-t) / erfc(t)).ln();
        assert!((k.ln_h1(t) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn h2_derivative_at_zero() {
        let u = [0.3, -0.6];
        let s = [-0.2, 0.9];
        let k = Kernels::new(&u, &s).unwrap();
        let h = 1e-5;
        let fd = (h2_direct(h, &u, &s) - h2_direct(-h, &u, &s)) / (2.0 * h);
        assert!((k.h2_prime_at_zero() - fd).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        assert!(Kernels::new(&[0.1], &[0.0, 1.0]).is_err());
        assert!(Kernels::new(&[0.1, 0.2], &[1.0, 0.0]).is_err());
        assert!(Kernels::new(&[], &[]).is_err());
    }
}

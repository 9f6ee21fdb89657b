//! Finite-n ensemble quantities: parameters, merging radii, jump weights, and
//! the exact moment generating function of the disk counts.

mod exact;

pub use exact::{
    covariance_exact, decoupling_residual, joint_cumulant_exact, joint_cumulant_exact_with, log_mgf_exact, mean_exact,
    variance_exact, ExactEngine, MAX_EXACT_ORDER,
};

use crate::error::{Error, Result};

/// Relative gap below which two consecutive radii are rejected as degenerate.
pub const MIN_RELATIVE_GAP: f64 = 1e-12;

/// Potential exponent `b`, point-charge exponent `alpha`, and number of points `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleParams {
    b: f64,
    alpha: f64,
    n: usize,
}

impl EnsembleParams {
    pub fn new(b: f64, alpha: f64, n: usize) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param("b", format!("must be positive and finite, got {b}")));
        }
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be finite and > -1, got {alpha}")));
        }
        if n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        Ok(Self { b, alpha, n })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Same exponents with a different number of points.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.b, self.alpha, n)
    }

    /// Gamma shape `a_j = (j + alpha) / b` of the j-th radial variable, `1 <= j <= n`.
    pub fn shape(&self, j: usize) -> f64 {
        (j as f64 + self.alpha) / self.b
    }

    /// Gamma argument `z = n r^{2b}` for radius `r`.
    pub fn gamma_argument(&self, r: f64) -> f64 {
        self.n as f64 * r.powf(2.0 * self.b)
    }

    /// Radius of the droplet edge, `b^{-1/(2b)}`.
    pub fn edge_radius(&self) -> f64 {
        edge_radius(self.b)
    }
}

pub(crate) fn edge_radius(b: f64) -> f64 {
    b.powf(-1.0 / (2.0 * b))
}

/// Where the radii merge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// Around a base radius strictly inside the droplet.
    Bulk { r: f64 },
    /// Around the droplet edge `b^{-1/(2b)}`.
    Edge,
}

/// Regime together with the strictly increasing offsets `s_1 < .. < s_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeConfig {
    regime: Regime,
    offsets: Vec<f64>,
}

impl MergeConfig {
    pub fn new(regime: Regime, offsets: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::param("offsets", "need at least one offset"));
        }
        if offsets.iter().any(|s| !s.is_finite()) {
            return Err(Error::param("offsets", "entries must be finite"));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("offsets", "must be strictly increasing"));
        }
        if let Regime::Bulk { r } = regime {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::param("r", format!("base radius must be positive, got {r}")));
            }
        }
        Ok(Self { regime, offsets })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn m(&self) -> usize {
        self.offsets.len()
    }

    /// Checks the bulk base radius against the droplet edge for exponent `b`.
    pub fn validate_for(&self, b: f64) -> Result<()> {
        if let Regime::Bulk { r } = self.regime {
            let edge = edge_radius(b);
            if r >= edge {
                return Err(Error::param(
                    "r",
                    format!("bulk base radius {r} must lie below the edge radius {edge}"),
                ));
            }
        }
        Ok(())
    }
}

/// Fugacities `u_1, .., u_m` (real).
#[derive(Debug, Clone, PartialEq)]
pub struct Fugacities(Vec<f64>);

impl Fugacities {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::param("u", "need at least one fugacity"));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("u", "entries must be finite"));
        }
        Ok(Self(u))
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl AsRef<[f64]> for Fugacities {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Suffix sums `U_l = u_l + .. + u_m` for `l = 1..=m+1` (so `U_{m+1} = 0`),
/// accumulated right to left.
pub(crate) fn suffix_sums(u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; u.len() + 1];
    for l in (0..u.len()).rev() {
        out[l] = out[l + 1] + u[l];
    }
    out
}

/// The weights `omega_l` and `Omega_l`, `l = 1..=m+1`, stored zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpWeights {
    pub omega: Vec<f64>,
    pub big_omega: Vec<f64>,
}

/// `Omega_l = exp(u_l + .. + u_m)`, `omega_l = Omega_l - Omega_{l+1}`, with
/// `Omega_{m+1} = omega_{m+1} = 1`.
pub fn jump_weights(u: &Fugacities) -> JumpWeights {
    let tail = suffix_sums(u.as_slice());
    let m = u.len();
    let big_omega: Vec<f64> = tail.iter().map(|t| t.exp()).collect();
    let mut omega = Vec::with_capacity(m + 1);
    for l in 0..m {
        // e^{U_{l+1}} (e^{u_l} - 1) avoids cancelling two nearly equal exponentials
        omega.push(tail[l + 1].exp() * u.as_slice()[l].exp_m1());
    }
    omega.push(1.0);
    JumpWeights { omega, big_omega }
}

/// Merging radii `r_1 < .. < r_m` for `params.n()`.
///
/// Bulk: `r_l = r (1 + sqrt(2) s_l / (r^b sqrt(n)))^{1/(2b)}`.
/// Edge: `r_l = b^{-1/(2b)} (1 + sqrt(2b) s_l / sqrt(n))^{1/(2b)}`.
pub fn radii(params: &EnsembleParams, cfg: &MergeConfig) -> Result<Vec<f64>> {
    cfg.validate_for(params.b)?;
    let b = params.b;
    let sqrt_n = (params.n as f64).sqrt();
    let (base, slope) = match cfg.regime {
        Regime::Bulk { r } => (r, std::f64::consts::SQRT_2 / (r.powf(b) * sqrt_n)),
        Regime::Edge => (edge_radius(b), (2.0 * b).sqrt() / sqrt_n),
    };
    let mut out = Vec::with_capacity(cfg.m());
    for &s in &cfg.offsets {
        let inner = 1.0 + slope * s;
        if !(inner > 0.0) {
            return Err(Error::param(
                "offsets",
                format!(
                    "offset {s} gives a nonpositive radius at n = {}; increase n or shrink the offsets",
                    params.n
                ),
            ));
        }
        out.push(base * inner.powf(1.0 / (2.0 * b)));
    }
    check_radii(&out)?;
    Ok(out)
}

/// Radii must be positive, finite and strictly increasing with relative gaps
/// of at least [`MIN_RELATIVE_GAP`].
pub fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::param("radii", "need at least one radius"));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::param("radii", "must be positive and finite"));
    }
    for w in radii.windows(2) {
        if !(w[1] - w[0] >= MIN_RELATIVE_GAP * w[0]) {
            return Err(Error::param(
                "radii",
                format!(
                    "{} and {} are not strictly increasing with a resolvable gap",
                    w[0], w[1]
                ),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(EnsembleParams::new(1.0, 0.0, 1).is_ok());
        assert!(EnsembleParams::new(0.0, 0.0, 1).is_err());
        assert!(EnsembleParams::new(1.0, -1.0, 1).is_err());
        assert!(EnsembleParams::new(1.0, 0.0, 0).is_err());
        assert!(EnsembleParams::new(f64::NAN, 0.0, 3).is_err());
        let p = EnsembleParams::new(2.0, 0.5, 10).unwrap();
        assert_eq!(p.shape(3), 1.75);
        assert_eq!(p.gamma_argument(1.0), 10.0);
    }

    #[test]
    fn weights_telescope() {
        let u = Fugacities::new(vec![0.3, -1.2, 0.7, 2.0]).unwrap();
        let w = jump_weights(&u);
        assert_eq!(w.big_omega.len(), 5);
        assert_eq!(*w.big_omega.last().unwrap(), 1.0);
        for l in 0..5 {
            let tail: f64 = w.omega[l..].iter().sum();
            assert!((tail - w.big_omega[l]).abs() < 1e-14 * w.big_omega[l]);
        }
    }

    #[test]
    fn single_fugacity_weights() {
        let w = jump_weights(&Fugacities::new(vec![0.4]).unwrap());
        assert!((w.omega[0] - 0.4f64.exp_m1()).abs() < 1e-16);
        assert!((w.big_omega[0] - 0.4f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_fugacities_give_trivial_weights() {
        let w = jump_weights(&Fugacities::zeros(3));
        assert_eq!(w.omega, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(w.big_omega, vec![1.0; 4]);
    }

    #[test]
    fn bulk_radius_reference() {
        let p = EnsembleParams::new(1.0, 0.0, 100).unwrap();
        let cfg = MergeConfig::new(Regime::Bulk { r: 0.5 }, vec![0.0, 1.0]).unwrap();
        let r = radii(&p, &cfg).unwrap();
        assert_eq!(r[0], 0.5);
        // 0.5 (1 + sqrt(2)/5)^{1/2}
        let oracle = 0.5 * (1.0 + 2f64.sqrt() / 5.0).sqrt();
        assert!((r[1] - oracle).abs() < 1e-15);
        assert!((r[1] - 0.566_313_233_218_733).abs() < 1e-14);
    }

    #[test]
    fn edge_radius_is_one_for_ginibre() {
        for n in [1, 7, 1000] {
            let p = EnsembleParams::new(1.0, 0.0, n).unwrap();
            let cfg = MergeConfig::new(Regime::Edge, vec![0.0]).unwrap();
            assert_eq!(radii(&p, &cfg).unwrap(), vec![1.0]);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(MergeConfig::new(Regime::Edge, vec![0.5, 0.5]).is_err());
        assert!(MergeConfig::new(Regime::Edge, vec![]).is_err());
        assert!(MergeConfig::new(Regime::Bulk { r: -0.1 }, vec![0.0]).is_err());
        let p = EnsembleParams::new(1.0, 0.0, 4).unwrap();
        let outside = MergeConfig::new(Regime::Bulk { r: 1.0 }, vec![0.0]).unwrap();
        assert!(radii(&p, &outside).is_err());
        // 1 + sqrt(2) s / (r sqrt(n)) <= 0
        let too_negative = MergeConfig::new(Regime::Bulk { r: 0.5 }, vec![-3.0]).unwrap();
        assert!(radii(&p, &too_negative).is_err());
        assert!(check_radii(&[0.5, 0.5 * (1.0 + 1e-13)]).is_err());
        assert!(check_radii(&[0.5, 0.5 * (1.0 + 1e-9)]).is_ok());
    }
}

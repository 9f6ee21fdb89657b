//! Two-term uniform asymptotic expansion of `P(a, lambda a)` for large `a`:
//!
//! ```text
//! P(a, lambda a) = erfc(-eta sqrt(a/2)) / 2 - R_a(eta)
//! R_a(eta) ~ exp(-a eta^2 / 2) / sqrt(2 pi a) * (c0(eta) + c1(eta) / a)
//! eta = (lambda - 1) sqrt(2 (lambda - 1 - ln lambda) / (lambda - 1)^2)
//! c0 = 1/(lambda - 1) - 1/eta
//! c1 = 1/eta^3 - 1/(lambda - 1)^3 - 1/(lambda - 1)^2 - 1/(12 (lambda - 1))
//! ```
//!
//! Only `c0` and `c1` are carried. Near `lambda = 1` all three closed forms
//! cancel catastrophically and are replaced by their Taylor expansions in
//! `d = lambda - 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::erf::erfcx;
use super::gamma::{phi, GammaPair};

/// Half-width of the window around `lambda = 1` where series forms are used.
const SERIES_WINDOW: f64 = 1e-3;

fn check_lambda(function: &'static str, lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(
            function,
            format!("lambda = {lambda} must be positive and finite"),
        ));
    }
    Ok(())
}

fn eta_unchecked(lambda: f64) -> f64 {
    let d = lambda - 1.0;
    if d.abs() < SERIES_WINDOW {
        // d - d^2/3 + 7d^3/36 - 73d^4/540 + 1331d^5/12960 - 22409d^6/272160
        const C: [f64; 6] = [
            1.0,
            -1.0 / 3.0,
            7.0 / 36.0,
            -73.0 / 540.0,
            1331.0 / 12960.0,
            -22409.0 / 272_160.0,
        ];
        C.iter().rev().fold(0.0, |acc, c| acc * d + c) * d
    } else {
        d.signum() * (2.0 * phi(lambda)).sqrt()
    }
}

/// `eta(lambda)`, continuous through `lambda = 1` with `sign(eta) = sign(lambda - 1)`.
pub fn temme_eta(lambda: f64) -> Result<f64> {
    check_lambda("temme_eta", lambda)?;
    Ok(eta_unchecked(lambda))
}

fn coeffs_unchecked(lambda: f64) -> (f64, f64) {
    let d = lambda - 1.0;
    if d.abs() < SERIES_WINDOW {
        let c0 = -1.0 / 3.0 + d * (1.0 / 12.0 + d * (-23.0 / 540.0 + d * (353.0 / 12960.0)));
        let c1 = -1.0 / 540.0 + d * (-1.0 / 288.0 + d * (23.0 / 6048.0 + d * (-3733.0 / 1_088_640.0)));
        (c0, c1)
    } else {
        let eta = eta_unchecked(lambda);
        let c0 = 1.0 / d - 1.0 / eta;
        let c1 = 1.0 / eta.powi(3) - 1.0 / d.powi(3) - 1.0 / (d * d) - 1.0 / (12.0 * d);
        (c0, c1)
    }
}

/// The first two expansion coefficients `(c0, c1)` at `lambda`.
pub fn temme_coeffs(lambda: f64) -> Result<(f64, f64)> {
    check_lambda("temme_coeffs", lambda)?;
    Ok(coeffs_unchecked(lambda))
}

/// Two-term truncation of the remainder `R_a(eta(lambda))`.
pub fn temme_r(a: f64, lambda: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("temme_r", format!("a = {a} must be positive and finite")));
    }
    check_lambda("temme_r", lambda)?;
    let eta = eta_unchecked(lambda);
    let (c0, c1) = coeffs_unchecked(lambda);
    Ok((-0.5 * a * eta * eta).exp() / (2.0 * PI * a).sqrt() * (c0 + c1 / a))
}

/// `P` and `Q` at `z = lambda a` from the two-term expansion.
///
/// The smaller of the two is formed in scaled form, with the common factor
/// `exp(-a eta^2 / 2)` pulled out of both the erfc term and `R_a`, so it
/// keeps relative accuracy deep in the tail.
pub(crate) fn temme_pair(a: f64, lambda: f64) -> GammaPair {
    let eta = eta_unchecked(lambda);
    let (c0, c1) = coeffs_unchecked(lambda);
    let gauss = (-0.5 * a * eta * eta).exp();
    let series = (c0 + c1 / a) / (2.0 * PI * a).sqrt();
    let x = eta * (0.5 * a).sqrt();
    if eta < 0.0 {
        // P = e^{-a eta^2/2} [erfcx(-x)/2 - series]
        GammaPair::from_p(gauss * (0.5 * erfcx(-x) - series))
    } else {
        // Q = erfc(x)/2 + R = e^{-a eta^2/2} [erfcx(x)/2 + series]
        GammaPair::from_q(gauss * (0.5 * erfcx(x) + series))
    }
}

/// `P(a, z)` forced through the two-term uniform expansion for any `a`.
///
/// Accuracy is limited by the truncation (relative error near `6e-3 / a^2`);
/// the dispatcher in [`super::reg_lower_gamma`] only routes here when that
/// is below its accuracy contract.
pub fn reg_lower_gamma_temme(a: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(
            "reg_lower_gamma_temme",
            format!("a = {a} must be positive and finite"),
        ));
    }
    if !(z >= 0.0) {
        return Err(Error::domain(
            "reg_lower_gamma_temme",
            format!("z = {z} must be nonnegative"),
        ));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(temme_pair(a, z / a).p)
}
